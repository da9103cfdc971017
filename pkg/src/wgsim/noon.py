"""Two-photon path entanglement inside a coupler interferometer.

``|11>`` on a balanced coupler becomes ``(|20> - |02>)/sqrt(2)`` (up to a
global phase). Measuring photon pairs right after that coupler (the "tap")
gives the populations; recombining at a second balanced coupler maps the
entangled state back to ``|11>``, and the revival of coincidences bounds the
coherence between ``|20>`` and ``|02>``.

States are written over the ordered basis ``(|20>, |11>, |02>)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .detection import ExperimentConfig, make_rng
from .circuit import SYMMETRIC, coupler_unitary, check_eta
from .errors import DomainError, InconsistentDataError
from .fock import ModeUnitary, enumerate_fock_basis, evolve
from .interference import INDISTINGUISHABLE, DistinguishabilitySpec

TWO_PHOTON_BASIS = tuple(enumerate_fock_basis(2, 2))  # |20>, |11>, |02>
NOON_VECTOR = np.array([1.0, 0.0, -1.0]) / math.sqrt(2)
RHO_ATOL = 1e-9

# Reference phase of the lower arm inside the interferometer. With the
# symmetric coupler the balanced split of |11> is i(|20> + |02>)/sqrt(2);
# a -pi/2 reference on the lower arm writes it as i(|20> - |02>)/sqrt(2).
ARM_PHASE = np.diag([1.0, -1j])


def two_photon_transfer(u: np.ndarray) -> np.ndarray:
    """3x3 action of a 2-mode unitary on the two-photon subspace."""
    mu = ModeUnitary(u)
    return np.column_stack([evolve(mu, s).amplitudes for s in TWO_PHOTON_BASIS])


def splitter_matrix(eta: float) -> np.ndarray:
    """First coupler followed by the arm reference phase."""
    return ARM_PHASE @ coupler_unitary(eta, SYMMETRIC)


def recombiner_matrix(eta: float) -> np.ndarray:
    """Undo the arm reference phase, then the second coupler."""
    return coupler_unitary(eta, SYMMETRIC) @ ARM_PHASE.conj().T


def noon_state(eta: float = 0.5) -> np.ndarray:
    """Amplitudes over (|20>, |11>, |02>) after ``|11>`` crosses a coupler."""
    check_eta(eta)
    return two_photon_transfer(splitter_matrix(eta))[:, 1]


@dataclass(frozen=True)
class TwoPhotonDensityMatrix:
    entries: np.ndarray

    def __post_init__(self):
        rho = np.array(self.entries, dtype=complex)
        if rho.shape != (3, 3):
            raise DomainError(f"two-photon density matrix must be 3x3, got {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > RHO_ATOL:
            raise DomainError("density matrix is not Hermitian")
        if abs(np.trace(rho).real - 1.0) > RHO_ATOL:
            raise DomainError(f"density matrix trace is {np.trace(rho).real}, not 1")
        if np.min(np.linalg.eigvalsh(rho)) < -RHO_ATOL:
            raise DomainError("density matrix is not positive semidefinite")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)

    @classmethod
    def pure(cls, amplitudes) -> "TwoPhotonDensityMatrix":
        v = np.asarray(amplitudes, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.entries)).copy()


def fidelity_to_noon(rho: TwoPhotonDensityMatrix) -> float:
    """``<psi|rho|psi>`` for ``psi = (|20> - |02>)/sqrt(2)``."""
    if not isinstance(rho, TwoPhotonDensityMatrix):
        rho = TwoPhotonDensityMatrix(rho)
    r = rho.entries
    return float((r[0, 0].real + r[2, 2].real) / 2 - r[0, 2].real)


def cascaded_detection_prob(n: int, splitter_ratio: float = 0.5, efficiency: float = 1.0) -> float:
    """Chance that both detectors behind a fiber splitter fire for ``n`` photons."""
    if n not in (0, 1, 2):
        raise DomainError(f"cascaded detection is modeled for 0-2 photons, got {n}")
    if not 0 < splitter_ratio < 1:
        raise DomainError(f"splitter ratio must lie in (0, 1), got {splitter_ratio}")
    if not 0 < efficiency <= 1:
        raise DomainError(f"efficiency must lie in (0, 1], got {efficiency}")
    if n < 2:
        return 0.0
    return 2 * splitter_ratio * (1 - splitter_ratio) * efficiency**2


@dataclass(frozen=True)
class NoonCountRecord:
    """Pair count rates (per second) at the tap and at the recombined outputs.

    ``*_bunched_rates`` are (upper arm, lower arm) rates of both cascaded
    detectors firing.
    """

    tap_coincidence_rate: float
    tap_bunched_rates: tuple[float, float]
    out_coincidence_rate: float
    out_bunched_rates: tuple[float, float]
    detector_efficiency: float = 1.0
    splitter_ratio: float = 0.5

    def __post_init__(self):
        rates = (self.tap_coincidence_rate, *self.tap_bunched_rates,
                 self.out_coincidence_rate, *self.out_bunched_rates)
        if any(not math.isfinite(r) or r < 0 for r in rates):
            raise DomainError(f"count rates must be finite and non-negative: {rates}")
        if not 0 < self.detector_efficiency <= 1:
            raise DomainError("detector efficiency must lie in (0, 1]")
        if not 0 < self.splitter_ratio < 1:
            raise DomainError("splitter ratio must lie in (0, 1)")


def _populations(coinc: float, bunched: tuple[float, float], e: float, s: float) -> np.ndarray:
    pair = cascaded_detection_prob(2, s, e)
    raw = np.array([bunched[0] / pair, coinc / e**2, bunched[1] / pair])
    total = raw.sum()
    if total <= 0:
        raise InconsistentDataError("no detected pairs")
    return raw / total


def estimate_density_matrix(rec: NoonCountRecord, atol: float = 0.05
                            ) -> tuple[TwoPhotonDensityMatrix, float]:
    """Worst-case two-photon density matrix and NOON fidelity bound.

    Populations come from the tap rates. All recombined counts in the
    bunched outputs are charged against the |20>/|02> coherence (none to
    the |11> population), so the recombined coincidence fraction equals
    ``(P20 + P02)/2 - Re rho[20,02]``. The coherence is taken real; the
    unmeasurable coherences with |11> are set to zero, which is always
    compatible with positivity and leaves the fidelity unchanged.

    Raises :class:`InconsistentDataError` when the implied coherence
    exceeds the positivity limit ``sqrt(P20 P02)`` by more than ``atol``.
    """
    e, s = rec.detector_efficiency, rec.splitter_ratio
    p20, p11, p02 = _populations(rec.tap_coincidence_rate, rec.tap_bunched_rates, e, s)
    q20, q11, q02 = _populations(rec.out_coincidence_rate, rec.out_bunched_rates, e, s)
    coherence = q11 - (p20 + p02) / 2  # = -Re rho[20,02]
    limit = math.sqrt(p20 * p02)
    if abs(coherence) > limit + atol:
        raise InconsistentDataError(
            f"recombined coincidences imply |coherence| {abs(coherence):.4f} above the bound {limit:.4f}"
        )
    coherence = max(-limit, min(limit, coherence))
    rho = np.array([[p20, 0, -coherence], [0, p11, 0], [-coherence, 0, p02]], dtype=complex)
    est = TwoPhotonDensityMatrix(rho)
    return est, fidelity_to_noon(est)


def _outcome_probs(transfer: np.ndarray, rho: np.ndarray, d: DistinguishabilitySpec,
               u: np.ndarray) -> np.ndarray:
    ind = d.indistinguishability
    coherent = np.real(np.diag(transfer @ rho @ transfer.conj().T))
    if ind >= 1.0:
        return coherent
    # distinguishable pair launched as |11>: independent single photons
    w = np.abs(u) ** 2
    classical = np.array([w[0, 0] * w[0, 1], w[0, 0] * w[1, 1] + w[1, 0] * w[0, 1], w[1, 0] * w[1, 1]])
    return ind * coherent + (1 - ind) * classical


def simulate_count_record(eta: float = 0.5, delta_eta: float = 0.0,
                          distinguishability: DistinguishabilitySpec = INDISTINGUISHABLE,
                          efficiency: float = 1.0, transmission: float = 1.0,
                          splitter_ratio: float = 0.5, pair_rate: float = 4000.0,
                          recombiner_eta: float | None = None) -> NoonCountRecord:
    """Expected (noise-free) rates for ``|11>`` launched into the interferometer.

    Both couplers are realized at ``eta + delta_eta``. Uniform transmission
    scales every pair rate by ``transmission**2``.
    """
    eta_1 = min(1.0, max(0.0, eta + delta_eta))
    eta_2 = eta_1 if recombiner_eta is None else min(1.0, max(0.0, recombiner_eta + delta_eta))
    split, recomb = splitter_matrix(eta_1), recombiner_matrix(eta_2)
    launch = np.zeros((3, 3), dtype=complex)
    launch[1, 1] = 1.0
    tap = _outcome_probs(two_photon_transfer(split), launch, distinguishability, split)
    full = recomb @ split
    out = _outcome_probs(two_photon_transfer(full), launch, distinguishability, full)
    return record_from_probabilities(tap, out, efficiency, transmission, splitter_ratio, pair_rate)


def record_from_probabilities(tap: np.ndarray, out: np.ndarray, efficiency: float = 1.0,
                              transmission: float = 1.0, splitter_ratio: float = 0.5,
                              pair_rate: float = 4000.0) -> NoonCountRecord:
    """Rates from (P20, P11, P02) at the tap and after recombination."""
    scale = pair_rate * transmission**2
    bunch = cascaded_detection_prob(2, splitter_ratio, efficiency)
    coinc = efficiency**2

    def rates(p):
        return scale * coinc * p[1], (scale * bunch * p[0], scale * bunch * p[2])

    tc, tb = rates(tap)
    oc, ob = rates(out)
    return NoonCountRecord(tc, tb, oc, ob, efficiency, splitter_ratio)


def record_for_state(rho: TwoPhotonDensityMatrix, efficiency: float = 1.0, transmission: float = 1.0,
                     splitter_ratio: float = 0.5, pair_rate: float = 4000.0) -> NoonCountRecord:
    """Expected rates if ``rho`` were the state inside an ideal interferometer."""
    r = rho.entries
    tap = np.real(np.diag(r))
    t = two_photon_transfer(recombiner_matrix(0.5))
    out = np.real(np.diag(t @ r @ t.conj().T))
    return record_from_probabilities(tap, out, efficiency, transmission, splitter_ratio, pair_rate)


def sample_count_record(rec: NoonCountRecord, cfg: ExperimentConfig) -> NoonCountRecord:
    """Replace expected rates by Poisson counts over ``cfg.integration_time``.

    Draw order: tap coincidence, tap bunched (upper, lower), recombined
    coincidence, recombined bunched (upper, lower); one Philox stream.
    ``cfg.pair_rate`` is unused since the record already holds rates.
    """
    rng = make_rng(cfg.rng_seed)
    t = cfg.integration_time
    means = [rec.tap_coincidence_rate, *rec.tap_bunched_rates, rec.out_coincidence_rate, *rec.out_bunched_rates]
    r = [int(rng.poisson(m * t)) / t for m in means]
    return NoonCountRecord(r[0], (r[1], r[2]), r[3], (r[4], r[5]), rec.detector_efficiency, rec.splitter_ratio)
