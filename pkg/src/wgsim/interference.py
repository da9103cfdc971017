"""Two-photon quantum interference at a single coupler.

Partial distinguishability is carried by the overlap ``gamma`` of the two
photons' internal states. For two photons the outcome statistics are an
exact mixture: with weight ``|gamma|^2`` the pair interferes as identical
bosons, otherwise it behaves like two classical particles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuit import SYMMETRIC, coupler_unitary, check_eta
from .errors import DomainError, UndefinedVisibilityError
from .fock import FockState, ModeUnitary, evolve_superposition

SPEED_OF_LIGHT = 299_792_458.0
PROBABILITY = "probability"
AMPLITUDE = "amplitude"


@dataclass(frozen=True)
class DistinguishabilitySpec:
    """Internal-state overlap of a photon pair.

    ``indistinguishability`` is ``|gamma|^2`` and the mode mismatch
    ``epsilon`` is ``1 - |gamma|^2`` (a probability-level mismatch, so the
    visibility at a balanced coupler is ``1 - epsilon``).
    """

    gamma: complex = 1.0

    def __post_init__(self):
        g = complex(self.gamma)
        if not (math.isfinite(g.real) and math.isfinite(g.imag)) or abs(g) > 1 + 1e-12:
            raise DomainError(f"|gamma| must be at most 1, got {self.gamma!r}")
        if abs(g) > 1:
            g = g / abs(g)
        object.__setattr__(self, "gamma", g)

    @classmethod
    def from_epsilon(cls, epsilon: float, level: str = PROBABILITY) -> "DistinguishabilitySpec":
        """Build from a mode mismatch.

        ``level="probability"`` reads ``epsilon`` as ``1 - |gamma|^2``;
        ``level="amplitude"`` reads it as ``1 - |gamma|``.
        """
        if not 0.0 <= epsilon <= 1.0:
            raise DomainError(f"epsilon must lie in [0, 1], got {epsilon!r}")
        if level == PROBABILITY:
            return cls(math.sqrt(1.0 - epsilon))
        if level == AMPLITUDE:
            return cls(1.0 - epsilon)
        raise ValueError(f"unknown mismatch level {level!r}")

    @property
    def indistinguishability(self) -> float:
        return abs(self.gamma) ** 2

    @property
    def epsilon(self) -> float:
        return 1.0 - self.indistinguishability

    @property
    def amplitude_epsilon(self) -> float:
        return 1.0 - abs(self.gamma)


INDISTINGUISHABLE = DistinguishabilitySpec(1.0)
DISTINGUISHABLE = DistinguishabilitySpec(0.0)


@dataclass(frozen=True)
class SourceSpec:
    """Degenerate pair source seen through Gaussian interference filters.

    Lengths in metres, rates in pairs per second.
    """

    center_wavelength: float = 804e-9
    filter_fwhm: float = 2e-9
    pair_rate: float = 4000.0

    def __post_init__(self):
        for name in ("center_wavelength", "filter_fwhm", "pair_rate"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise DomainError(f"{name} must be positive, got {val!r}")

    @property
    def sigma_omega(self) -> float:
        """RMS angular-frequency width of the filtered intensity spectrum (rad/s)."""
        fwhm_omega = 2 * math.pi * SPEED_OF_LIGHT * self.filter_fwhm / self.center_wavelength**2
        return fwhm_omega / math.sqrt(8 * math.log(2))


@dataclass(frozen=True)
class DelayScan:
    delays: tuple[float, ...]
    coincidence_probs: tuple[float, ...]

    def visibility(self) -> float:
        """``(max - min) / max`` over the scanned points."""
        if not self.coincidence_probs:
            raise UndefinedVisibilityError("empty scan")
        hi, lo = max(self.coincidence_probs), min(self.coincidence_probs)
        if hi <= 0:
            raise UndefinedVisibilityError("no coincidences anywhere in the scan")
        return (hi - lo) / hi


def coincidence_probability(eta: float, d: DistinguishabilitySpec = INDISTINGUISHABLE) -> float:
    """Probability of one photon in each output of a coupler fed ``|11>``."""
    eta = check_eta(eta)
    classical = eta**2 + (1 - eta) ** 2
    return classical - 2 * eta * (1 - eta) * d.indistinguishability


def coincidence_probability_fock(eta: float, d: DistinguishabilitySpec = INDISTINGUISHABLE,
                                 convention: str = SYMMETRIC) -> float:
    """Same quantity as :func:`coincidence_probability` from a full Fock calculation.

    Uses four modes (two waveguides x two orthogonal internal states). The
    first photon is in internal state ``h``; the second in
    ``gamma h + sqrt(1 - |gamma|^2) v``.
    """
    c = coupler_unitary(eta, convention)
    # mode index 2*waveguide + internal
    u = np.kron(c, np.eye(2))
    g = d.gamma
    rest = math.sqrt(max(0.0, 1.0 - abs(g) ** 2))
    components = [(g, FockState.of(1, 0, 1, 0)), (rest, FockState.of(1, 0, 0, 1))]
    out = evolve_superposition(ModeUnitary(u), components)
    probs = out.probabilities()
    return float(sum(p for s, p in zip(out.basis, probs)
                     if s.occupations[0] + s.occupations[1] == 1))


def visibility(eta: float, d: DistinguishabilitySpec = INDISTINGUISHABLE) -> float:
    """Dip visibility ``(P_dist - P_coinc) / P_dist`` at reflectivity ``eta``."""
    eta = check_eta(eta)
    if eta <= 0.0 or eta >= 1.0:
        raise UndefinedVisibilityError(f"no two-photon dip at eta={eta}")
    return 2 * eta * (1 - eta) * d.indistinguishability / (eta**2 + (1 - eta) ** 2)


def overlap_vs_delay(tau: float, source: SourceSpec = SourceSpec(),
                     floor: DistinguishabilitySpec = INDISTINGUISHABLE) -> DistinguishabilitySpec:
    """Overlap for relative arrival delay ``tau`` (seconds).

    The filtered spectrum is Gaussian, so ``|gamma(tau)|^2`` falls as
    ``exp(-sigma_omega^2 tau^2)`` from its zero-delay value ``floor``.
    """
    if not math.isfinite(tau):
        raise DomainError(f"delay must be finite, got {tau!r}")
    return DistinguishabilitySpec(floor.gamma * math.exp(-0.5 * (source.sigma_omega * tau) ** 2))


def hom_scan(eta: float, source: SourceSpec, floor: DistinguishabilitySpec,
             delays: Sequence[float]) -> DelayScan:
    """Coincidence probability across relative delays."""
    delays = tuple(float(t) for t in delays)
    probs = tuple(coincidence_probability(eta, overlap_vs_delay(t, source, floor)) for t in delays)
    return DelayScan(delays, probs)


def visibility_curve(eta_values: Sequence[float], delta_eta: float = 0.0,
                     epsilon: float = 0.0) -> list[tuple[float, float]]:
    """Visibility against design reflectivity, for couplers realized at ``eta + delta_eta``.

    Points whose realized reflectivity leaves (0, 1) get ``nan``.
    """
    d = DistinguishabilitySpec.from_epsilon(epsilon)
    out = []
    for eta in eta_values:
        realized = eta + delta_eta
        v = visibility(realized, d) if 0.0 < realized < 1.0 else math.nan
        out.append((float(eta), v))
    return out
