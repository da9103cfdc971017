"""Dual-rail logic on top of mode unitaries: post-selection and gate metrics.

Logical basis index ``i = 2 * control_bit + target_bit`` throughout, so rows
and columns of every 4x4 object are ordered 00, 01, 10, 11.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .circuit import (C0, C1, T0, T1, ImperfectionSpec, cnot_netlist, cnot_with_hadamards,
                      compile_netlist)
from .errors import DomainError
from .fock import FockState, ModeUnitary, transition_amplitude
from .interference import INDISTINGUISHABLE, DistinguishabilitySpec

LOGICAL_LABELS = ("00", "01", "10", "11")
NORMALIZATION_ATOL = 1e-9

CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
H_CONTROL = np.kron(HADAMARD, np.eye(2))

BELL_STATES = {
    "phi+": np.array([1, 0, 0, 1]) / math.sqrt(2),
    "phi-": np.array([1, 0, 0, -1]) / math.sqrt(2),
    "psi+": np.array([0, 1, 1, 0]) / math.sqrt(2),
    "psi-": np.array([0, 1, -1, 0]) / math.sqrt(2),
}


@dataclass(frozen=True)
class DualRailEncoding:
    control_modes: tuple[int, int] = (C0, C1)
    target_modes: tuple[int, int] = (T0, T1)

    def __post_init__(self):
        modes = tuple(self.control_modes) + tuple(self.target_modes)
        if len(modes) != 4 or len(set(modes)) != 4:
            raise DomainError(f"dual-rail encoding needs four distinct modes, got {modes}")

    def modes_for(self, index: int) -> tuple[int, int]:
        """(control mode, target mode) occupied by logical basis state ``index``."""
        c, t = divmod(index, 2)
        return self.control_modes[c], self.target_modes[t]

    def fock_state(self, index: int, m: int) -> FockState:
        occ = [0] * m
        for mode in self.modes_for(index):
            occ[mode] += 1
        return FockState(tuple(occ))


CNOT_ENCODING = DualRailEncoding()


@dataclass(frozen=True)
class LogicalState:
    """Post-selected two-qubit state.

    ``amplitudes`` are renormalized; ``success_prob`` is the coincidence
    probability before renormalization. A failed post-selection has
    ``success_prob == 0`` and all-zero amplitudes.
    """

    amplitudes: np.ndarray
    success_prob: float

    @property
    def succeeded(self) -> bool:
        return self.success_prob > 0

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class TruthTable:
    probs: np.ndarray
    success_probs: np.ndarray
    failed_rows: tuple[int, ...] = field(default=())

    def row(self, index: int) -> np.ndarray:
        return self.probs[index]


def _logical_amplitudes(u: ModeUnitary, enc: DualRailEncoding, index: int) -> np.ndarray:
    m = u.m
    inp = enc.fock_state(index, m)
    return np.array([transition_amplitude(u, inp, enc.fock_state(j, m)) for j in range(4)])


def logical_matrix(u: ModeUnitary, enc: DualRailEncoding = CNOT_ENCODING) -> np.ndarray:
    """Unnormalized post-selected 4x4 map, column ``i`` = output amplitudes for input ``i``."""
    if u.m < 4 or max(enc.control_modes + enc.target_modes) >= u.m:
        raise DomainError(f"encoding modes do not fit a {u.m}-mode unitary")
    return np.column_stack([_logical_amplitudes(u, enc, i) for i in range(4)])


def postselect_logical(u: ModeUnitary, enc: DualRailEncoding, index: int) -> LogicalState:
    """Evolve logical input ``index`` and keep one-photon-per-qubit outcomes."""
    if not 0 <= index < 4:
        raise ValueError(f"logical index must be 0..3, got {index}")
    if u.m < 4 or max(enc.control_modes + enc.target_modes) >= u.m:
        raise DomainError(f"encoding modes do not fit a {u.m}-mode unitary")
    amps = _logical_amplitudes(u, enc, index)
    p = float(np.sum(np.abs(amps) ** 2))
    if p == 0.0:
        return LogicalState(np.zeros(4, dtype=complex), 0.0)
    return LogicalState(amps / math.sqrt(p), p)


def _distinguishable_probs(u: ModeUnitary, enc: DualRailEncoding, index: int) -> np.ndarray:
    # two independent single photons: no two-photon interference term
    w = np.abs(u.matrix) ** 2
    a, b = enc.modes_for(index)
    out = np.empty(4)
    for j in range(4):
        x, y = enc.modes_for(j)
        out[j] = w[x, a] * w[y, b] + w[y, a] * w[x, b]
    return out


def truth_table(u: ModeUnitary, enc: DualRailEncoding = CNOT_ENCODING,
                distinguishability: DistinguishabilitySpec = INDISTINGUISHABLE) -> TruthTable:
    """Row-renormalized post-selected output probabilities for each logical input.

    Partially distinguishable pairs are the mixture of the interfering and
    the classical two-photon statistics, weighted by ``|gamma|^2``.
    """
    ind = distinguishability.indistinguishability
    rows, success, failed = [], [], []
    for i in range(4):
        raw = ind * np.abs(_logical_amplitudes(u, enc, i)) ** 2
        if ind < 1.0:
            raw = raw + (1.0 - ind) * _distinguishable_probs(u, enc, i)
        p = float(raw.sum())
        success.append(p)
        if p == 0.0:
            failed.append(i)
            rows.append(np.zeros(4))
        else:
            rows.append(raw / p)
    return TruthTable(np.array(rows), np.array(success), tuple(failed))


def ideal_truth_table(target: np.ndarray) -> TruthTable:
    target = np.asarray(target)
    return TruthTable(np.abs(target.T) ** 2, np.ones(4))


def _validate_distribution(p: np.ndarray, name: str) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if np.any(p < -NORMALIZATION_ATOL) or abs(p.sum() - 1.0) > NORMALIZATION_ATOL:
        raise ValueError(f"{name} is not a normalized distribution: {p}")
    return np.clip(p, 0.0, None)


def classical_fidelity(p: Sequence[float], q: Sequence[float]) -> float:
    """Squared Bhattacharyya overlap ``(sum sqrt(p_i q_i))^2``."""
    p = _validate_distribution(p, "p")
    q = _validate_distribution(q, "q")
    if p.shape != q.shape:
        raise ValueError("distributions have different lengths")
    return float(min(1.0, np.sum(np.sqrt(p * q)) ** 2))


def logical_basis_fidelity(measured: TruthTable, ideal: TruthTable) -> float:
    """Mean classical fidelity over the four input rows."""
    return float(np.mean([classical_fidelity(measured.probs[i], ideal.probs[i]) for i in range(4)]))


def simulate_truth_table(eta_half: float, delta_eta: float = 0.0, epsilon: float = 0.0,
                         eta_third: float | None = None, h_before: bool = False,
                         h_after: bool = False) -> TruthTable:
    """Truth table of the fabricated device with design ratios and a uniform offset."""
    if eta_third is None:
        eta_third = 2 * eta_half / 3
    net = cnot_with_hadamards(eta_half, eta_third, h_before=h_before, h_after=h_after)
    u = compile_netlist(net, ImperfectionSpec(delta_eta))
    return truth_table(u, CNOT_ENCODING, DistinguishabilitySpec.from_epsilon(epsilon))


def fidelity_vs_eta(eta_half_values: Sequence[float], delta_eta: float = 0.0,
                    epsilon: float = 0.0) -> list[tuple[float, float]]:
    """Logical basis fidelity of CNOTs designed at ``(eta, 2 eta / 3)``."""
    ideal = ideal_truth_table(CNOT)
    out = []
    for eta in eta_half_values:
        table = simulate_truth_table(eta, delta_eta, epsilon)
        out.append((float(eta), logical_basis_fidelity(table, ideal)))
    return out


def _phase_screen(params: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # relative phase on the |1> rail of each qubit, at input and output
    ci, ti, co, to = np.exp(1j * params)
    d_in = np.kron([1, ci], [1, ti])
    d_out = np.kron([1, co], [1, to])
    return d_in, d_out


def logical_equivalence(u: ModeUnitary, enc: DualRailEncoding, target: np.ndarray,
                        atol: float = 1e-8) -> tuple[bool, float]:
    """Compare the post-selected map with ``target`` up to local diagonal phases.

    The distance is ``1 - |<D_out T D_in, L>| / (|L| |T|)`` maximized over
    per-qubit input and output phases (Frobenius inner product), so global
    phase and overall success amplitude drop out.
    """
    lm = logical_matrix(u, enc)
    target = np.asarray(target, dtype=complex)
    sv = np.linalg.svd(lm, compute_uv=False)
    if sv[0] == 0 or sv[-1] < 1e-12 * sv[0]:
        return False, 1.0
    norm = np.linalg.norm(lm) * np.linalg.norm(target)

    def loss(params):
        d_in, d_out = _phase_screen(params)
        candidate = d_out[:, None] * target * d_in[None, :]
        return 1.0 - abs(np.vdot(candidate, lm)) / norm

    rng = np.random.default_rng(0)
    starts = [np.zeros(4)] + [rng.uniform(-math.pi, math.pi, 4) for _ in range(11)]
    best = min((minimize(loss, x0, method="BFGS", options={"gtol": 1e-12}) for x0 in starts),
               key=lambda r: r.fun)
    distance = max(0.0, float(best.fun))
    return distance < atol, distance


def bell_state_outputs(eta_half: float = 0.5, eta_third: float = 1 / 3,
                       delta_eta: float = 0.0) -> list[LogicalState]:
    """Post-selected outputs of the Hadamard-then-CNOT device for inputs 00..11."""
    net = cnot_with_hadamards(eta_half, eta_third, h_before=True, h_after=False)
    u = compile_netlist(net, ImperfectionSpec(delta_eta))
    return [postselect_logical(u, CNOT_ENCODING, i) for i in range(4)]


def global_phase_distance(state: np.ndarray, reference: np.ndarray) -> float:
    """``1 - |<ref|state>|`` for normalized vectors; zero iff equal up to global phase."""
    state = np.asarray(state) / np.linalg.norm(state)
    reference = np.asarray(reference) / np.linalg.norm(reference)
    return max(0.0, 1.0 - abs(np.vdot(reference, state)))
