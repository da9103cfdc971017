import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wgsim.circuit import (C0, C1, REAL, SYMMETRIC, T0, T1, V_A, ImperfectionSpec, cnot_netlist, cnot_with_hadamards,
                           compile_netlist)
from wgsim.fock import FockState, ModeUnitary, evolve_superposition
from wgsim.gates import (BELL_STATES, CNOT, CNOT_ENCODING, H_CONTROL, DualRailEncoding, TruthTable,
                         bell_state_outputs, classical_fidelity, fidelity_vs_eta, global_phase_distance,
                         ideal_truth_table, logical_basis_fidelity, logical_equivalence, logical_matrix,
                         postselect_logical, simulate_truth_table, truth_table)
from wgsim.errors import DomainError
from wgsim.interference import DistinguishabilitySpec

CNOT_TABLE = np.eye(4)[[0, 1, 3, 2]]


def internal_state_truth_table(u, gamma):
    """Truth table from a 12-mode calculation with an explicit internal degree of freedom.

    Mode ``2*k + s`` is waveguide ``k`` in internal state ``s``. The control
    photon sits in state 0; the target photon in ``gamma|0> + sqrt(1-|gamma|^2)|1>``.
    """
    big = ModeUnitary(np.kron(u.matrix, np.eye(2)))
    rest = math.sqrt(max(0.0, 1 - abs(gamma) ** 2))
    rails = {0: (C0, T0), 1: (C0, T1), 2: (C1, T0), 3: (C1, T1)}
    table = np.zeros((4, 4))
    for i, (c, t) in rails.items():
        comps = []
        for s, amp in ((0, gamma), (1, rest)):
            occ = [0] * 12
            occ[2 * c] += 1
            occ[2 * t + s] += 1
            comps.append((amp, FockState(tuple(occ))))
        out = evolve_superposition(big, comps)
        for state, p in zip(out.basis, out.probabilities()):
            spatial = [state.occupations[2 * k] + state.occupations[2 * k + 1] for k in range(6)]
            for j, (oc, ot) in rails.items():
                if spatial[oc] == 1 and spatial[ot] == 1 and sum(spatial) == 2:
                    table[i, j] += p
    return table / table.sum(axis=1, keepdims=True)


class TestIdealGate:
    @pytest.mark.parametrize("conv", [SYMMETRIC, REAL])
    def test_truth_table(self, conv):
        table = truth_table(compile_netlist(cnot_netlist(convention=conv), convention=conv))
        assert np.max(np.abs(table.probs - CNOT_TABLE)) < 1e-10
        assert np.max(np.abs(table.success_probs - 1 / 9)) < 1e-10
        assert table.failed_rows == ()

    def test_control_zero_rows(self):
        table = simulate_truth_table(0.5)
        assert table.row(0)[0] == pytest.approx(1.0)
        assert table.row(1)[1] == pytest.approx(1.0)

    def test_identity_circuit(self):
        table = truth_table(ModeUnitary(np.eye(6)))
        assert np.allclose(table.probs, np.eye(4))
        assert np.allclose(table.success_probs, 1.0)

    def test_failed_postselection(self):
        # swap C0 with the vacuum mode: inputs with control 0 never leave a photon in the control rails
        perm = np.eye(6)[[C0, V_A, C1, T0, T1, 5]]
        u = ModeUnitary(perm)
        table = truth_table(u)
        assert table.failed_rows == (0, 1)
        assert not postselect_logical(u, CNOT_ENCODING, 0).succeeded
        assert np.all(table.probs[0] == 0)

    def test_both_hadamards_uniform(self):
        table = simulate_truth_table(0.5, h_before=True, h_after=True)
        assert np.allclose(table.probs, 0.25, atol=1e-12)

    def test_fully_reflecting_target_couplers(self):
        # eta_half = 1 leaves the target rails uncoupled: the target never flips
        table = simulate_truth_table(1.0, eta_third=1 / 3)
        assert np.allclose(table.probs, np.eye(4), atol=1e-12)

    def test_encoding_validation(self):
        with pytest.raises(DomainError):
            DualRailEncoding((1, 1), (3, 4))
        with pytest.raises(DomainError):
            logical_matrix(ModeUnitary(np.eye(3)))


class TestDistinguishableMixture:
    @pytest.mark.parametrize("eps", [0.0, 0.052, 0.3, 1.0])
    @pytest.mark.parametrize("delta", [0.0, 0.034, -0.05])
    def test_matches_internal_state_oracle(self, eps, delta):
        u = compile_netlist(cnot_netlist(0.47, 0.31), ImperfectionSpec(delta))
        d = DistinguishabilitySpec.from_epsilon(eps)
        model = truth_table(u, CNOT_ENCODING, d).probs
        oracle = internal_state_truth_table(u, d.gamma)
        assert np.max(np.abs(model - oracle)) < 1e-12

    @settings(max_examples=10, deadline=None)
    @given(st.integers(0, 2**31))
    def test_random_unitary_oracle(self, seed):
        from scipy.stats import unitary_group
        u = ModeUnitary(unitary_group.rvs(6, random_state=seed))
        g = np.random.default_rng(seed).uniform()
        model = truth_table(u, CNOT_ENCODING, DistinguishabilitySpec(g)).probs
        assert np.max(np.abs(model - internal_state_truth_table(u, g))) < 1e-12


class TestConventions:
    @pytest.mark.parametrize("delta", [0.0, 0.034, -0.02])
    @pytest.mark.parametrize("eps", [0.0, 0.052])
    def test_truth_tables_agree(self, delta, eps):
        d = DistinguishabilitySpec.from_epsilon(eps)
        imp = ImperfectionSpec(delta)
        tables = [truth_table(compile_netlist(cnot_netlist(0.5, 1 / 3, c), imp, c), CNOT_ENCODING, d).probs
                  for c in (SYMMETRIC, REAL)]
        assert np.max(np.abs(tables[0] - tables[1])) < 1e-12

    @pytest.mark.parametrize("conv", [SYMMETRIC, REAL])
    def test_hadamard_variant_agrees(self, conv):
        net = cnot_with_hadamards(0.5, 1 / 3, h_before=True, convention=conv)
        table = truth_table(compile_netlist(net, convention=conv))
        assert np.allclose(table.probs, ideal_truth_table(CNOT @ H_CONTROL).probs, atol=1e-12)


class TestFidelity:
    def test_identical(self):
        assert classical_fidelity([0.25] * 4, [0.25] * 4) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert classical_fidelity([1, 0], [0, 1]) == 0.0

    def test_half_overlap(self):
        assert classical_fidelity([1, 0], [0.5, 0.5]) == pytest.approx(0.5)

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            classical_fidelity([0.5, 0.4], [0.5, 0.5])

    @given(st.lists(st.floats(0.0, 1.0), min_size=4, max_size=4).filter(lambda x: sum(x) > 1e-3),
           st.lists(st.floats(0.0, 1.0), min_size=4, max_size=4).filter(lambda x: sum(x) > 1e-3))
    def test_bounds_and_symmetry(self, a, b):
        p = np.array(a) / sum(a)
        q = np.array(b) / sum(b)
        f = classical_fidelity(p, q)
        assert 0.0 <= f <= 1.0
        assert f == pytest.approx(classical_fidelity(q, p), abs=1e-12)
        assert classical_fidelity(p, p) == pytest.approx(1.0, abs=1e-12)

    def test_one_wrong_row(self):
        bad = CNOT_TABLE.copy()
        bad[2] = [0, 0, 1, 0]
        measured = TruthTable(bad, np.ones(4))
        assert logical_basis_fidelity(measured, ideal_truth_table(CNOT)) == pytest.approx(0.75)

    def test_ideal_is_one(self):
        assert logical_basis_fidelity(simulate_truth_table(0.5), ideal_truth_table(CNOT)) == pytest.approx(1.0)

    def test_curve_peaks_below_half_with_positive_offset(self):
        etas = np.round(np.arange(0.40, 0.601, 0.005), 4)
        curve = fidelity_vs_eta(etas, delta_eta=0.034, epsilon=0.0)
        peak = max(curve, key=lambda p: p[1])[0]
        assert peak < 0.5
        f = dict(curve)
        assert f[0.6] < f[0.5]

    def test_no_offset_peaks_at_design(self):
        curve = fidelity_vs_eta([0.45, 0.5, 0.55])
        assert curve[1][1] == pytest.approx(1.0)
        assert curve[0][1] < 1 and curve[2][1] < 1

    def test_mismatch_lowers_fidelity(self):
        f = [fidelity_vs_eta([0.5], 0.034, eps)[0][1] for eps in (0.0, 0.02, 0.052)]
        assert f[0] > f[1] > f[2]


class TestEquivalence:
    def test_compiled_cnot(self):
        ok, dist = logical_equivalence(compile_netlist(cnot_netlist()), CNOT_ENCODING, CNOT)
        assert ok and dist < 1e-8

    def test_real_convention(self):
        u = compile_netlist(cnot_netlist(convention=REAL), convention=REAL)
        assert logical_equivalence(u, CNOT_ENCODING, CNOT)[0]

    def test_identity_is_not_cnot(self):
        ok, dist = logical_equivalence(ModeUnitary(np.eye(6)), CNOT_ENCODING, CNOT)
        assert not ok and dist > 0.1

    def test_local_phases_are_tolerated(self):
        phases = np.diag(np.exp(1j * np.array([0.0, 0.3, -1.1, 0.7, 2.0, 0.0])))
        u = ModeUnitary(phases @ compile_netlist(cnot_netlist()).matrix @ phases.conj())
        assert logical_equivalence(u, CNOT_ENCODING, CNOT)[0]

    def test_distance_grows_with_offset(self):
        dists = [logical_equivalence(compile_netlist(cnot_netlist(), ImperfectionSpec(d)), CNOT_ENCODING, CNOT)[1]
                 for d in (0.0, 0.01, 0.034)]
        assert dists[0] < 1e-8 < dists[1] < dists[2]


class TestBell:
    def test_outputs(self):
        states = bell_state_outputs()
        expected = ["phi+", "psi+", "phi-", "psi-"]
        for state, name in zip(states, expected):
            assert state.success_prob == pytest.approx(1 / 9)
            assert global_phase_distance(state.amplitudes, BELL_STATES[name]) < 1e-8

    def test_outputs_are_orthogonal(self):
        amps = np.array([s.amplitudes for s in bell_state_outputs()])
        assert np.allclose(np.abs(amps @ amps.conj().T), np.eye(4), atol=1e-12)

    def test_global_phase_distance(self):
        v = BELL_STATES["psi-"]
        assert global_phase_distance(1j * v, v) < 1e-15
        assert global_phase_distance(BELL_STATES["psi+"], v) == pytest.approx(1.0)


class TestWorkedExamples:
    def test_postselect_cnot_flip(self):
        u = compile_netlist(cnot_netlist())
        s = postselect_logical(u, CNOT_ENCODING, 2)
        assert global_phase_distance(s.amplitudes, [0, 0, 0, 1]) < 1e-14
        assert s.success_prob == pytest.approx(1 / 9)
        s0 = postselect_logical(u, CNOT_ENCODING, 0)
        assert global_phase_distance(s0.amplitudes, [1, 0, 0, 0]) < 1e-14

    def test_postselect_identity(self):
        s = postselect_logical(ModeUnitary(np.eye(6)), CNOT_ENCODING, 1)
        assert np.allclose(s.amplitudes, [0, 1, 0, 0]) and s.success_prob == pytest.approx(1.0)

    def test_uniform_vs_deterministic(self):
        assert classical_fidelity([0.25] * 4, [1, 0, 0, 0]) == pytest.approx(0.25)

    def test_both_hadamards_equal_superposition(self):
        net = cnot_with_hadamards(h_before=True, h_after=True)
        s = postselect_logical(compile_netlist(net), CNOT_ENCODING, 0)
        assert np.allclose(np.abs(s.amplitudes), 0.5, atol=1e-12)

    def test_singular_map_is_inequivalent(self):
        perm = np.eye(6)[[C0, V_A, C1, T0, T1, 5]]
        assert logical_equivalence(ModeUnitary(perm), CNOT_ENCODING, CNOT) == (False, 1.0)
