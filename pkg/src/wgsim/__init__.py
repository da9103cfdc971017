"""Simulation of integrated directional-coupler quantum circuits."""

__version__ = "0.1.0"

from .circuit import (CircuitNetlist, CouplerSpec, ImperfectionSpec, PhaseShifterSpec, cnot_netlist,
                      cnot_with_hadamards, compile_netlist, coupler_unitary, parse_netlist, serialize_netlist)
from .detection import DetectorSpec, ExperimentConfig, LossSpec, estimate_visibility, sample_counts
from .errors import ParseError, WgsimError
from .fock import AmplitudeVector, FockState, ModeUnitary, enumerate_fock_basis, evolve, permanent, \
    transition_amplitude
from .gates import (CNOT, DualRailEncoding, TruthTable, classical_fidelity, fidelity_vs_eta,
                    logical_basis_fidelity, logical_equivalence, postselect_logical, truth_table)
from .interference import (DistinguishabilitySpec, SourceSpec, coincidence_probability, hom_scan,
                           visibility, visibility_curve)
from .noon import (NoonCountRecord, TwoPhotonDensityMatrix, estimate_density_matrix, fidelity_to_noon,
                   noon_state)
