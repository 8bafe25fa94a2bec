"""
nvqrao: non-variational Quantum Random Access Optimization.

Encodes MaxCut instances into relaxed Pauli Hamiltonians with quantum random
access codes, prepares alternating-operator states over them with exact or
Trotterized cost layers, and decodes cuts by Pauli rounding.
"""

from .encoding import QracEncoding, assign_qubits, qrac_product_state, relaxed_hamiltonian
from .evolution import EvolutionMethod, evolve, evolve_exact, evolve_grouped_trotter, evolve_trotter
from .graph import (
    ClassicalExtrema,
    CutAssignment,
    Graph,
    brute_force_extrema,
    generate_random_regular,
)
from .optimize import FixedParameterTable, build_fixed_parameters, optimize_params
from .pauli import Hamiltonian, PauliString, expectation, extremal_eigenvalues, maxcut_hamiltonian
from .qaoa import AnsatzMode, AnsatzSpec, AnsatzTemplate, ParameterSchedule, energy, run_ansatz
from .rounding import alpha_c, alpha_r, entropy_trajectory, pauli_round_exact, pauli_round_sampled
from .statevector import StateVector, apply_mixer, apply_pauli_rotation, partial_trace_entropy

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "CutAssignment",
    "ClassicalExtrema",
    "generate_random_regular",
    "brute_force_extrema",
    "PauliString",
    "Hamiltonian",
    "maxcut_hamiltonian",
    "expectation",
    "extremal_eigenvalues",
    "QracEncoding",
    "assign_qubits",
    "relaxed_hamiltonian",
    "qrac_product_state",
    "StateVector",
    "apply_pauli_rotation",
    "apply_mixer",
    "partial_trace_entropy",
    "EvolutionMethod",
    "evolve",
    "evolve_exact",
    "evolve_trotter",
    "evolve_grouped_trotter",
    "AnsatzMode",
    "AnsatzSpec",
    "AnsatzTemplate",
    "ParameterSchedule",
    "run_ansatz",
    "energy",
    "optimize_params",
    "FixedParameterTable",
    "build_fixed_parameters",
    "pauli_round_exact",
    "pauli_round_sampled",
    "alpha_r",
    "alpha_c",
    "entropy_trajectory",
]
