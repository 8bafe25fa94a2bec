"""Tests for Pauli strings, Hamiltonians and their spectra."""

import math

import numpy as np
import pytest

from nvqrao.encoding import assign_qubits, relaxed_hamiltonian
from nvqrao.graph import Graph
from nvqrao.pauli import (
    CapacityError,
    Hamiltonian,
    PauliAxis,
    PauliString,
    commutes,
    expectation,
    extremal_eigenvalues,
    format_hamiltonian,
    maxcut_hamiltonian,
    mixer_hamiltonian,
    parse_hamiltonian,
    to_dense,
)
from nvqrao.statevector import StateVector

SINGLET = np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2)


def k33_relaxed() -> Hamiltonian:
    g = Graph.complete_bipartite(3, 3)
    return relaxed_hamiltonian(g, assign_qubits(g, 3))


def random_hamiltonian(rng: np.random.Generator, n_qubits: int, n_terms: int) -> Hamiltonian:
    terms = []
    for _ in range(n_terms):
        support = sorted(rng.choice(n_qubits, size=int(rng.integers(1, 4)), replace=False))
        factors = tuple((int(q), "XYZ"[int(rng.integers(3))]) for q in support)
        terms.append((float(rng.normal()), PauliString(n_qubits, factors)))
    return Hamiltonian(n_qubits, tuple(terms))


def random_state(rng: np.random.Generator, n_qubits: int) -> StateVector:
    amps = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
    return StateVector(n_qubits, amps / np.linalg.norm(amps))


class TestPauliString:
    """Test Pauli strings."""

    def test_parse_and_format(self):
        """Factors are sorted by qubit and print as X0*Y1."""
        string = PauliString.parse("Y1*X0", 2)
        assert str(string) == "X0*Y1"
        assert string.support == (0, 1)

    def test_identity(self):
        """An empty string is the identity."""
        assert str(PauliString.parse("I", 3)) == "I"

    def test_masks(self):
        """Y sets both the X and Z mask bits."""
        string = PauliString.from_map(3, {0: "X", 1: "Y", 2: "Z"})
        assert string.x_mask == 0b011
        assert string.z_mask == 0b110
        assert string.n_y == 1
        assert not string.is_diagonal

    @pytest.mark.parametrize("text", ["X", "Q0", "X0*X0", "Z9"])
    def test_malformed(self, text):
        """Bad tokens, repeated qubits and out-of-range qubits are rejected."""
        with pytest.raises(ValueError):
            PauliString.parse(text, 2)

    def test_unknown_axis(self):
        """Unknown axis letters raise."""
        with pytest.raises(ValueError, match="Unknown Pauli axis"):
            PauliAxis.parse("W")

    @pytest.mark.parametrize("axis", list(PauliAxis))
    def test_parse_accepts_members(self, axis):
        """Enum members parse to themselves; letters parse case-insensitively."""
        assert PauliAxis.parse(axis) is axis
        assert PauliAxis.parse(axis.value.lower()) is axis

    def test_enum_factors(self):
        """Strings built from enum factors equal the parsed text."""
        string = PauliString(2, ((1, PauliAxis.Y), (0, PauliAxis.X)))
        assert string == PauliString.parse("X0*Y1", 2)
        assert string.as_dict() == {0: PauliAxis.X, 1: PauliAxis.Y}

    @pytest.mark.parametrize(
        "left, right, expected",
        [("Z0*Z1", "Z1*Z2", True), ("X0*X1", "X0*Y1", False), ("X0*Y1", "Z0*Z1", True)],
    )
    def test_commutes(self, left, right, expected):
        """Strings commute iff they clash on an even number of qubits."""
        assert commutes(PauliString.parse(left, 3), PauliString.parse(right, 3)) is expected

    def test_commutes_matches_matrices(self):
        """commutes agrees with the dense commutator on every 2-qubit pair."""
        labels = ["I"] + [f"{a}{q}" for a in "XYZ" for q in (0, 1)]
        labels += [f"{a}0*{b}1" for a in "XYZ" for b in "XYZ"]
        strings = [PauliString.parse(label, 2) for label in labels]
        for a in strings:
            for b in strings:
                ma = to_dense(Hamiltonian(2, ((1.0, a),)))
                mb = to_dense(Hamiltonian(2, ((1.0, b),)))
                assert commutes(a, b) == np.allclose(ma @ mb, mb @ ma)


class TestHamiltonian:
    """Test Hamiltonian construction and dense assembly."""

    def test_rejects_complex_coefficients(self):
        """Only real coefficients are allowed."""
        with pytest.raises(ValueError, match="Complex"):
            Hamiltonian(1, ((1j, PauliString.parse("Z0", 1)),))

    def test_rejects_non_finite(self):
        """NaN coefficients are rejected."""
        with pytest.raises(ValueError, match="Non-finite"):
            Hamiltonian(1, ((float("nan"), PauliString.parse("Z0", 1)),))

    def test_register_mismatch(self):
        """Terms must span the Hamiltonian's register."""
        with pytest.raises(ValueError, match="spans"):
            Hamiltonian(2, ((1.0, PauliString.parse("Z0", 1)),))

    def test_dense_single_z(self):
        """Z on one qubit is diag(1, -1)."""
        h = Hamiltonian(1, ((1.0, PauliString.parse("Z0", 1)),))
        assert np.allclose(to_dense(h), np.diag([1, -1]))

    def test_dense_matches_kron(self):
        """Dense assembly puts qubit 0 in the least significant position."""
        h = parse_hamiltonian("0.5 X0*Y1\n-2 Z1\n", 2)
        x = np.array([[0, 1], [1, 0]])
        y = np.array([[0, -1j], [1j, 0]])
        z = np.diag([1, -1])
        expected = 0.5 * np.kron(y, x) - 2 * np.kron(z, np.eye(2))
        assert np.allclose(to_dense(h), expected)

    def test_apply_matches_dense(self):
        """Matrix-free application equals the dense product."""
        h = k33_relaxed()
        rng = np.random.default_rng(5)
        v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        assert np.allclose(h.apply(v), to_dense(h) @ v)

    def test_dense_cap(self):
        """Dense matrices refuse registers above the cap."""
        h = mixer_hamiltonian(4, "X")
        with pytest.raises(CapacityError):
            to_dense(h, max_qubits=3)

    def test_maxcut_hamiltonian_diagonal(self):
        """H_C is diagonal and its diagonal holds the cut energies."""
        h = maxcut_hamiltonian(Graph.complete_bipartite(3, 3))
        assert h.is_diagonal
        diag = h.diagonal()
        assert diag.min() == -9 and diag.max() == 9
        assert not diag.flags.writeable

    def test_mixer_hamiltonian(self):
        """H_M holds one single-qubit term per qubit."""
        h = mixer_hamiltonian(3, "Y")
        assert [str(s) for _, s in h.terms] == ["Y0", "Y1", "Y2"]

    def test_reordered_and_scaled(self):
        """Reordering permutes terms; scaling multiplies coefficients."""
        h = parse_hamiltonian("1 Z0\n2 X1\n")
        assert [c for c, _ in h.reordered([1, 0]).terms] == [2.0, 1.0]
        assert [c for c, _ in h.scaled(-0.5).terms] == [-0.5, -1.0]


class TestSpectrum:
    """Test expectations and extremal eigenvalues."""

    def test_x_plus_y_plus_z(self):
        """X+Y+Z has eigenvalues +-sqrt(3)."""
        h = parse_hamiltonian("1 X0\n1 Y0\n1 Z0\n")
        e_min, e_max, _ = extremal_eigenvalues(h)
        assert e_min == pytest.approx(-math.sqrt(3))
        assert e_max == pytest.approx(math.sqrt(3))

    def test_k33_relaxed_spectrum(self):
        """The K33 relaxation has eigenvalues {-3, -3, 3, 3}."""
        h = k33_relaxed()
        assert len(h) == 9
        assert np.allclose(np.linalg.eigvalsh(to_dense(h)), [-3, -3, 3, 3])
        e_min, e_max, ground = extremal_eigenvalues(h)
        assert (e_min, e_max) == (pytest.approx(-3), pytest.approx(3))
        assert expectation(h, ground) == pytest.approx(-3)

    def test_single_edge(self):
        """Z0 Z1 spans -1..1 through the diagonal path."""
        e_min, e_max, ground = extremal_eigenvalues(maxcut_hamiltonian(Graph(2, ((0, 1),))))
        assert (e_min, e_max) == (-1.0, 1.0)
        assert ground.probabilities()[1] + ground.probabilities()[2] == pytest.approx(1.0)

    def test_empty_hamiltonian(self):
        """A Hamiltonian with no terms has no defined extrema."""
        with pytest.raises(ValueError, match="empty"):
            extremal_eigenvalues(Hamiltonian(2))

    def test_lanczos_path(self):
        """Thirteen qubits go through the matrix-free solver."""
        h = mixer_hamiltonian(13, "X")
        e_min, e_max, ground = extremal_eigenvalues(h)
        assert e_min == pytest.approx(-13, abs=1e-6)
        assert e_max == pytest.approx(13, abs=1e-6)
        assert expectation(h, ground) == pytest.approx(-13, abs=1e-6)

    def test_matrix_free_cap(self):
        """Non-diagonal registers above the matrix-free cap are refused."""
        with pytest.raises(CapacityError):
            extremal_eigenvalues(mixer_hamiltonian(15, "X"))

    def test_expectation_basis_state(self):
        """<0|Z|0> is 1."""
        h = parse_hamiltonian("1 Z0\n")
        psi = StateVector(1, np.array([1, 0], dtype=complex))
        assert expectation(h, psi) == 1.0

    def test_expectation_singlet(self):
        """The singlet reaches the K33 relaxation's minimum."""
        assert expectation(k33_relaxed(), StateVector(2, SINGLET)) == pytest.approx(-3.0)

    def test_expectation_matches_dense_on_random_hamiltonians(self):
        """expectation agrees with <psi|H|psi> from the dense matrix."""
        rng = np.random.default_rng(3)
        for _ in range(10):
            h = random_hamiltonian(rng, 4, 8)
            psi = random_state(rng, 4)
            dense = np.vdot(psi.amplitudes, to_dense(h) @ psi.amplitudes).real
            assert expectation(h, psi) == pytest.approx(dense, abs=1e-10)

    def test_random_states_lie_between_extrema(self):
        """Every state's energy lies within [lambda_min, lambda_max]."""
        rng = np.random.default_rng(5)
        for _ in range(5):
            h = random_hamiltonian(rng, 4, 6)
            e_min, e_max, _ = extremal_eigenvalues(h)
            for _ in range(10):
                value = expectation(h, random_state(rng, 4))
                assert e_min - 1e-9 <= value <= e_max + 1e-9

    def test_expectation_register_mismatch(self):
        """State and Hamiltonian registers must agree."""
        with pytest.raises(ValueError, match="qubits"):
            expectation(k33_relaxed(), StateVector(1, np.array([1, 0], dtype=complex)))


class TestTextFormat:
    """Test the Pauli-sum text format."""

    def test_round_trip(self):
        """format then parse returns the same Hamiltonian."""
        h = k33_relaxed().scaled(0.25)
        assert parse_hamiltonian(format_hamiltonian(h), h.n_qubits) == h

    def test_comments_and_register_size(self):
        """Comments are skipped and the register is inferred."""
        h = parse_hamiltonian("# header\n1.5 X0*Z3  # trailing\n\n")
        assert h.n_qubits == 4
        assert h.terms[0][0] == 1.5

    def test_bad_coefficient(self):
        """Non-numeric coefficients report their line."""
        with pytest.raises(ValueError, match="Line 2"):
            parse_hamiltonian("1 Z0\nabc Z1\n")
