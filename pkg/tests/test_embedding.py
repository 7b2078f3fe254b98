import numpy as np
import pytest

from eqsim.embedding import (
    EmbeddingMap,
    antilinear_expectation,
    conjugation_gate,
    direct_antilinear,
    embed_state,
    project,
)
from eqsim.hilbert import StateVector, evolve_exact
from eqsim.pauli import DimensionError, embed_hamiltonian, parse_pauli_sum
from eqsim.verify import random_pauli_sum


def test_single_qubit_layout():
    psi = StateVector(np.array([0.6, 0.8j]))
    big = embed_state(psi)
    np.testing.assert_allclose(big.data, [0.6, 0, 0, 0.8])
    np.testing.assert_allclose(project(big), psi.data)


def test_projector_matches_project():
    rng = np.random.default_rng(0)
    psi = StateVector.random(2, rng)
    big = embed_state(psi)
    m = EmbeddingMap(2).projector()
    assert m.shape == (4, 8)
    np.testing.assert_allclose(m @ big.data, project(big))


def test_conjugation_gate():
    psi = StateVector.random(2, np.random.default_rng(1))
    np.testing.assert_allclose(project(conjugation_gate(embed_state(psi))), psi.data.conj())


@pytest.mark.parametrize("n", [1, 2, 3])
def test_dynamics_commute_with_projection(n):
    rng = np.random.default_rng(10 + n)
    for _ in range(10):
        h = random_pauli_sum(n, rng)
        psi = StateVector.random(n, rng)
        big = evolve_exact(embed_state(psi), embed_hamiltonian(h), 0.9)
        assert np.abs(big.data.imag).max() < 1e-12
        np.testing.assert_allclose(project(big), evolve_exact(psi, h, 0.9).data, atol=1e-10)


def test_bell_antilinear():
    bell = StateVector(np.array([1, 0, 0, 1]) / np.sqrt(2))
    yy = parse_pauli_sum("1.0 * Y_Y")
    assert abs(direct_antilinear(bell, yy)) == pytest.approx(1.0)
    assert abs(antilinear_expectation(embed_state(bell), yy)) == pytest.approx(1.0)


def test_antilinear_identity_random():
    rng = np.random.default_rng(3)
    for _ in range(200):
        n = int(rng.integers(1, 4))
        psi = StateVector.random(n, rng)
        theta = random_pauli_sum(n, rng, coeffs="sign")
        assert abs(direct_antilinear(psi, theta) - antilinear_expectation(embed_state(psi), theta)) <= 1e-12


def test_antilinear_dimension_check():
    with pytest.raises(DimensionError):
        antilinear_expectation(StateVector.basis("00"), parse_pauli_sum("1.0 * Y_Y"))
