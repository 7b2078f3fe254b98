import numpy as np
import pytest
import scipy.linalg

from eqsim.hilbert import (
    MAX_DENSITY_QUBITS,
    MAX_STATEVECTOR_QUBITS,
    CapacityError,
    DensityMatrix,
    StateVector,
    apply_pauli_exponential,
    evolve_exact,
    expectation,
    pauli_expectation,
    sample_observable,
)
from eqsim.pauli import DimensionError, PauliString, parse_pauli_sum

Y = PauliString("Y")


def test_y_rotation_quarter_turn():
    out = apply_pauli_exponential(StateVector.basis("0"), Y, np.pi / 4)
    np.testing.assert_allclose(out.data, [1 / np.sqrt(2), 1 / np.sqrt(2)], atol=1e-15)


def test_xx_rotation_on_00():
    out = apply_pauli_exponential(StateVector.basis("00"), PauliString("XX"), np.pi / 4)
    expected = np.array([1, 0, 0, -1j]) / np.sqrt(2)
    np.testing.assert_allclose(out.data, expected, atol=1e-15)


def test_negative_phase_flips_angle():
    psi = StateVector.random(2, np.random.default_rng(0))
    a = apply_pauli_exponential(psi, PauliString("ZX", -1), 0.3)
    b = apply_pauli_exponential(psi, PauliString("ZX"), -0.3)
    np.testing.assert_allclose(a.data, b.data, atol=1e-15)
    with pytest.raises(ValueError):
        apply_pauli_exponential(psi, PauliString("ZX", 1j), 0.3)


def test_expectation_examples():
    plus = StateVector(np.array([1, 1]) / np.sqrt(2))
    assert expectation(plus, PauliString("X")) == pytest.approx(1.0, abs=1e-15)
    assert expectation(plus, PauliString("Z")) == pytest.approx(0.0, abs=1e-15)


def test_unitarity_long_run():
    rng = np.random.default_rng(1)
    psi = StateVector.random(4, rng)
    for _ in range(10_000):
        word = "".join(rng.choice(list("IXYZ"), size=4))
        apply_pauli_exponential(psi, PauliString(word), float(rng.uniform(-np.pi, np.pi)), inplace=True)
    assert abs(psi.norm() - 1) <= 1e-12


def test_composition_and_inverse():
    rng = np.random.default_rng(2)
    psi = StateVector.random(3, rng)
    p = PauliString("XYZ")
    a = apply_pauli_exponential(apply_pauli_exponential(psi, p, 0.2), p, 0.5)
    b = apply_pauli_exponential(psi, p, 0.7)
    np.testing.assert_allclose(a.data, b.data, atol=1e-14)
    back = apply_pauli_exponential(b, p, -0.7)
    np.testing.assert_allclose(back.data, psi.data, atol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_oracle_agreement(n):
    rng = np.random.default_rng(n)
    for _ in range(30):
        word = "".join(rng.choice(list("IXYZ"), size=n))
        p = PauliString(word)
        ang = float(rng.uniform(-3, 3))
        u = scipy.linalg.expm(-1j * ang * p.to_matrix())
        psi = StateVector.random(n, rng)
        np.testing.assert_allclose(apply_pauli_exponential(psi, p, ang).data, u @ psi.data, atol=1e-13)
        rho = psi.to_density()
        out = apply_pauli_exponential(rho, p, ang)
        np.testing.assert_allclose(out.data, u @ rho.data @ u.conj().T, atol=1e-13)
        assert abs(pauli_expectation(psi, p) - np.vdot(psi.data, p.to_matrix() @ psi.data)) < 1e-14


def test_evolve_exact_matches_expm():
    h = parse_pauli_sum("1.0 * X_I + 0.5 * Z_Z + -0.3 * I_Y")
    psi = StateVector.basis("01")
    want = scipy.linalg.expm(-1j * 1.3 * h.to_matrix()) @ psi.data
    np.testing.assert_allclose(evolve_exact(psi, h, 1.3).data, want, atol=1e-13)


def test_sampling_reproducible():
    psi = StateVector.random(2, np.random.default_rng(4))
    obs = PauliString("XZ")
    assert sample_observable(psi, obs, 1000, 42) == sample_observable(psi, obs, 1000, 42)


def test_sampling_within_four_sigma():
    psi = StateVector.random(3, np.random.default_rng(5))
    obs = PauliString("ZYX")
    exact = pauli_expectation(psi, obs).real
    for seed in range(100):
        mean, err = sample_observable(psi, obs, 10_000, seed)
        assert abs(mean - exact) <= 4 * err


def test_sampling_errors():
    psi = StateVector.basis("0")
    with pytest.raises(ValueError):
        sample_observable(psi, PauliString("Z"), 0, 1)


def test_density_validation():
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([0.7, 0.7]))
    with pytest.raises(ValueError):
        DensityMatrix(np.array([[1.0, 0.1], [0.0, 0.0]]))
    rho = DensityMatrix.maximally_mixed(2)
    assert rho.purity() == pytest.approx(0.25)


def test_state_validation():
    with pytest.raises(ValueError):
        StateVector(np.array([1.0, 1.0]))
    with pytest.raises(DimensionError):
        pauli_expectation(StateVector.basis("0"), PauliString("XX"))


def test_capacity_limits():
    with pytest.raises(CapacityError):
        StateVector.basis("0" * (MAX_STATEVECTOR_QUBITS + 1))
    with pytest.raises(CapacityError):
        DensityMatrix.maximally_mixed(MAX_DENSITY_QUBITS + 1)
