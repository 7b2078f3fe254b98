"""Real embedding of an N-qubit state into N+1 qubits.

The ancilla is qubit 0. Its ``|0>`` block carries ``Re(psi)`` and its
``|1>`` block ``Im(psi)``, so for one qubit ``(a, b) -> (a_r, b_r, a_i, b_i)``.
Under the enlarged Hamiltonian from :func:`eqsim.pauli.embed_hamiltonian`
the embedded state stays real and ``M = (1, i) ⊗ I`` recovers ``psi(t)``.
Complex conjugation of ``psi`` becomes the physical gate ``Z`` on the ancilla.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hilbert import StateVector, apply_pauli_sum
from .pauli import DimensionError, PauliString, PauliSum


@dataclass(frozen=True)
class EmbeddingMap:
    simulated_qubits: int
    ancilla_index: int = 0

    @property
    def enlarged_qubits(self) -> int:
        return self.simulated_qubits + 1

    def projector(self) -> np.ndarray:
        """Dense ``M = (1, i) ⊗ I_{2^N}``."""
        return np.kron(np.array([[1, 1j]]), np.eye(2**self.simulated_qubits))


def embed_state(psi: StateVector) -> StateVector:
    return StateVector(np.concatenate([psi.data.real, psi.data.imag]).astype(np.complex128))


def project(big: StateVector | np.ndarray) -> np.ndarray:
    """Return ``M Psi``. Not renormalized."""
    data = big.data if isinstance(big, StateVector) else np.asarray(big)
    if data.shape[0] % 2:
        raise DimensionError("enlarged state must have even dimension")
    half = data.shape[0] // 2
    return data[:half] + 1j * data[half:]


def conjugation_gate(big: StateVector) -> StateVector:
    """``Z`` on the ancilla: maps the embedded ``psi`` to the embedded ``psi*``."""
    half = big.dim // 2
    data = big.data.copy()
    data[half:] *= -1
    return StateVector(data, check=False)


def antilinear_expectation(big: StateVector, theta: PauliSum) -> complex:
    """``<psi|Theta|psi*>`` read off the enlarged state as ``<(Z - iX) ⊗ Theta>``.

    Exact only for real enlarged states (the image of :func:`embed_state`
    under the enlarged dynamics); that is the caller's responsibility.
    """
    if theta.n_qubits + 1 != big.n_qubits:
        raise DimensionError("Theta must act on the simulated register")
    theta.require_hermitian()
    zt, xt = theta_images(theta)
    vec = big.data
    z_val = np.vdot(vec, apply_pauli_sum(vec, zt))
    x_val = np.vdot(vec, apply_pauli_sum(vec, xt))
    return complex(z_val.real - 1j * x_val.real)


def theta_images(theta: PauliSum) -> tuple[PauliSum, PauliSum]:
    """Enlarged-space observables ``Z ⊗ Theta`` and ``X ⊗ Theta``."""
    n = theta.n_qubits + 1
    z = PauliSum([(c, PauliString("Z" + p.axes)) for c, p in theta.terms], n)
    x = PauliSum([(c, PauliString("X" + p.axes)) for c, p in theta.terms], n)
    return z, x


def direct_antilinear(psi: StateVector | np.ndarray, theta: PauliSum) -> complex:
    """Reference ``<psi|Theta|psi*>`` by explicit conjugation."""
    vec = psi.data if isinstance(psi, StateVector) else np.asarray(psi, dtype=np.complex128)
    return complex(np.vdot(vec, apply_pauli_sum(vec.conj(), theta)))
