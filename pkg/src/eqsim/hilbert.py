"""Dense state vectors and density matrices.

Basis index ``b`` encodes qubit 0 as its most significant bit, so
``|q0 q1 ... q_{n-1}>`` has index ``int("q0q1...", 2)``.
"""
from __future__ import annotations

import csv
import math
from typing import Union

import numpy as np

from . import kernels
from .pauli import DimensionError, PauliString, PauliSum

MAX_STATEVECTOR_QUBITS = 20
MAX_DENSITY_QUBITS = 10
NORM_TOL = 1e-10

#: identifier of the bit generator behind every seeded draw
RNG_ALGORITHM = "numpy.PCG64"


class CapacityError(RuntimeError):
    """Requested register exceeds the dense-simulation limits."""


def make_rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _n_from_dim(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 2 or 1 << n != dim:
        raise DimensionError(f"dimension {dim} is not a power of two >= 2")
    return n


class StateVector:
    """Normalized pure state on ``n_qubits`` qubits."""

    __slots__ = ("data", "n_qubits")

    def __init__(self, amplitudes, *, check: bool = True):
        data = np.array(amplitudes, dtype=np.complex128).reshape(-1)
        n = _n_from_dim(data.shape[0])
        if n > MAX_STATEVECTOR_QUBITS:
            raise CapacityError(f"{n} qubits exceeds the state-vector limit of {MAX_STATEVECTOR_QUBITS}")
        if check:
            norm = np.linalg.norm(data)
            if abs(norm - 1) > NORM_TOL:
                raise ValueError(f"state vector norm {norm} != 1")
        self.data = data
        self.n_qubits = n

    @classmethod
    def basis(cls, bits: str) -> "StateVector":
        """Computational basis state from a bit string such as ``"010"``."""
        data = np.zeros(2 ** len(bits), dtype=np.complex128)
        data[int(bits, 2)] = 1
        return cls(data)

    @classmethod
    def random(cls, n_qubits: int, rng: np.random.Generator) -> "StateVector":
        v = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
        return cls(v / np.linalg.norm(v))

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def copy(self) -> "StateVector":
        return StateVector(self.data.copy(), check=False)

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.data, self.data.conj()))

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))

    def dump_csv(self, path) -> None:
        """Write ``(index, real, imag)`` rows for debugging."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "real", "imag"])
            for i, a in enumerate(self.data):
                w.writerow([i, repr(a.real), repr(a.imag)])


class DensityMatrix:
    """Mixed state: Hermitian, unit trace, positive semidefinite."""

    __slots__ = ("data", "n_qubits")

    def __init__(self, entries, *, check: bool = True):
        data = np.array(entries, dtype=np.complex128)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise DimensionError(f"density matrix must be square, got shape {data.shape}")
        n = _n_from_dim(data.shape[0])
        if n > MAX_DENSITY_QUBITS:
            raise CapacityError(f"{n} qubits exceeds the density-matrix limit of {MAX_DENSITY_QUBITS}")
        data = np.ascontiguousarray(data)
        if check:
            self._validate(data)
        self.data = data
        self.n_qubits = n

    @staticmethod
    def _validate(data):
        if np.abs(data - data.conj().T).max() > NORM_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(data) - 1) > NORM_TOL:
            raise ValueError(f"density matrix trace {np.trace(data)} != 1")
        if np.linalg.eigvalsh(data).min() < -1e-8:
            raise ValueError("density matrix has a negative eigenvalue")

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> "DensityMatrix":
        d = 2**n_qubits
        return cls(np.eye(d, dtype=np.complex128) / d)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def copy(self) -> "DensityMatrix":
        return DensityMatrix(self.data.copy(), check=False)

    def validate(self) -> None:
        self._validate(self.data)

    def purity(self) -> float:
        return float(np.real(np.vdot(self.data, self.data)))


State = Union[StateVector, DensityMatrix]


def _check_pauli(state: State, p: PauliString) -> None:
    if p.n_qubits != state.n_qubits:
        raise DimensionError(f"operator on {p.n_qubits} qubits, state on {state.n_qubits}")


def apply_pauli_exponential(state: State, p: PauliString, angle: float, *, inplace: bool = False) -> State:
    """Apply ``exp(-i*angle*P)``; density matrices are conjugated on both sides.

    The phase of ``p`` is folded into the angle, so ``-Z`` with angle ``a``
    is the same as ``Z`` with angle ``-a``. Only real phases are allowed
    (``P`` must be Hermitian).
    """
    _check_pauli(state, p)
    if p.phase.imag != 0:
        raise ValueError("exponent string must be Hermitian (phase ±1)")
    angle = float(angle) * p.phase.real
    out = state if inplace else state.copy()
    x, z = p.masks()
    if isinstance(out, StateVector):
        kernels.rotate_vec(out.data, x, z, p.y_count, angle)
    else:
        kernels.rotate_dm(out.data, x, z, p.y_count, angle)
    return out


def apply_pauli(state: StateVector, p: PauliString) -> np.ndarray:
    """Return ``P|psi>`` as a raw vector (phase of ``p`` included)."""
    _check_pauli(state, p)
    x, z = p.masks()
    return p.phase * kernels.apply_pauli(state.data, x, z, p.y_count)


def apply_pauli_sum(vector: np.ndarray, h: PauliSum) -> np.ndarray:
    """Return ``H @ vector`` for a raw (possibly unnormalized) vector."""
    vector = np.ascontiguousarray(vector, dtype=np.complex128)
    if vector.shape[0] != 2**h.n_qubits:
        raise DimensionError("vector and operator dimensions differ")
    out = np.zeros_like(vector)
    for c, p in h.terms:
        x, z = p.masks()
        out += c * kernels.apply_pauli(vector, x, z, p.y_count)
    return out


def pauli_expectation(state: State, p: PauliString) -> complex:
    """``<P>`` without the Hermiticity check (may be complex for non-Hermitian ``p``)."""
    _check_pauli(state, p)
    x, z = p.masks()
    if isinstance(state, StateVector):
        val = kernels.expect_vec(state.data, x, z, p.y_count)
    else:
        val = kernels.expect_dm(state.data, x, z, p.y_count)
    return p.phase * val


def expectation(state: State, obs: PauliSum | PauliString) -> float:
    """Real expectation value of a Hermitian observable."""
    if isinstance(obs, PauliString):
        obs = PauliSum.from_string(obs)
    if obs.n_qubits != state.n_qubits:
        raise DimensionError(f"observable on {obs.n_qubits} qubits, state on {state.n_qubits}")
    obs.require_hermitian()
    total = sum((c * pauli_expectation(state, p) for c, p in obs.terms), 0j)
    if abs(total.imag) > 1e-10:
        raise ArithmeticError(f"expectation has imaginary residue {total.imag}")
    return float(total.real)


def evolve_exact(state: StateVector, h: PauliSum, t: float) -> StateVector:
    """``exp(-i H t)|psi>`` by Hermitian eigendecomposition of the dense ``H``."""
    if h.n_qubits != state.n_qubits:
        raise DimensionError("Hamiltonian and state dimensions differ")
    h.require_hermitian()
    evals, evecs = np.linalg.eigh(h.to_matrix())
    coeffs = evecs.conj().T @ state.data
    return StateVector(evecs @ (np.exp(-1j * evals * t) * coeffs))


def sample_observable(state: State, obs: PauliString, shots: int, seed) -> tuple[float, float]:
    """Mean and standard error of ``shots`` independent ±1 outcomes of ``obs``.

    Each shot is a fresh preparation, so outcomes are Bernoulli draws with
    ``p(+1) = (1 + <P>)/2``; no state collapse is simulated.
    """
    if shots <= 0:
        raise ValueError("shots must be a positive integer")
    if obs.phase.imag != 0:
        raise ValueError("sampled observable must be Hermitian (phase ±1)")
    exact = pauli_expectation(state, obs).real
    p_plus = min(1.0, max(0.0, (1.0 + exact) / 2.0))
    plus = int(make_rng(seed).binomial(shots, p_plus))
    mean = (2 * plus - shots) / shots
    if shots == 1:
        return mean, 0.0
    # sample variance of ±1 outcomes with ddof=1
    var = (shots - mean * mean * shots) / (shots - 1)
    return mean, math.sqrt(max(var, 0.0) / shots)
