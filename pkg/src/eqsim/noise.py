"""Gate-level noise, error mitigation and repetition-cost formulas.

Depolarizing noise is global: after each counted gate the whole register
is mixed toward ``I/2^n`` with weight ``1 - epsilon``. Crosstalk turns a
single-ion rotation on qubit ``j`` into
``exp(-i*theta/2 * sum_k Delta[k, j] * sigma_k)`` with
``Delta = delta_{kj} + delta0 * delta_{k, j±1}`` on the linear chain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .compiler import BASIS, LOCAL, CompilerOptions, GateOp, GateSequence, apply_gate
from .hilbert import DensityMatrix, State, StateVector, apply_pauli_exponential
from .pauli import PauliString

MAX_NOISY_QUBITS = 10


class UnmitigableError(OverflowError):
    """``epsilon**n`` underflowed; the measured signal carries no information."""


@dataclass(frozen=True)
class NoiseModel:
    epsilon: float = 1.0
    delta0: float = 0.0
    depolarizing_enabled: bool = True
    crosstalk_enabled: bool = False

    def __post_init__(self):
        if not (0.0 < self.epsilon <= 1.0):
            raise ValueError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        if not (0.0 <= self.delta0 <= 0.5):
            raise ValueError(f"delta0 must lie in [0, 0.5], got {self.delta0}")

    @property
    def depolarizes(self) -> bool:
        return self.depolarizing_enabled and self.epsilon < 1.0

    @property
    def has_crosstalk(self) -> bool:
        return self.crosstalk_enabled and self.delta0 > 0.0


def crosstalk_matrix(n_qubits: int, delta0: float) -> np.ndarray:
    """``Delta[k, j]``: weight on qubit ``k`` of a rotation addressed to ``j``."""
    delta = np.eye(n_qubits)
    idx = np.arange(n_qubits - 1)
    delta[idx, idx + 1] = delta0
    delta[idx + 1, idx] = delta0
    return delta


def crosstalk_rotation(state: State, qubit: int, axis: str, theta: float, model: NoiseModel, *, inplace=False) -> State:
    """Single-ion rotation ``exp(-i*theta/2*sigma_axis)`` with nearest-neighbour spill-over."""
    out = state if inplace else state.copy()
    n = out.n_qubits
    weights = crosstalk_matrix(n, model.delta0 if model.crosstalk_enabled else 0.0)[:, qubit]
    for k in np.flatnonzero(weights):
        p = PauliString.from_sites(n, {int(k): axis})
        apply_pauli_exponential(out, p, theta * weights[k] / 2, inplace=True)
    return out


def depolarize(rho: DensityMatrix, keep: float, *, inplace=False) -> DensityMatrix:
    """``rho -> keep*rho + (1 - keep)*I/d``."""
    out = rho if inplace else rho.copy()
    kernels.depolarize(out.data, float(keep))
    return out


def apply_noisy_gate(
    state: State, gate: GateOp, model: NoiseModel, options: CompilerOptions | None = None, *, inplace=False
) -> State:
    """Ideal (or crosstalk-distorted) gate followed by ``epsilon**cost`` depolarizing.

    A gate whose cost is ``c`` counted gates is depolarized ``c`` times; global
    depolarizing commutes with unitaries, so this is one mix with ``epsilon**c``.
    """
    options = options or CompilerOptions()
    out = state if inplace else state.copy()
    if model.depolarizes and not isinstance(out, DensityMatrix):
        raise TypeError("depolarizing noise needs a DensityMatrix state")
    if model.has_crosstalk and gate.kind in (LOCAL, BASIS):
        crosstalk_rotation(out, gate.qubits[0], gate.axis, gate.angle, model, inplace=True)
    else:
        apply_gate(out, gate, inplace=True)
    if model.depolarizes:
        cost = gate.cost(options)
        if cost:
            kernels.depolarize(out.data, model.epsilon**cost)
    return out


def run_sequence(state: State, seq: GateSequence, noise: NoiseModel | None = None) -> State:
    """Apply ``seq`` to a copy of ``state``, through ``noise`` when given.

    State vectors are promoted to density matrices when depolarizing is on.
    """
    out = state.copy()
    if noise is None or not (noise.depolarizes or noise.has_crosstalk):
        for op in seq.ops:
            apply_gate(out, op, inplace=True)
        return out
    if noise.depolarizes and isinstance(out, StateVector):
        if out.n_qubits > MAX_NOISY_QUBITS:
            from .hilbert import CapacityError

            raise CapacityError(f"noisy simulation is limited to {MAX_NOISY_QUBITS} qubits")
        out = out.to_density()
    for op in seq.ops:
        apply_noisy_gate(out, op, noise, seq.options, inplace=True)
    return out


def mitigate(measured: float, epsilon: float, n: int, trace_obs: float = 0.0) -> float:
    """Invert ``n`` global depolarizing steps.

    ``trace_obs`` is the observable's expectation in the maximally mixed
    state, ``Tr(O)/2^N``; it is zero for every non-identity Pauli string.
    """
    if not (0.0 < epsilon <= 1.0):
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")
    if n < 0:
        raise ValueError("gate count must be non-negative")
    scale = epsilon**n
    if scale < 1e-300:
        raise UnmitigableError(f"epsilon**n = {scale:.3g} underflows")
    return measured / scale - (1.0 - scale) / scale * trace_obs


def repetitions_embedding(k: float, epsilon: float, n: int) -> float:
    """Shots needed for standard error ``k`` after ``n`` gates of fidelity ``epsilon``."""
    _check_cost(k, epsilon)
    return (1.0 / (k * epsilon**n)) ** 2


def repetitions_tomography(k: float, delta: float, n: int, n_qubits: int) -> float:
    """Shots a one-to-one simulator needs with ``3**n_qubits`` tomography settings."""
    _check_cost(k, delta)
    return 3.0**n_qubits * (1.0 / (k * delta**n)) ** 2


@dataclass(frozen=True)
class CostInputs:
    k: float
    n: int
    epsilon: float
    delta: float
    n_qubits: int
    l: int = 1

    def __post_init__(self):
        _check_cost(self.k, self.epsilon)
        _check_cost(self.k, self.delta)
        if self.l < 1:
            raise ValueError("l must be at least 1")


def cost_ratio(inputs: CostInputs) -> float:
    """``l * (delta / (sqrt(3)*epsilon))**(2*N)``, valid when the gate count grows as ``n ~ N``."""
    base = inputs.delta / (math.sqrt(3.0) * inputs.epsilon)
    return inputs.l * base ** (2 * inputs.n_qubits)


def tomography_observable_count(n_qubits: int) -> int:
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    return 4**n_qubits - 1


def _check_cost(k, fidelity):
    if k <= 0:
        raise ValueError("target uncertainty k must be positive")
    if not (0.0 < fidelity <= 1.0):
        raise ValueError(f"fidelity must lie in (0, 1], got {fidelity}")
