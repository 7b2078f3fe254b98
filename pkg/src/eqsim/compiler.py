"""Trotterization, Mølmer–Sørensen compilation and the measurement planner.

Every Pauli-string exponential ``exp(-i*a*P)`` on two or more qubits is
compiled to::

    basis changes -> MS(+pi/2) -> central rotation -> MS(-pi/2) -> undo basis changes

with ``MS(theta, phi) = exp(-i*theta/4 * S**2)`` and
``S = sum_j cos(phi) X_j + sin(phi) Y_j`` over the gate mask. Ops are stored
in time order.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .hilbert import State, apply_pauli_exponential
from .pauli import DimensionError, PauliString, PauliSum, commutes

MS = "MS"
LOCAL = "LocalRotation"
BASIS = "BasisChange"

PROTOCOL_ANGLE = math.pi / 4

# MS(pi/2)^dag R_c(alpha) MS(pi/2) = exp(-i*(alpha/2)*sign * Z_c X...X), keyed on mask size mod 4.
# Verified against dense matrix exponentials in tests/test_compiler.py.
CENTRAL_ROTATION = {0: ("y", 1), 1: ("z", 1), 2: ("y", -1), 3: ("z", -1)}

# rotation (axis, angle) whose conjugation maps axis `src` onto `dst`
_BASIS_ROTATION = {
    ("x", "y"): ("z", math.pi / 2),
    ("y", "x"): ("z", -math.pi / 2),
    ("z", "x"): ("y", math.pi / 2),
    ("x", "z"): ("y", -math.pi / 2),
    ("y", "z"): ("x", math.pi / 2),
    ("z", "y"): ("x", -math.pi / 2),
}

DECOUPLING_MODES = ("shelve", "refocus")


class PlanningError(RuntimeError):
    """The planner could not reproduce its target (internal error)."""


@dataclass(frozen=True)
class CompilerOptions:
    count_basis_changes: bool = True
    decoupling: str = "shelve"

    def __post_init__(self):
        if self.decoupling not in DECOUPLING_MODES:
            raise ValueError(f"decoupling must be one of {DECOUPLING_MODES}")


@dataclass(frozen=True)
class GateOp:
    """One trapped-ion instruction.

    ``axis`` is ``"x"``/``"y"``/``"z"`` for rotations and the MS phase (radians)
    for MS gates. ``basis`` holds ``(src, dst)`` for basis changes;
    ``decoupling`` marks MS gates acting on a strict subset of the register.
    """

    kind: str
    qubits: tuple[int, ...]
    axis: str | float
    angle: float
    basis: tuple[str, str] | None = None
    decoupling: str | None = None

    def __post_init__(self):
        if self.kind == MS:
            if len(self.qubits) < 2:
                raise ValueError("MS gate needs at least two qubits")
        elif self.kind in (LOCAL, BASIS):
            if len(self.qubits) != 1:
                raise ValueError(f"{self.kind} acts on exactly one qubit")
            if self.axis not in ("x", "y", "z"):
                raise ValueError(f"invalid rotation axis {self.axis!r}")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if not (-2 * math.pi < self.angle <= 2 * math.pi):
            raise ValueError(f"angle {self.angle} outside (-2pi, 2pi]")

    def cost(self, options: CompilerOptions) -> int:
        """Number of physical gates this op contributes to the gate count."""
        if self.kind == MS:
            return {None: 1, "refocus": 2, "shelve": 3}[self.decoupling]
        if self.kind == BASIS:
            return 1 if options.count_basis_changes else 0
        return 1


def wrap_rotation_angle(alpha: float) -> float:
    """Map ``alpha`` into ``(-2pi, 2pi]``; exact for ``exp(-i*alpha*sigma/2)``."""
    alpha = math.fmod(alpha, 4 * math.pi)
    if alpha > 2 * math.pi:
        alpha -= 4 * math.pi
    elif alpha <= -2 * math.pi:
        alpha += 4 * math.pi
    return alpha


def rotation(qubit: int, axis: str, angle: float) -> GateOp:
    """``exp(-i*angle*sigma_axis/2)`` on one qubit."""
    return GateOp(LOCAL, (qubit,), axis, wrap_rotation_angle(angle))


def basis_change(qubit: int, src: str, dst: str) -> GateOp:
    axis, angle = _BASIS_ROTATION[src, dst]
    return GateOp(BASIS, (qubit,), axis, angle, basis=(src, dst))


def ms_gate(qubits: Iterable[int], angle: float, phase: float = 0.0, decoupling: str | None = None) -> GateOp:
    return GateOp(MS, tuple(sorted(qubits)), float(phase), angle, decoupling=decoupling)


@dataclass(frozen=True)
class GateSequence:
    ops: tuple[GateOp, ...]
    n_qubits: int
    options: CompilerOptions = field(default_factory=CompilerOptions)

    @property
    def gate_count(self) -> int:
        return sum(op.cost(self.options) for op in self.ops)

    def __len__(self) -> int:
        return len(self.ops)

    def __add__(self, other: "GateSequence") -> "GateSequence":
        if other.n_qubits != self.n_qubits:
            raise DimensionError("cannot concatenate sequences on different registers")
        return GateSequence(self.ops + other.ops, self.n_qubits, self.options)

    def counts(self) -> dict[str, int]:
        out = {MS: 0, LOCAL: 0, BASIS: 0}
        for op in self.ops:
            out[op.kind] += 1
        return out

    def dump(self) -> str:
        return "\n".join(format_gate(op) for op in self.ops)


def empty_sequence(n_qubits: int, options: CompilerOptions | None = None) -> GateSequence:
    return GateSequence((), n_qubits, options or CompilerOptions())


# ---------------------------------------------------------------------------
# gate application

def _single(n: int, q: int, axis: str) -> PauliString:
    return PauliString.from_sites(n, {q: axis})


def apply_gate(state: State, op: GateOp, *, inplace: bool = False) -> State:
    """Apply the ideal unitary of ``op`` (MS global phase dropped)."""
    out = state if inplace else state.copy()
    n = out.n_qubits
    if max(op.qubits) >= n:
        raise DimensionError(f"gate on qubit {max(op.qubits)} for a {n}-qubit register")
    if op.kind in (LOCAL, BASIS):
        apply_pauli_exponential(out, _single(n, op.qubits[0], op.axis), op.angle / 2, inplace=True)
        return out
    phase = float(op.axis)
    if phase:
        for q in op.qubits:
            apply_pauli_exponential(out, _single(n, q, "z"), -phase / 2, inplace=True)
    # S^2 = m + 2*sum_{j<k} X_j X_k; the pair terms commute
    qs = op.qubits
    for i, j in ((a, b) for ia, a in enumerate(qs) for b in qs[ia + 1:]):
        apply_pauli_exponential(out, PauliString.from_sites(n, {i: "X", j: "X"}), op.angle / 2, inplace=True)
    if phase:
        for q in op.qubits:
            apply_pauli_exponential(out, _single(n, q, "z"), phase / 2, inplace=True)
    return out


def apply_sequence(state: State, seq: GateSequence, *, inplace: bool = False) -> State:
    out = state if inplace else state.copy()
    for op in seq.ops:
        apply_gate(out, op, inplace=True)
    return out


def gate_matrix(op: GateOp, n_qubits: int) -> np.ndarray:
    """Dense unitary of ``op`` by ``scipy.linalg.expm`` (reference path, exact global phase)."""
    if op.kind in (LOCAL, BASIS):
        gen = _single(n_qubits, op.qubits[0], op.axis).to_matrix()
        return scipy.linalg.expm(-0.5j * op.angle * gen)
    phase = float(op.axis)
    s = sum(
        math.cos(phase) * _single(n_qubits, q, "x").to_matrix() + math.sin(phase) * _single(n_qubits, q, "y").to_matrix()
        for q in op.qubits
    )
    return scipy.linalg.expm(-0.25j * op.angle * (s @ s))


def sequence_matrix(seq: GateSequence) -> np.ndarray:
    u = np.eye(2**seq.n_qubits, dtype=complex)
    for op in seq.ops:
        u = gate_matrix(op, seq.n_qubits) @ u
    return u


# ---------------------------------------------------------------------------
# compilation

def trotterize(h_tilde: PauliSum, t: float, steps: int) -> list[tuple[PauliString, float]]:
    """First-order Trotter product as ``(string, angle)`` pairs, ``exp(-i*angle*P)`` each."""
    if steps < 1:
        raise ValueError("steps must be a positive integer")
    h_tilde.require_hermitian()
    one_step = [(p, float(np.real(c)) * t / steps) for c, p in h_tilde.terms]
    return one_step * steps


def compile_pauli_exponential(
    p: PauliString, angle: float, options: CompilerOptions | None = None
) -> GateSequence:
    """Gate sequence equal to ``exp(-i*angle*P)`` up to global phase."""
    options = options or CompilerOptions()
    n = p.n_qubits
    if p.phase.imag != 0:
        raise ValueError("exponent string must be Hermitian (phase ±1)")
    angle = float(angle) * p.phase.real
    if p.is_identity():
        if angle != 0:
            warnings.warn("identity exponential is a global phase; compiled to nothing", stacklevel=2)
        return empty_sequence(n, options)
    if angle == 0:
        return empty_sequence(n, options)

    support = p.support
    if len(support) == 1:
        q = support[0]
        return GateSequence((rotation(q, p.axes[q].lower(), 2 * angle),), n, options)

    central = next((q for q in support if p.axes[q] == "Z"), support[0])
    pre, post = [], []
    for q in support:
        src = p.axes[q].lower()
        dst = "z" if q == central else "x"
        if src != dst:
            pre.append(basis_change(q, src, dst))
            post.append(basis_change(q, dst, src))
    m = len(support)
    axis, sign = CENTRAL_ROTATION[m % 4]
    decoupling = options.decoupling if m < n else None
    ops = (
        *pre,
        ms_gate(support, math.pi / 2, decoupling=decoupling),
        rotation(central, axis, 2 * angle * sign),
        ms_gate(support, -math.pi / 2, decoupling=decoupling),
        *post,
    )
    return GateSequence(ops, n, options)


def compile_evolution(
    h_tilde: PauliSum, t: float, steps: int, options: CompilerOptions | None = None
) -> GateSequence:
    options = options or CompilerOptions()
    seq = empty_sequence(h_tilde.n_qubits, options)
    ops: list[GateOp] = []
    for p, angle in trotterize(h_tilde, t, steps):
        ops.extend(compile_pauli_exponential(p, angle, options).ops)
    return replace(seq, ops=tuple(ops))


def apply_trotter(state: State, product: Sequence[tuple[PauliString, float]]) -> State:
    out = state.copy()
    for p, angle in product:
        apply_pauli_exponential(out, p, angle, inplace=True)
    return out


# ---------------------------------------------------------------------------
# gate-sequence text format

def _num(x: float) -> str:
    return format(float(x), ".17g")


def format_gate(op: GateOp) -> str:
    if op.kind == MS:
        line = f"MS mask={','.join(map(str, op.qubits))} axis={_num(op.axis)} angle={_num(op.angle)}"
        if op.decoupling:
            line += f" decoupling={op.decoupling}"
        return line
    if op.kind == BASIS:
        return f"BC q={op.qubits[0]} from={op.basis[0]} to={op.basis[1]}"
    return f"R{op.axis.upper()} q={op.qubits[0]} angle={_num(op.angle)}"


def parse_gate(line: str) -> GateOp:
    head, *fields = line.split()
    kv = dict(f.split("=", 1) for f in fields)
    if head == "MS":
        return ms_gate(
            (int(q) for q in kv["mask"].split(",")), float(kv["angle"]), float(kv["axis"]), kv.get("decoupling")
        )
    if head == "BC":
        return basis_change(int(kv["q"]), kv["from"], kv["to"])
    if head in ("RX", "RY", "RZ"):
        return GateOp(LOCAL, (int(kv["q"]),), head[1].lower(), float(kv["angle"]))
    raise ValueError(f"unknown gate line {line!r}")


def parse_sequence(text: str, n_qubits: int, options: CompilerOptions | None = None) -> GateSequence:
    ops = tuple(parse_gate(line) for line in text.splitlines() if line.strip())
    return GateSequence(ops, n_qubits, options or CompilerOptions())


# ---------------------------------------------------------------------------
# measurement planner

@dataclass(frozen=True)
class MeasurementPlan:
    """Evolve under ``exp(-i*pi/4*G)`` for each generator, then measure ``observable``.

    ``sign * <observable>`` after the evolutions equals ``<target>`` before.
    """

    target: PauliString
    generators: tuple[PauliString, ...]
    observable: PauliString
    sign: int

    @property
    def n_qubits(self) -> int:
        return self.target.n_qubits

    def unitaries(self, options: CompilerOptions | None = None) -> tuple[GateSequence, ...]:
        return tuple(compile_pauli_exponential(g, PROTOCOL_ANGLE, options) for g in self.generators)

    def circuit(self, options: CompilerOptions | None = None) -> GateSequence:
        seq = empty_sequence(self.n_qubits, options)
        for u in self.unitaries(options):
            seq = seq + u
        return seq


def conjugate_by_generators(observable: PauliString, generators: Sequence[PauliString]) -> PauliString:
    """Heisenberg picture ``U^dag O U`` for ``U = prod_k exp(-i*pi/4*G_k)``, computed symbolically.

    For ``G`` anticommuting with ``O`` the conjugation gives ``-i*O*G``;
    commuting generators leave ``O`` unchanged.
    """
    out = observable
    # the last generator applied to the state is the first to conjugate
    for g in reversed(generators):
        if not commutes(out, g):
            out = PauliString((out * g).axes, -1j * (out * g).phase)
    return out


_GEN_PREFERENCE = {"X": "Y", "Y": "X", "Z": "X"}
_OBS_PREFERENCE = {"X": "Z", "Y": "Z", "Z": "X"}


def _others(axis: str) -> tuple[str, str]:
    a, b = (c for c in "XYZ" if c != axis)
    return a, b


def plan_measurement(target: PauliString) -> MeasurementPlan:
    """Choose generators and a one- or two-qubit observable that read out ``target``.

    Full-support targets use a single generator and a one-qubit observable.
    Targets containing identities use two commuting full-support generators;
    odd weight measures one qubit, even weight two qubits.
    """
    if target.phase.imag != 0:
        raise ValueError("target must be Hermitian (phase ±1)")
    n = target.n_qubits
    axes = target.axes
    support = target.support
    if not support:
        return MeasurementPlan(target, (), PauliString.identity(n), int(target.phase.real))

    if len(support) == n:
        a = support[0]
        obs_axis = _OBS_PREFERENCE[axes[a]]
        gen_axis = next(c for c in "XYZ" if c not in (axes[a], obs_axis))
        observable = PauliString.from_sites(n, {a: obs_axis})
        gen = list(axes)
        gen[a] = gen_axis
        generators = (PauliString("".join(gen)),)
    else:
        g1, g2 = ["Y"] * n, ["Y"] * n
        a = support[0]
        g1[a] = g2[a] = _GEN_PREFERENCE[axes[a]]
        obs_sites = {a: axes[a]}
        rest = support[1:]
        if len(support) % 2 == 0:
            b = support[1]
            obs_sites[b] = axes[b]
            g1[b] = g2[b] = axes[b]
            rest = support[2:]
        for q in rest:
            g1[q], g2[q] = _others(axes[q])
        observable = PauliString.from_sites(n, obs_sites)
        generators = (PauliString("".join(g1)), PauliString("".join(g2)))

    result = conjugate_by_generators(observable, generators)
    if result.axes != axes or result.phase.imag != 0:
        raise PlanningError(f"plan for {target} reproduces {result}")
    for g in generators:
        if commutes(g, observable):
            raise PlanningError(f"generator {g} commutes with {observable}")
    sign = int(result.phase.real * target.phase.real)
    return MeasurementPlan(target, generators, observable, sign)


def execute_plan(
    state: State,
    plan: MeasurementPlan,
    noise=None,
    shots: int | None = None,
    seed=0,
    options: CompilerOptions | None = None,
) -> tuple[float, float]:
    """Run the plan on ``state`` and return ``(estimate of <target>, stderr)``.

    ``shots=None`` gives the exact expectation with zero stderr. No
    mitigation is applied here; see :func:`eqsim.noise.mitigate`.
    """
    from .hilbert import pauli_expectation, sample_observable
    from .noise import run_sequence

    if state.n_qubits != plan.n_qubits:
        raise DimensionError("plan and state registers differ")
    if plan.observable.is_identity():
        return float(plan.sign), 0.0
    evolved = run_sequence(state, plan.circuit(options), noise)
    obs = plan.observable
    if shots is None:
        return plan.sign * pauli_expectation(evolved, obs).real, 0.0
    mean, err = sample_observable(evolved, obs, shots, seed)
    return plan.sign * mean, err
