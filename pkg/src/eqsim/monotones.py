"""Pure-state entanglement monotones of the form ``|<psi|Theta|psi*>|``.

A :class:`MonotoneSpec` lists components ``(Theta_c, s_c)`` and a combine
rule: ``abs_value`` gives ``|z_1|`` and ``abs_sum_of_squares`` gives
``|sum_c s_c z_c**2|`` where ``z_c = <psi|Theta_c|psi*>``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .compiler import CompilerOptions, GateSequence, execute_plan, plan_measurement
from .embedding import antilinear_expectation, direct_antilinear, theta_images
from .hilbert import State, StateVector
from .noise import NoiseModel, mitigate, run_sequence
from .pauli import DimensionError, PauliString, PauliSum, format_pauli_sum, parse_pauli_sum

ABS_VALUE = "abs_value"
ABS_SUM_OF_SQUARES = "abs_sum_of_squares"


@dataclass(frozen=True)
class MonotoneSpec:
    name: str
    components: tuple[tuple[PauliSum, int], ...]
    combine: str

    def __post_init__(self):
        if self.combine not in (ABS_VALUE, ABS_SUM_OF_SQUARES):
            raise ValueError(f"unknown combine rule {self.combine!r}")
        if not self.components:
            raise ValueError("a monotone needs at least one component")
        if self.combine == ABS_VALUE and len(self.components) != 1:
            raise ValueError("abs_value takes exactly one component")
        n = self.components[0][0].n_qubits
        for theta, sign in self.components:
            if theta.n_qubits != n:
                raise DimensionError("all components must act on the same register")
            if sign not in (1, -1):
                raise ValueError("component sign must be ±1")
            theta.require_hermitian()

    @property
    def n_qubits(self) -> int:
        return self.components[0][0].n_qubits

    def combine_values(self, z: list[complex]) -> float:
        return abs(_combined(self, z))

    def enlarged_targets(self) -> list[PauliString]:
        """Every enlarged-space string that must be measured, in evaluation order."""
        out = []
        for theta, _ in self.components:
            zt, xt = theta_images(theta)
            out += [p for _, p in zt.terms] + [p for _, p in xt.terms]
        return out

    def to_text(self) -> str:
        lines = [f"name: {self.name}", f"combine: {self.combine}"]
        for theta, sign in self.components:
            lines += [f"component: {format_pauli_sum(theta)}", f"sign: {sign}"]
        return "\n".join(lines) + "\n"


def parse_monotone(text: str) -> MonotoneSpec:
    name, combine, comps = None, None, []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise ValueError(f"line {lineno}: expected 'key: value'")
        key, value = key.strip(), value.strip()
        if key == "name":
            name = value
        elif key == "combine":
            combine = value
        elif key == "component":
            comps.append([parse_pauli_sum(value), 1])
        elif key == "sign":
            if not comps:
                raise ValueError(f"line {lineno}: 'sign' before any component")
            comps[-1][1] = int(value)
        else:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
    if name is None or combine is None:
        raise ValueError("monotone text needs 'name' and 'combine'")
    return MonotoneSpec(name, tuple((t, s) for t, s in comps), combine)


def concurrence_spec() -> MonotoneSpec:
    return MonotoneSpec("concurrence", ((parse_pauli_sum("1.0 * Y_Y"), 1),), ABS_VALUE)


def three_tangle_spec() -> MonotoneSpec:
    # metric (-, +, +) over I, X, Z on the first qubit
    return MonotoneSpec(
        "three_tangle",
        (
            (parse_pauli_sum("1.0 * I_Y_Y"), -1),
            (parse_pauli_sum("1.0 * X_Y_Y"), 1),
            (parse_pauli_sum("1.0 * Z_Y_Y"), 1),
        ),
        ABS_SUM_OF_SQUARES,
    )


PRESETS = {"concurrence": concurrence_spec, "three_tangle": three_tangle_spec}


def get_monotone(name_or_path: str) -> MonotoneSpec:
    if name_or_path in PRESETS:
        return PRESETS[name_or_path]()
    with open(name_or_path) as fh:
        return parse_monotone(fh.read())


def _combined(spec: MonotoneSpec, z) -> complex:
    if spec.combine == ABS_VALUE:
        return complex(z[0])
    return complex(sum(s * zc * zc for (_, s), zc in zip(spec.components, z)))


def evaluate_direct(psi: StateVector | np.ndarray, spec: MonotoneSpec) -> float:
    vec = psi.data if isinstance(psi, StateVector) else np.asarray(psi)
    if vec.shape[0] != 2**spec.n_qubits:
        raise DimensionError("state and monotone registers differ")
    return spec.combine_values([direct_antilinear(vec, theta) for theta, _ in spec.components])


def evaluate_embedded_exact(big: StateVector, spec: MonotoneSpec) -> float:
    if big.n_qubits != spec.n_qubits + 1:
        raise DimensionError("enlarged state must have one more qubit than the monotone")
    return spec.combine_values([antilinear_expectation(big, theta) for theta, _ in spec.components])


@dataclass(frozen=True)
class ProtocolResult:
    value: float
    stderr: float
    raw_value: float
    raw_stderr: float
    components: tuple[complex, ...]
    gate_counts: dict


def _assemble(spec: MonotoneSpec, measured: list[tuple[float, float]]) -> tuple[float, float, tuple]:
    # z_c = sum_t c_t (<Z⊗P_t> - i <X⊗P_t>); keep d z_c / d m_j per measurement
    z_vals, dz = [], []
    pos = 0
    for theta, _ in spec.components:
        k = len(theta)
        zc, grads = 0j, {}
        for t, (c, _) in enumerate(theta.terms):
            iz, ix = pos + t, pos + k + t
            zc += c * (measured[iz][0] - 1j * measured[ix][0])
            grads[iz] = c
            grads[ix] = -1j * c
        z_vals.append(zc)
        dz.append(grads)
        pos += 2 * k

    f = _combined(spec, z_vals)
    value = abs(f)
    var = 0.0
    for j, (_, err) in enumerate(measured):
        if err == 0:
            continue
        dfdm = 0j
        for ci, ((_, s), grads) in enumerate(zip(spec.components, dz)):
            if j in grads:
                dfdm += grads[j] if spec.combine == ABS_VALUE else 2 * s * z_vals[ci] * grads[j]
        # first-order propagation; falls back to |dF/dm| where |F| = 0
        d_abs = (f.conjugate() * dfdm).real / value if value > 0 else abs(dfdm)
        var += (d_abs * err) ** 2
    return value, math.sqrt(var), tuple(z_vals)


def evaluate_embedded_protocol(
    initial: State,
    preparation: GateSequence,
    spec: MonotoneSpec,
    noise: NoiseModel | None = None,
    shots: int | None = None,
    seed=0,
    *,
    options: CompilerOptions | None = None,
    mitigated: bool = True,
    noisy_readout: bool = True,
) -> ProtocolResult:
    """Measure a monotone through the embedded readout protocol.

    Each component ``Theta = sum_t c_t P_t`` needs ``<Z⊗P_t>`` and ``<X⊗P_t>``,
    each read out with its own measurement plan after the (noisy)
    preparation. With ``mitigated`` the depolarizing contraction is inverted
    per target using the gate count of preparation plus readout; the raw
    estimate is always reported alongside. ``noisy_readout=False`` runs the
    readout unitaries noiselessly. ``stderr`` is first-order error
    propagation through the combine rule.
    """
    if initial.n_qubits != spec.n_qubits + 1 or preparation.n_qubits != initial.n_qubits:
        raise DimensionError("initial state, preparation and monotone registers disagree")
    options = options or preparation.options
    prepared = run_sequence(initial, preparation, noise)
    readout_noise = noise if noisy_readout else None
    eps = noise.epsilon if (noise is not None and noise.depolarizes) else 1.0

    targets = spec.enlarged_targets()
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    seeds = root.spawn(len(targets))
    raw, fixed, counts = [], [], {}
    for i, target in enumerate(targets):
        plan = plan_measurement(target)
        est, err = execute_plan(prepared, plan, readout_noise, shots, seeds[i], options)
        n_total = preparation.gate_count + (plan.circuit(options).gate_count if readout_noise else 0)
        counts[target.label()] = n_total
        raw.append((est, err))
        if eps < 1.0:
            fixed.append((mitigate(est, eps, n_total), err / eps**n_total))
        else:
            fixed.append((est, err))

    raw_value, raw_err, raw_z = _assemble(spec, raw)
    if not mitigated:
        return ProtocolResult(raw_value, raw_err, raw_value, raw_err, raw_z, counts)
    value, err, z = _assemble(spec, fixed)
    return ProtocolResult(value, err, raw_value, raw_err, z, counts)
