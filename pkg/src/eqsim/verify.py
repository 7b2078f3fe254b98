"""Cross-module property suites behind ``eqsim verify``."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .compiler import compile_evolution, compile_pauli_exponential, sequence_matrix
from .embedding import antilinear_expectation, direct_antilinear, embed_state, project
from .hilbert import DensityMatrix, StateVector, evolve_exact, pauli_expectation
from .monotones import concurrence_spec, evaluate_direct, evaluate_embedded_exact, three_tangle_spec
from .noise import NoiseModel, mitigate, run_sequence
from .pauli import PauliString, PauliSum, embed_hamiltonian, parse_pauli_sum


@dataclass(frozen=True)
class SuiteResult:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


def random_pauli_sum(n: int, rng: np.random.Generator, n_terms: int | None = None, coeffs="normal") -> PauliSum:
    n_terms = n_terms or int(rng.integers(1, 2 * n + 2))
    terms = []
    for _ in range(n_terms):
        axes = "".join(rng.choice(list("IXYZ"), size=n))
        c = float(rng.choice([-1.0, 1.0])) if coeffs == "sign" else float(rng.normal())
        terms.append((c, PauliString(axes)))
    return PauliSum(terms, n)


def phase_distance(u: np.ndarray, v: np.ndarray) -> float:
    """``min_phi max|u - e^{i phi} v|`` evaluated at the overlap phase."""
    ov = np.vdot(v.ravel(), u.ravel())
    ph = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.abs(u - ph * v).max())


def suite_intertwining(rng, trials=50) -> float:
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, 4))
        h = random_pauli_sum(n, rng)
        psi = StateVector.random(n, rng)
        big = embed_state(psi)
        h_tilde = embed_hamiltonian(h)
        for t in (0.1, 1.0, 3.0):
            lhs = project(evolve_exact(big, h_tilde, t))
            rhs = evolve_exact(psi, h, t).data
            worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    return worst


def suite_antilinear(rng, trials=1000) -> float:
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, 4))
        psi = StateVector.random(n, rng)
        theta = random_pauli_sum(n, rng, coeffs="sign")
        worst = max(worst, abs(direct_antilinear(psi, theta) - antilinear_expectation(embed_state(psi), theta)))
    return worst


def suite_compiler(max_qubits=4) -> float:
    worst = 0.0
    for n in range(2, max_qubits + 1):
        for axes in itertools.product("IXYZ", repeat=n):
            p = PauliString("".join(axes))
            if p.weight < 2:
                continue
            angle = 0.37
            want = scipy.linalg.expm(-1j * angle * p.to_matrix())
            worst = max(worst, phase_distance(sequence_matrix(compile_pauli_exponential(p, angle)), want))
    return worst


def ghz_circuit(steps=5, t=1.0):
    h = parse_pauli_sum("1.0 * Y_I_I + 1.0 * I_Y_I + 1.0 * I_I_Y + 2.0 * X_X_X")
    return compile_evolution(embed_hamiltonian(h), t, steps)


def suite_contraction(epsilon=0.97, corrupt=False) -> float:
    """Worst residual of ``mitigate(noisy) - ideal`` over all traceless 4-qubit strings."""
    seq = ghz_circuit()
    start = DensityMatrix(np.diag([1.0] + [0.0] * 15))
    ideal = run_sequence(start, seq)
    noisy = run_sequence(start, seq, NoiseModel(epsilon))
    n = seq.gate_count + (1 if corrupt else 0)
    worst = 0.0
    for axes in itertools.product("IXYZ", repeat=4):
        p = PauliString("".join(axes))
        if p.is_identity():
            continue
        v_ideal = pauli_expectation(ideal, p).real
        v_noisy = pauli_expectation(noisy, p).real
        worst = max(worst, abs(mitigate(v_noisy, epsilon, n) - v_ideal))
    return worst


def suite_path_equivalence(rng, trials=200) -> float:
    worst = 0.0
    for spec in (concurrence_spec(), three_tangle_spec()):
        for _ in range(trials):
            psi = StateVector.random(spec.n_qubits, rng)
            big = embed_state(psi)
            worst = max(worst, abs(evaluate_direct(project(big), spec) - evaluate_embedded_exact(big, spec)))
    return worst


def run_all(seed: int = 0, corrupt_mitigation: bool = False) -> list[SuiteResult]:
    rng = np.random.default_rng(seed)
    suites: list[tuple[str, Callable[[], float], float]] = [
        ("embedding intertwining", lambda: suite_intertwining(rng), 1e-10),
        ("antilinear identity", lambda: suite_antilinear(rng), 1e-12),
        ("compiler soundness", suite_compiler, 1e-10),
        ("epsilon^n mitigation", lambda: suite_contraction(corrupt=corrupt_mitigation), 1e-9),
        ("monotone path equivalence", lambda: suite_path_equivalence(rng), 1e-10),
    ]
    return [SuiteResult(name, fn(), tol) for name, fn, tol in suites]


def format_report(results: list[SuiteResult]) -> str:
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{status}  {r.name:<28} worst residual {r.residual:.3e} (tol {r.tolerance:.0e})")
    return "\n".join(lines)

