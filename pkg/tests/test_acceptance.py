"""Acceptance criteria, one test each; a PASS/FAIL line per criterion is printed in the summary."""
import itertools
import math
import time
from dataclasses import replace

import numpy as np
import pytest
import scipy.linalg

from eqsim import experiments as ex
from eqsim.compiler import compile_evolution, compile_pauli_exponential, conjugate_by_generators, plan_measurement, sequence_matrix
from eqsim.embedding import antilinear_expectation, direct_antilinear, embed_state, project
from eqsim.hilbert import DensityMatrix, StateVector, evolve_exact, pauli_expectation, sample_observable
from eqsim.monotones import concurrence_spec, evaluate_direct, evaluate_embedded_exact, three_tangle_spec
from eqsim.noise import CostInputs, NoiseModel, cost_ratio, mitigate, repetitions_embedding, repetitions_tomography, run_sequence
from eqsim.pauli import PauliString, commutes, embed_hamiltonian, parse_pauli_sum
from eqsim.verify import phase_distance, random_pauli_sum

GHZ = parse_pauli_sum("1.0 * Y_I_I + 1.0 * I_Y_I + 1.0 * I_I_Y + 2.0 * X_X_X")


@pytest.mark.criterion(1, "embedding dynamics identity")
def test_embedding_dynamics(detail):
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 4))
        h = random_pauli_sum(n, rng)
        psi = StateVector.random(n, rng)
        h_tilde = embed_hamiltonian(h)
        big = embed_state(psi)
        for t in (0.1, 1.0, 3.0):
            diff = project(evolve_exact(big, h_tilde, t)) - evolve_exact(psi, h, t).data
            worst = max(worst, float(np.linalg.norm(diff)))
    elapsed = time.perf_counter() - start
    detail(f"max error {worst:.2e}, {elapsed:.2f} s")
    assert worst <= 1e-10
    assert elapsed < 10


@pytest.mark.criterion(2, "antilinear expectation identity")
def test_antilinear_identity(detail):
    rng = np.random.default_rng(202)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 4))
        psi = StateVector.random(n, rng)
        theta = random_pauli_sum(n, rng, coeffs="sign")
        worst = max(worst, abs(direct_antilinear(psi, theta) - antilinear_expectation(embed_state(psi), theta)))
    elapsed = time.perf_counter() - start
    detail(f"max error {worst:.2e}, {elapsed:.2f} s")
    assert worst <= 1e-12
    assert elapsed < 5


@pytest.mark.criterion(3, "compiler soundness, exhaustive 2-5 qubits")
def test_compiler_soundness(detail):
    start = time.perf_counter()
    worst, count = 0.0, 0
    for n in range(2, 6):
        for axes in itertools.product("IXYZ", repeat=n):
            p = PauliString("".join(axes))
            if p.is_identity():
                continue
            want = scipy.linalg.expm(-0.37j * p.to_matrix())
            worst = max(worst, phase_distance(sequence_matrix(compile_pauli_exponential(p, 0.37)), want))
            count += 1
    elapsed = time.perf_counter() - start
    detail(f"{count} strings, max error {worst:.2e}, {elapsed:.1f} s")
    assert worst <= 1e-10
    assert elapsed < 30


@pytest.mark.criterion(4, "measurement planner reproduces targets")
def test_planner_soundness(detail):
    for n in range(1, 7):
        for axes in itertools.product("IXYZ", repeat=n):
            target = PauliString("".join(axes))
            plan = plan_measurement(target)
            if target.is_identity():
                continue
            got = conjugate_by_generators(plan.observable, plan.generators)
            assert got.axes == target.axes and plan.sign * got.phase == 1

    # single-evolution example, N = 4: generator XXXX, read out Z on the first qubit
    plan = plan_measurement(PauliString("YXXX"))
    assert [g.axes for g in plan.generators] == ["XXXX"]
    assert plan.observable.axes == "ZIII"

    # even-correlation example with identities, N = 6
    target = PauliString("YXXXII")
    plan = plan_measurement(target)
    assert plan.observable.axes == "YXIIII"
    assert len(plan.generators) == 2 and commutes(*plan.generators)
    # reference choice with Y on the second site
    reference = (PauliString("XYYYYY"), PauliString("XYZZYY"))
    for g, ref in zip(plan.generators, reference):
        assert [a for i, a in enumerate(g.axes) if i != 1] == [a for i, a in enumerate(ref.axes) if i != 1]
    # Y on the second site commutes with the observable and cannot read out the target
    assert all(commutes(g, plan.observable) for g in reference)
    assert conjugate_by_generators(plan.observable, reference).axes != target.axes
    detail("exhaustive N<=6; even-correlation example uses X on site 2, since Y there commutes with Y1X2")


@pytest.mark.criterion(5, "monotone values on reference states")
def test_monotone_values(detail):
    start = time.perf_counter()
    s2 = 1 / np.sqrt(2)
    ghz = np.zeros(8, complex)
    ghz[[0, 7]] = s2
    w = np.zeros(8, complex)
    w[[1, 2, 4]] = 1 / np.sqrt(3)
    cases = [
        (concurrence_spec(), np.array([s2, 0, 0, s2], complex), 1.0),
        (concurrence_spec(), np.eye(4, dtype=complex)[0], 0.0),
        (three_tangle_spec(), ghz, 1.0),
        (three_tangle_spec(), w, 0.0),
        (three_tangle_spec(), np.eye(8, dtype=complex)[0], 0.0),
    ]
    worst = 0.0
    for spec, vec, expected in cases:
        psi = StateVector(vec)
        worst = max(worst, abs(evaluate_direct(psi, spec) - expected))
        worst = max(worst, abs(evaluate_embedded_exact(embed_state(psi), spec) - expected))
    elapsed = time.perf_counter() - start
    detail(f"max error {worst:.2e}")
    assert worst <= 1e-10
    assert elapsed < 5


@pytest.mark.criterion(6, "epsilon^n contraction and mitigation")
def test_contraction_and_mitigation(detail):
    start = time.perf_counter()
    eps, k = 0.97, 0.02
    seq = compile_evolution(embed_hamiltonian(GHZ), 1.0, 5)
    n = seq.gate_count
    init = DensityMatrix(np.diag([1.0] + [0.0] * 15))
    ideal = run_sequence(init, seq)
    noisy = run_sequence(init, seq, NoiseModel(eps))
    worst_scale, worst_mit = 0.0, 0.0
    for axes in itertools.product("IXYZ", repeat=4):
        p = PauliString("".join(axes))
        if p.is_identity():
            continue
        vi = pauli_expectation(ideal, p).real
        vn = pauli_expectation(noisy, p).real
        worst_scale = max(worst_scale, abs(vn - eps**n * vi))
        worst_mit = max(worst_mit, abs(mitigate(vn, eps, n) - vi))
    assert worst_scale <= 1e-10
    assert worst_mit <= 1e-9

    shots = math.ceil(repetitions_embedding(k, eps, n))
    obs = PauliString("ZIYY")
    exact = pauli_expectation(ideal, obs).real
    hits = 0
    for seed in range(100):
        mean, _ = sample_observable(noisy, obs, shots, seed)
        hits += abs(mitigate(mean, eps, n) - exact) <= 4 * k
    elapsed = time.perf_counter() - start
    detail(f"n={n}, scale err {worst_scale:.1e}, mitigation err {worst_mit:.1e}, {hits}/100 within 4k at {shots} shots")
    assert hits >= 95
    assert elapsed < 120


@pytest.mark.criterion(7, "cost ratio below one and decreasing")
def test_cost_ratio(detail):
    start = time.perf_counter()
    eps, delta, l, k = 0.97, 0.98, 2, 0.01
    ratios = []
    for nq in range(1, 31):
        r = cost_ratio(CostInputs(k=k, n=nq, epsilon=eps, delta=delta, n_qubits=nq, l=l))
        quotient = l * repetitions_embedding(k, eps, nq) / repetitions_tomography(k, delta, nq, nq)
        assert r == pytest.approx(quotient, rel=1e-12)
        ratios.append(r)
    assert all(r < 1 for r in ratios[1:])
    assert all(a > b for a, b in zip(ratios, ratios[1:]))
    detail(f"ratio(N=2)={ratios[1]:.3e}, ratio(N=30)={ratios[-1]:.3e}")
    assert time.perf_counter() - start < 1


@pytest.mark.criterion(8, "qualitative reproduction of the GHZ dynamics panels")
def test_ghz_dynamics_properties(detail):
    start = time.perf_counter()
    base = ex.load_preset("fig2a")

    # (a) ideal compiled curve tracks exact evolution within the Trotter bound
    h_tilde = embed_hamiltonian(base.hamiltonian)
    errors = {}
    for steps in (5, 20):
        cfg = replace(base, epsilons=(1.0,), trotter_steps=steps)
        rows = ex.run_simulate(cfg)
        values = np.array([r.value for r in rows])
        ideal = np.array([r.ideal_value for r in rows])
        bound = np.array([12 * min(ex.trotter_error_bound(h_tilde, r.t, steps), 2.0) for r in rows])
        assert np.all(np.abs(values - ideal) <= bound + 1e-12)
        errors[steps] = float(np.abs(values - ideal).max())
        if steps == 5:
            assert ex.is_oscillating(values)
    assert errors[20] < errors[5]

    # (b) depolarizing rescales the curve without changing its shape
    reference = ex.noiseless_reference(base)
    rows = ex.run_simulate(base)
    dist = ex.distortions(rows, "epsilon", reference)
    amplitude = {e: float(np.abs(c).max()) for e, c in ex.curves(rows, "epsilon").items()}
    assert max(dist.values()) <= 1e-9
    eps_sorted = sorted(amplitude)
    assert all(amplitude[a] < amplitude[b] for a, b in zip(eps_sorted, eps_sorted[1:]))

    # (c) crosstalk distorts the shape, more strongly at larger delta0
    xt = ex.load_preset("fig2d")
    xdist = ex.distortions(ex.run_crosstalk(xt), "delta0", ex.noiseless_reference(xt))
    assert xdist[0.05] > xdist[0.01]

    elapsed = time.perf_counter() - start
    detail(
        f"trotter err 5 steps {errors[5]:.3f} > 20 steps {errors[20]:.3f}; "
        f"depolarizing D max {max(dist.values()):.1e}; crosstalk D {xdist[0.01]:.4f} -> {xdist[0.05]:.4f}; {elapsed:.1f} s"
    )
    assert elapsed < 180
