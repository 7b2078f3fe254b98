import csv
import io
import time

import numpy as np
import pytest

from eqsim import experiments as ex
from eqsim.cli import EXIT_CAPACITY, EXIT_CONFIG, EXIT_OK, EXIT_VERIFY, main

SMALL = """\
[experiment]
hamiltonian = 1.0 * Y_I_I + 1.0 * I_Y_I + 1.0 * I_I_Y + 2.0 * X_X_X
initial_state = 000
monotone = three_tangle
seed = 3
shots = {shots}

[time]
start = 0.0
end = 1.0
points = 4

[trotter]
steps = 2

[noise]
epsilon = 1.0, 0.95
delta0 = 0.0, 0.05
"""


def _write(tmp_path, text, name="exp.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def _read_csv(path):
    lines = open(path).read().splitlines()
    assert lines[0].startswith("# eqsim")
    return list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


@pytest.mark.parametrize(
    "key, bad, line",
    [
        ("initial_state = 000", "initial_state = 0x0", 3),
        ("points = 4", "points = four", 11),
        ("epsilon = 1.0, 0.95", "epsilon = 1.0, 1.5", 17),
        ("monotone = three_tangle", "monotone = no_such_file.txt", 4),
    ],
)
def test_config_errors_report_line(key, bad, line):
    text = SMALL.format(shots="exact").replace(key, bad)
    with pytest.raises(ex.ConfigError) as info:
        ex.parse_config(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_missing_key():
    text = SMALL.format(shots="exact").replace("steps = 2\n", "")
    with pytest.raises(ex.ConfigError, match="steps"):
        ex.parse_config(text)


def test_config_error_exit_code(tmp_path, capsys):
    path = _write(tmp_path, SMALL.format(shots="-4"))
    assert main(["simulate", "--config", path]) == EXIT_CONFIG
    assert "line 6" in capsys.readouterr().err
    assert main(["simulate"]) == EXIT_CONFIG


def test_capacity_exit_code(tmp_path):
    text = SMALL.format(shots="exact").replace(
        "hamiltonian = 1.0 * Y_I_I + 1.0 * I_Y_I + 1.0 * I_I_Y + 2.0 * X_X_X", "hamiltonian = 1.0 * " + "_".join("Y" * 10)
    ).replace("initial_state = 000", "initial_state = " + "0" * 10).replace("monotone = three_tangle", "monotone = tangle.txt")
    (tmp_path / "tangle.txt").write_text("name: t\ncombine: abs_value\ncomponent: 1.0 * " + "_".join("Y" * 10) + "\n")
    path = _write(tmp_path, text)
    assert main(["simulate", "--config", path, "--out", str(tmp_path / "o.csv")]) == EXIT_CAPACITY


def test_simulate_writes_csv(tmp_path):
    path = _write(tmp_path, SMALL.format(shots="exact"))
    out = tmp_path / "sim.csv"
    assert main(["simulate", "--config", path, "--out", str(out)]) == EXIT_OK
    rows = _read_csv(out)
    assert len(rows) == 8
    assert set(rows[0]) == set(ex.ROW_FIELDS)
    assert "rng=numpy.PCG64" in out.read_text().splitlines()[0]
    noisy = [r for r in rows if float(r["epsilon"]) == 0.95]
    # exact mode: mitigation restores the noiseless protocol value
    clean = [r for r in rows if float(r["epsilon"]) == 1.0]
    for a, b in zip(noisy, clean):
        assert float(a["mitigated_value"]) == pytest.approx(float(b["value"]), abs=1e-9)
    dist = _read_csv(tmp_path / "sim_distortion.csv")
    assert [float(d["epsilon"]) for d in dist] == [0.95, 1.0]


def test_floats_use_17_digits(tmp_path):
    path = _write(tmp_path, SMALL.format(shots="exact"))
    out = tmp_path / "sim.csv"
    main(["simulate", "--config", path, "--out", str(out)])
    for r in _read_csv(out):
        v = float(r["ideal_value"])
        assert r["ideal_value"] == format(v, ".17g")


def test_sampled_runs_deterministic_and_worker_independent(tmp_path):
    path = _write(tmp_path, SMALL.format(shots="2000"))
    outs = []
    for name, extra in (("a.csv", []), ("b.csv", []), ("c.csv", ["--workers", "2"])):
        out = tmp_path / name
        assert main(["simulate", "--config", path, "--out", str(out), *extra]) == EXIT_OK
        outs.append(out.read_text())
    assert outs[0] == outs[1] == outs[2]
    out = tmp_path / "d.csv"
    main(["simulate", "--config", path, "--out", str(out), "--seed", "4"])
    assert out.read_text() != outs[0]


def test_crosstalk_command(tmp_path):
    path = _write(tmp_path, SMALL.format(shots="exact"))
    out = tmp_path / "xt.csv"
    assert main(["crosstalk", "--config", path, "--out", str(out)]) == EXIT_OK
    rows = _read_csv(out)
    assert sorted({float(r["delta0"]) for r in rows}) == [0.0, 0.05]
    assert all(float(r["epsilon"]) == 1.0 for r in rows)


@pytest.mark.parametrize("preset", ex.PRESET_NAMES)
def test_presets_run_quickly(preset, tmp_path):
    start = time.perf_counter()
    out = tmp_path / f"{preset}.csv"
    cmd = "crosstalk" if preset == "fig2d" else "simulate"
    assert main([cmd, "--preset", preset, "--out", str(out)]) == EXIT_OK
    assert time.perf_counter() - start < 60
    assert len(_read_csv(out)) == 240


def test_costs_command(tmp_path):
    out = tmp_path / "costs.csv"
    assert main(["costs", "--out", str(out), "--max-qubits", "8"]) == EXIT_OK
    rows = _read_csv(out)
    ratios = [float(r["ratio"]) for r in rows]
    assert len(rows) == 8 and all(a > b for a, b in zip(ratios, ratios[1:]))
    assert rows[2]["tomography_observables"] == "63"


def test_verify_and_negative_control(capsys):
    assert main(["verify"]) == EXIT_OK
    assert capsys.readouterr().out.count("PASS") == 5
    assert main(["verify", "--negative-control"]) == EXIT_VERIFY
    assert "FAIL  epsilon^n mitigation" in capsys.readouterr().out


def test_compile_command(tmp_path):
    out = tmp_path / "seq.txt"
    assert main(["compile", "--preset", "fig2a", "--time", "1.0", "--steps", "5", "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "# qubits=4 gate_count=40"
    assert sum(line.startswith("MS") for line in lines) == 10
    out2 = tmp_path / "seq2.txt"
    assert main(["compile", "--hamiltonian", "1.0 * X_X", "--embedded", "--no-basis-count", "--out", str(out2)]) == EXIT_OK
    assert out2.read_text().splitlines()[0] == "# qubits=2 gate_count=3"


def test_compile_bad_hamiltonian():
    assert main(["compile", "--hamiltonian", "1.0 * Q"]) == EXIT_CONFIG


def test_shape_distance():
    v0 = np.sin(np.linspace(0, 3, 20))
    assert ex.shape_distance(0.4 * v0, v0) < 1e-15
    assert ex.shape_distance(v0 + 0.1 * np.cos(np.linspace(0, 3, 20)), v0) > 1e-3


def test_crossover():
    rows = ex.run_costs(max_qubits=6)
    assert ex.crossover(rows) == 1
    assert ex.crossover(ex.run_costs(epsilon=0.5, delta=0.99, max_qubits=4)) is None
