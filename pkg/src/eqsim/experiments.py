"""Config-driven experiment runners: monotone time series, crosstalk sweeps, cost tables."""
from __future__ import annotations

import configparser
import csv
import io
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .compiler import CompilerOptions, compile_evolution
from .embedding import embed_state
from .hilbert import RNG_ALGORITHM, StateVector, evolve_exact
from .monotones import MonotoneSpec, evaluate_direct, evaluate_embedded_protocol, get_monotone
from .noise import (
    CostInputs,
    NoiseModel,
    cost_ratio,
    repetitions_embedding,
    repetitions_tomography,
    tomography_observable_count,
)
from .pauli import PauliSum, embed_hamiltonian, parse_pauli_sum

CSV_VERSION = 1
PRESET_NAMES = ("fig2a", "fig2b", "fig2c", "fig2d")


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass(frozen=True)
class ExperimentConfig:
    hamiltonian: PauliSum
    initial_state: StateVector
    t_start: float
    t_end: float
    points: int
    trotter_steps: int
    monotone: MonotoneSpec
    epsilons: tuple[float, ...] = (1.0,)
    delta0s: tuple[float, ...] = (0.0,)
    shots: int | None = None
    seed: int = 0
    output: str | None = None
    workers: int = 1
    noisy_readout: bool = False
    options: CompilerOptions = field(default_factory=CompilerOptions)

    def __post_init__(self):
        if self.points < 2 or not self.t_end > self.t_start:
            raise ConfigError("time grid must be strictly increasing with at least 2 points")
        if self.trotter_steps < 1:
            raise ConfigError("trotter steps must be positive")
        if self.hamiltonian.n_qubits != self.initial_state.n_qubits:
            raise ConfigError("hamiltonian and initial_state act on different qubit counts")
        if self.monotone.n_qubits != self.hamiltonian.n_qubits:
            raise ConfigError("monotone and hamiltonian act on different qubit counts")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.points)


def _line_of(text: str, section: str, key: str) -> int | None:
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        m = re.match(r"\[(.+)\]$", line)
        if m:
            current = m.group(1).strip()
        elif current == section and re.match(rf"{re.escape(key)}\s*[=:]", line):
            return lineno
    return None


def _parse_state(value: str) -> StateVector:
    value = value.strip()
    if re.fullmatch(r"[01]+", value):
        return StateVector.basis(value)
    amps = np.array([complex(a.strip().replace(" ", "")) for a in value.split(",")])
    return StateVector(amps)


def _floats(value: str) -> tuple[float, ...]:
    return tuple(float(v) for v in value.replace(";", ",").split(",") if v.strip())


def parse_config(text: str, base_dir: Path | None = None) -> ExperimentConfig:
    """Parse an INI experiment config; errors carry the offending line number."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc).replace("\n", " "), getattr(exc, "lineno", None)) from exc

    def get(section, key, convert, default=None, required=False):
        if not parser.has_option(section, key):
            if required:
                raise ConfigError(f"missing required key [{section}] {key}")
            return default
        raw = parser.get(section, key)
        try:
            return convert(raw)
        except (ValueError, TypeError, OSError) as exc:
            raise ConfigError(f"[{section}] {key}: {exc}", _line_of(text, section, key)) from exc

    def boolean(raw):
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")

    def monotone(raw):
        raw = raw.strip()
        if base_dir is not None and not raw.isidentifier():
            raw = str(base_dir / raw)
        return get_monotone(raw)

    def shots(raw):
        raw = raw.strip().lower()
        if raw == "exact":
            return None
        n = int(raw)
        if n <= 0:
            raise ValueError("shots must be positive or 'exact'")
        return n

    options = CompilerOptions(
        count_basis_changes=get("trotter", "count_basis_changes", boolean, True),
        decoupling=get("trotter", "decoupling", str.strip, "shelve"),
    )
    fields = dict(
        hamiltonian=get("experiment", "hamiltonian", parse_pauli_sum, required=True),
        initial_state=get("experiment", "initial_state", _parse_state, required=True),
        monotone=get("experiment", "monotone", monotone, required=True),
        seed=get("experiment", "seed", int, 0),
        shots=get("experiment", "shots", shots, None),
        output=get("experiment", "output", str.strip, None),
        workers=get("experiment", "workers", int, 1),
        t_start=get("time", "start", float, required=True),
        t_end=get("time", "end", float, required=True),
        points=get("time", "points", int, required=True),
        trotter_steps=get("trotter", "steps", int, required=True),
        epsilons=get("noise", "epsilon", _floats, (1.0,)),
        delta0s=get("noise", "delta0", _floats, (0.0,)),
        noisy_readout=get("noise", "noisy_readout", boolean, False),
        options=options,
    )
    try:
        cfg = ExperimentConfig(**fields)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    for e in cfg.epsilons:
        if not 0 < e <= 1:
            raise ConfigError(f"epsilon {e} outside (0, 1]", _line_of(text, "noise", "epsilon"))
    for d in cfg.delta0s:
        if not 0 <= d <= 0.5:
            raise ConfigError(f"delta0 {d} outside [0, 0.5]", _line_of(text, "noise", "delta0"))
    return cfg


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    return parse_config(path.read_text(), path.parent)


def preset_text(name: str) -> str:
    if name not in PRESET_NAMES:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    return resources.files("eqsim").joinpath("presets", f"{name}.ini").read_text()


def load_preset(name: str) -> ExperimentConfig:
    return parse_config(preset_text(name))


# ---------------------------------------------------------------------------
# time-series runs

@dataclass(frozen=True)
class Row:
    t: float
    epsilon: float
    delta0: float
    trotter_steps: int
    shots: int | None
    seed: int
    n_gates: int
    value: float
    stderr: float
    mitigated_value: float
    ideal_value: float


ROW_FIELDS = list(Row.__dataclass_fields__)


def _run_point(args) -> Row:
    cfg, t, eps, delta0, crosstalk, job_seed, point_seed = args
    h_tilde = embed_hamiltonian(cfg.hamiltonian)
    seq = compile_evolution(h_tilde, float(t), cfg.trotter_steps, cfg.options)
    noise = NoiseModel(
        epsilon=eps, delta0=delta0, depolarizing_enabled=not crosstalk, crosstalk_enabled=crosstalk
    )
    res = evaluate_embedded_protocol(
        embed_state(cfg.initial_state),
        seq,
        cfg.monotone,
        noise,
        cfg.shots,
        point_seed,
        options=cfg.options,
        mitigated=True,
        noisy_readout=cfg.noisy_readout,
    )
    ideal = evaluate_direct(evolve_exact(cfg.initial_state, cfg.hamiltonian, float(t)), cfg.monotone)
    return Row(
        float(t), eps, delta0, cfg.trotter_steps, cfg.shots, job_seed, seq.gate_count,
        res.raw_value, res.raw_stderr, res.value, ideal,
    )


def _run_jobs(cfg: ExperimentConfig, jobs: list[tuple], workers: int | None) -> list[Row]:
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(jobs))
    payload = [(cfg, *job, cfg.seed, s) for job, s in zip(jobs, seeds)]
    workers = workers or cfg.workers
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_point, payload, chunksize=4))
    else:
        rows = [_run_point(p) for p in payload]
    return sorted(rows, key=lambda r: (r.delta0, -r.epsilon, r.t))


def run_simulate(cfg: ExperimentConfig, workers: int | None = None) -> list[Row]:
    """Depolarizing sweep: one fresh compiled, noisy run per (epsilon, t)."""
    jobs = [(t, eps, 0.0, False) for eps in cfg.epsilons for t in cfg.times]
    return _run_jobs(cfg, jobs, workers)


def run_crosstalk(cfg: ExperimentConfig, workers: int | None = None) -> list[Row]:
    """Crosstalk sweep with depolarizing disabled."""
    jobs = [(t, 1.0, d, True) for d in cfg.delta0s for t in cfg.times]
    return _run_jobs(cfg, jobs, workers)


def shape_distance(curve, reference) -> float:
    """``||a*v - v0|| / ||v0||`` with ``a`` the least-squares amplitude rescaling of ``v``.

    Zero when ``curve`` is a pure rescaling of ``reference``.
    """
    v = np.asarray(curve, dtype=float)
    v0 = np.asarray(reference, dtype=float)
    vv = float(v @ v)
    a = float(v @ v0) / vv if vv > 0 else 0.0
    return float(np.linalg.norm(a * v - v0) / np.linalg.norm(v0))


def curves(rows: list[Row], key: str) -> dict[float, np.ndarray]:
    out: dict[float, list[Row]] = {}
    for r in rows:
        out.setdefault(getattr(r, key), []).append(r)
    return {k: np.array([r.value for r in sorted(v, key=lambda r: r.t)]) for k, v in out.items()}


def distortions(rows: list[Row], key: str, reference) -> dict[float, float]:
    return {k: shape_distance(v, reference) for k, v in curves(rows, key).items()}


def noiseless_reference(cfg: ExperimentConfig) -> np.ndarray:
    """Protocol-path curve of the compiled circuit without noise."""
    rows = _run_jobs(cfg, [(t, 1.0, 0.0, False) for t in cfg.times], 1)
    return np.array([r.value for r in rows])


# ---------------------------------------------------------------------------
# CSV output

def _fmt(x) -> str:
    if x is None:
        return "exact"
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


def write_rows(rows: list[Row], kind: str, fh) -> None:
    fh.write(f"# eqsim {kind} csv v{CSV_VERSION} rng={RNG_ALGORITHM}\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(ROW_FIELDS)
    for r in rows:
        w.writerow([_fmt(getattr(r, f)) for f in ROW_FIELDS])


def write_distortion(dist: dict[float, float], key: str, steps: int, fh) -> None:
    fh.write(f"# eqsim distortion csv v{CSV_VERSION}\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow([key, "trotter_steps", "shape_distance"])
    for k in sorted(dist):
        w.writerow([_fmt(k), steps, _fmt(dist[k])])


def rows_to_csv(rows: list[Row], kind: str) -> str:
    buf = io.StringIO()
    write_rows(rows, kind, buf)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# cost report

COST_FIELDS = [
    "n_qubits", "l", "k", "epsilon", "delta", "n_gates", "N_emb", "N_oto", "ratio",
    "tomography_observables", "embedding_observables",
]


def run_costs(k=0.01, epsilon=0.97, delta=0.98, l=2, max_qubits=20, min_qubits=1) -> list[dict]:
    """Tabulate repetitions with the gate count tied to the register size (``n = N``)."""
    rows = []
    for n in range(min_qubits, max_qubits + 1):
        inputs = CostInputs(k=k, n=n, epsilon=epsilon, delta=delta, n_qubits=n, l=l)
        rows.append(
            dict(
                n_qubits=n, l=l, k=k, epsilon=epsilon, delta=delta, n_gates=n,
                N_emb=repetitions_embedding(k, epsilon, n),
                N_oto=repetitions_tomography(k, delta, n, n),
                ratio=cost_ratio(inputs),
                tomography_observables=tomography_observable_count(n),
                embedding_observables=l,
            )
        )
    return rows


def crossover(rows: list[dict]) -> int | None:
    """Smallest register size from which the ratio stays below one."""
    below = None
    for r in rows:
        if r["ratio"] < 1:
            below = r["n_qubits"] if below is None else below
        else:
            below = None
    return below


def write_costs(rows: list[dict], fh) -> None:
    fh.write(f"# eqsim costs csv v{CSV_VERSION}\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(COST_FIELDS)
    for r in rows:
        w.writerow([_fmt(r[f]) for f in COST_FIELDS])


def trotter_error_bound(h: PauliSum, t: float, steps: int) -> float:
    """Operator-norm bound ``t^2/(2n) * sum_{i<j} ||[H_i, H_j]||`` for first-order Trotter."""
    terms = [c * p.to_matrix() for c, p in h.terms]
    total = 0.0
    for i in range(len(terms)):
        for j in range(i + 1, len(terms)):
            comm = terms[i] @ terms[j] - terms[j] @ terms[i]
            total += np.linalg.norm(comm, 2)
    return t * t / (2 * steps) * total


def is_oscillating(values) -> bool:
    """At least one interior local maximum followed by a local minimum."""
    v = np.asarray(values)
    d = np.sign(np.diff(v))
    d = d[d != 0]
    turns = np.flatnonzero(d[:-1] != d[1:])
    return len(turns) >= 2 and not math.isclose(float(v.max()), float(v.min()))
