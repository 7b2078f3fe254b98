"""Command-line entry point: ``eqsim {simulate,crosstalk,costs,verify,compile}``.

Exit codes: 0 success, 1 verification failure, 2 config error, 3 capacity error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from contextlib import contextmanager
from dataclasses import replace
from pathlib import Path

from . import experiments as ex
from .compiler import CompilerOptions, compile_evolution
from .hilbert import CapacityError
from .pauli import embed_hamiltonian, parse_pauli_sum
from .verify import format_report, run_all

log = logging.getLogger("eqsim")

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_CAPACITY = 0, 1, 2, 3


@contextmanager
def _open_out(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _distortion_path(out) -> str | None:
    if out is None or out == "-":
        return None
    p = Path(out)
    return str(p.with_name(p.stem + "_distortion.csv"))


def _config(args) -> ex.ExperimentConfig:
    if args.config and args.preset:
        raise ex.ConfigError("pass either --config or --preset, not both")
    if args.config:
        cfg = ex.load_config(args.config)
    elif args.preset:
        cfg = ex.load_preset(args.preset)
    else:
        raise ex.ConfigError("one of --config or --preset is required")
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.workers is not None:
        cfg = replace(cfg, workers=args.workers)
    return cfg


def _time_series(args, crosstalk: bool) -> int:
    cfg = _config(args)
    out = args.out or cfg.output
    rows = ex.run_crosstalk(cfg) if crosstalk else ex.run_simulate(cfg)
    reference = ex.noiseless_reference(cfg)
    key = "delta0" if crosstalk else "epsilon"
    dist = ex.distortions(rows, key, reference)
    with _open_out(out) as fh:
        ex.write_rows(rows, "crosstalk" if crosstalk else "simulate", fh)
    dpath = _distortion_path(out)
    if dpath:
        with open(dpath, "w", newline="") as fh:
            ex.write_distortion(dist, key, cfg.trotter_steps, fh)
    for k in sorted(dist):
        print(f"{key}={k:g}  shape distance D={dist[k]:.3e}", file=sys.stderr)
    return EXIT_OK


def cmd_simulate(args) -> int:
    return _time_series(args, crosstalk=False)


def cmd_crosstalk(args) -> int:
    return _time_series(args, crosstalk=True)


def cmd_costs(args) -> int:
    rows = ex.run_costs(
        k=args.k, epsilon=args.epsilon, delta=args.delta, l=args.l,
        min_qubits=args.min_qubits, max_qubits=args.max_qubits,
    )
    with _open_out(args.out) as fh:
        ex.write_costs(rows, fh)
    cross = ex.crossover(rows)
    msg = f"ratio N_emb/N_oto < 1 from N_qubit = {cross}" if cross else "ratio never drops below 1 in range"
    print(msg, file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_all(seed=args.seed or 0, corrupt_mitigation=args.negative_control)
    print(format_report(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def cmd_compile(args) -> int:
    options = CompilerOptions(count_basis_changes=not args.no_basis_count, decoupling=args.decoupling)
    if args.hamiltonian:
        h = parse_pauli_sum(args.hamiltonian)
    else:
        h = _config(args).hamiltonian
    h_tilde = h if args.embedded else embed_hamiltonian(h)
    seq = compile_evolution(h_tilde, args.time, args.steps, options)
    with _open_out(args.out) as fh:
        fh.write(f"# qubits={seq.n_qubits} gate_count={seq.gate_count}\n")
        if seq.ops:
            fh.write(seq.dump() + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eqsim", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", metavar="PATH")
            p.add_argument("--preset", metavar="NAME", choices=ex.PRESET_NAMES)
            p.add_argument("--workers", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--out", metavar="PATH")

    p = sub.add_parser("simulate", help="monotone time series under depolarizing noise")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("crosstalk", help="monotone time series under single-ion crosstalk")
    common(p)
    p.set_defaults(func=cmd_crosstalk)

    p = sub.add_parser("costs", help="repetition-cost table, embedding vs tomography")
    common(p, config=False)
    p.add_argument("--k", type=float, default=0.01)
    p.add_argument("--epsilon", type=float, default=0.97)
    p.add_argument("--delta", type=float, default=0.98)
    p.add_argument("--l", type=int, default=2)
    p.add_argument("--min-qubits", type=int, default=1)
    p.add_argument("--max-qubits", type=int, default=20)
    p.set_defaults(func=cmd_costs)

    p = sub.add_parser("verify", help="run the cross-module property suites")
    common(p, config=False)
    p.add_argument("--negative-control", action="store_true", help="corrupt the mitigation exponent")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("compile", help="dump the gate sequence of a Trotterized evolution")
    common(p)
    p.add_argument("--hamiltonian", help="Pauli-sum text; overrides --config/--preset")
    p.add_argument("--embedded", action="store_true", help="the Hamiltonian already acts on the enlarged register")
    p.add_argument("--time", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--decoupling", choices=("shelve", "refocus"), default="shelve")
    p.add_argument("--no-basis-count", action="store_true", help="basis changes do not count as gates")
    p.set_defaults(func=cmd_compile)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except ex.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
