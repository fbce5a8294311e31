"""Command-line frontend.

Subcommands: synthesize, threshold, sweep, sample. Every command is
reproducible: identical arguments and seed give byte-identical output
files. Exit codes: 0 ok, 2 computational failure, 3 regime refusal,
64 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .graphs import brickwork_graph, universal_depth
from .iorel import evaluate
from .linalg import haar_unitary, symplectic_of_unitary, unitarity_defect
from .noise import (
    easiness_threshold,
    hardness_threshold,
    noise_gram,
    sweep_easiness,
)
from .oracle import gbs_probability
from .sampling import (
    GaussianState,
    NonSimulableError,
    distribution_tvd,
    empirical_frequencies,
    output_state,
    sample,
    simulable,
    squeezed_vacuum_state,
    vacuum_state,
)
from .synthesis import SynthesisError, clements_decompose, universal_schedule

EXIT_OK = 0
EXIT_FAILURE = 2
EXIT_REGIME = 3
EXIT_USAGE = 64

RECONSTRUCTION_TOL = 1e-7
ORACLE_MODE_CAP = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _default_seed() -> int:
    return int(os.environ.get("MBLO_SEED", "0"))


def _load_unitary(args) -> np.ndarray:
    if args.haar is not None:
        return haar_unitary(args.haar, seed=args.seed)
    with open(args.unitary) as fh:
        data = json.load(fh)
    arr = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
    return arr


def _write(path: str | None, text: str) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_input_state(spec: str, m: int) -> GaussianState:
    """vacuum | squeezed:R0[:K] with p-squeezed vacua on the first K modes."""
    if spec == "vacuum":
        return vacuum_state(m)
    parts = spec.split(":")
    if parts[0] != "squeezed" or len(parts) not in (2, 3):
        raise ValueError(f"unknown input-state spec {spec!r}")
    r0 = float(parts[1])
    k = int(parts[2]) if len(parts) == 3 else m
    return squeezed_vacuum_state(m, r0, k)


def cmd_synthesize(args) -> int:
    u = _load_unitary(args)
    if unitarity_defect(u) > 1e-8:
        print(f"error: input matrix is not unitary (defect {unitarity_defect(u):.3e})", file=sys.stderr)
        return EXIT_FAILURE
    try:
        plan = clements_decompose(u)
        sched = universal_schedule(u)
    except SynthesisError as exc:
        print(f"error: synthesis failed: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    m = u.shape[0]
    term = brickwork_graph(m, universal_depth(m))
    rel = evaluate(term, sched)
    err = float(np.linalg.norm(rel.gate - symplectic_of_unitary(u)))
    payload = {
        "M": m,
        "depth": universal_depth(m),
        "plan": json.loads(plan.to_json()),
        "schedule": json.loads(sched.to_json()),
        "reconstruction_error": err,
    }
    _write(args.out, json.dumps(payload, sort_keys=True) + "\n")
    print(f"reconstruction error: {_fmt(err)}")
    return EXIT_OK if err < RECONSTRUCTION_TOL else EXIT_FAILURE


def cmd_threshold(args) -> int:
    u = _load_unitary(args)
    try:
        nnt = noise_gram(u)
        report = easiness_threshold(u, nnt=nnt)
        if args.beta:
            v_in = _parse_input_state(args.input, u.shape[0]).cov
            for beta in args.beta:
                report.r_hardness[beta] = hardness_threshold(u, v_in, beta, nnt=nnt)
    except SynthesisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    _write(args.out, json.dumps(report.to_dict(), sort_keys=True) + "\n")
    return EXIT_OK


def cmd_sweep(args) -> int:
    m_list = [int(tok) for tok in args.M.split(",") if tok]
    result = sweep_easiness(m_list, args.trials, args.seed)
    lines = ["M,trial,r_easiness,lambda_min,frobenius"]
    for m, trial, r, lam, frob in result.rows:
        lines.append(f"{m},{trial},{_fmt(r)},{_fmt(lam)},{_fmt(frob)}")
    _write(args.out, "\n".join(lines) + "\n")
    summary = json.dumps(result.to_dict(), sort_keys=True)
    if args.summary:
        _write(args.summary, summary + "\n")
    else:
        print(summary)
    return EXIT_OK


def cmd_sample(args) -> int:
    u = _load_unitary(args)
    m = u.shape[0]
    if args.oracle and m > ORACLE_MODE_CAP:
        print(f"error: --oracle supports at most {ORACLE_MODE_CAP} modes", file=sys.stderr)
        return EXIT_USAGE
    rho_in = _parse_input_state(args.input, m)
    try:
        state = output_state(u, rho_in, args.r)
    except SynthesisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    if not simulable(state):
        print(
            "error: non-simulable regime: the sampler needs V - I/2 > 0, i.e. the "
            f"noise Gram must dominate e^{{2r}} = {math.exp(2 * args.r):.6g}; lower r",
            file=sys.stderr,
        )
        return EXIT_REGIME
    try:
        shots = sample(state, args.shots, args.seed)
    except NonSimulableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REGIME
    if args.format == "csv":
        lines = ["shot," + ",".join(f"n{i+1}" for i in range(m))]
        for idx, row in enumerate(shots):
            lines.append(f"{idx}," + ",".join(str(int(v)) for v in row))
        _write(args.out, "\n".join(lines) + "\n")
    else:
        lines = [json.dumps({"shot": idx, "counts": [int(v) for v in row]}) for idx, row in enumerate(shots)]
        _write(args.out, "\n".join(lines) + "\n")
    freqs = empirical_frequencies(shots)
    summary: dict = {
        "M": m,
        "r": args.r,
        "shots": args.shots,
        "seed": args.seed,
        "frequencies": {",".join(map(str, k)): v for k, v in sorted(freqs.items())},
    }
    if args.oracle:
        patterns = [p for p in freqs if sum(p) <= 2]
        tvd = distribution_tvd(freqs, lambda p: gbs_probability(state.cov, p), patterns)
        summary["oracle_tvd"] = tvd
        print(f"TVD vs oracle over {len(patterns)} patterns: {_fmt(tvd)}")
    if args.summary:
        _write(args.summary, json.dumps(summary, sort_keys=True) + "\n")
    return EXIT_OK


def _add_unitary_source(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--haar", type=int, metavar="M", help="Haar-random M-mode circuit")
    src.add_argument("--unitary", metavar="FILE", help='JSON file with {"re": [[..]], "im": [[..]]}')


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mblo", description=__doc__)
    parser.add_argument("--version", action="version", version=f"mblo {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synthesize", help="decompose a circuit into a brickwork schedule")
    _add_unitary_source(p)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out", help="output JSON path (stdout if omitted)")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("threshold", help="easiness/hardness squeezing thresholds")
    _add_unitary_source(p)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--beta", type=float, action="append", help="TVD target for the hardness threshold (repeatable)")
    p.add_argument("--input", default="vacuum", help="input state: vacuum | squeezed:R0[:K]")
    p.add_argument("--out", help="output JSON path")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("sweep", help="easiness thresholds over Haar-random circuits")
    p.add_argument("--M", required=True, help="comma-separated mode counts, e.g. 10,20")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--summary", help="JSON summary path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("sample", help="classically sample the output state below threshold")
    _add_unitary_source(p)
    p.add_argument("--r", type=float, required=True, help="squeezing level")
    p.add_argument("--input", default="vacuum", help="input state: vacuum | squeezed:R0[:K]")
    p.add_argument("--shots", type=int, default=10000)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p.add_argument("--out", help="samples output path")
    p.add_argument("--summary", help="JSON summary path")
    p.add_argument("--oracle", action="store_true", help="compare against exact pattern probabilities (M <= 3)")
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
