"""Benchmark CLI: generate matrices, run method grids, compare runs.

Subcommands:

* ``gen``      emit a builtin matrix as a Matrix Market file;
* ``run``      execute one or more methods on a problem, one CSV per
               method plus a combined comparison CSV;
* ``compare``  summarize previously written run CSVs.

Run CSVs are deterministic given the run spec: header lines prefixed with
``#`` carry the full spec and library version, followed by the fixed
column order ``outer_k, ritz_value, abs_error, resnorm, a_matvecs,
inner_matvecs`` with 17-significant-digit floats.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from spameig import __version__
from spameig.approx import ApproxSpec, build_approx
from spameig.linop import DensifyCapError, ShiftedNegatedOperator
from spameig.problems import (
    BandedSpec,
    MatrixMarketError,
    ReactionDiffusionSpec,
    gen_banded,
    gen_reaction_diffusion_1d,
    load_matrix_market,
    write_matrix_market,
)
from spameig.solvers import SolverConfig, StartVector, Target, run_outer

CSV_COLUMNS = ("outer_k", "ritz_value", "abs_error", "resnorm",
               "a_matvecs", "inner_matvecs")


class CliError(ValueError):
    """Configuration error; maps to exit code 2."""


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def parse_matrix_token(token):
    if token.startswith("builtin:"):
        parts = token.split(":")
        if len(parts) != 3:
            raise CliError(f"malformed builtin matrix spec {token!r}")
        family, args = parts[1], parts[2]
        if family == "banded":
            pieces = args.split(",")
            if len(pieces) != 3:
                raise CliError("builtin:banded needs n,q,eps")
            try:
                return ("banded", int(pieces[0]), int(pieces[1]), float(pieces[2]))
            except ValueError as exc:
                raise CliError(f"bad banded parameters: {exc}") from None
        if family == "rd1d":
            try:
                return ("rd1d", int(args))
            except ValueError:
                raise CliError("builtin:rd1d needs an integer size") from None
        raise CliError(f"unknown builtin matrix family {family!r}")
    return ("file", token)


def build_matrix(parsed):
    """Instantiate the matrix (and the reaction part for rd1d problems)."""
    kind = parsed[0]
    if kind == "banded":
        _, n, q, eps = parsed
        try:
            return gen_banded(BandedSpec(n=n, q=q, eps=eps)), None
        except ValueError as exc:
            raise CliError(str(exc)) from None
    if kind == "rd1d":
        try:
            a, _, r = gen_reaction_diffusion_1d(ReactionDiffusionSpec(n=parsed[1]))
        except ValueError as exc:
            raise CliError(str(exc)) from None
        return a, r
    path = parsed[1]
    if not os.path.exists(path):
        raise CliError(f"matrix file not found: {path}")
    try:
        return load_matrix_market(path), None
    except MatrixMarketError as exc:
        raise CliError(f"{path}: {exc}") from None


def parse_approx_token(token):
    if token == "zero":
        return ApproxSpec.zero()
    if token == "diag":
        return ApproxSpec.diagonal_part()
    if token == "natural-reaction":
        return "natural-reaction"
    if token.startswith("alphaI:"):
        try:
            return ApproxSpec.scaled_identity(float(token.split(":", 1)[1]))
        except ValueError:
            raise CliError(f"bad shift in {token!r}") from None
    if token.startswith("band:"):
        try:
            return ApproxSpec.band_cutoff(int(token.split(":", 1)[1]))
        except ValueError:
            raise CliError(f"bad bandwidth in {token!r}") from None
    if token.startswith("lowrank:"):
        try:
            return ApproxSpec.algebraic_from_below(m=int(token.split(":", 1)[1]))
        except ValueError:
            raise CliError(f"bad retained size in {token!r}") from None
    raise CliError(f"unknown approximation {token!r}")


def parse_method_token(token):
    if token in ("lanczos", "fullspam", "spam1"):
        return token, None
    for prefix, strategy in (("spam1l:", "spam1l"), ("jd:", "jd"), ("jd1:", "jd1")):
        if token.startswith(prefix):
            try:
                ell = int(token.split(":", 1)[1])
            except ValueError:
                raise CliError(f"bad step count in {token!r}") from None
            if ell < 1:
                raise CliError(f"step count must be >= 1 in {token!r}")
            return strategy, ell
    raise CliError(f"unknown method {token!r}")


def parse_target_token(token):
    if token == "largest":
        return Target.largest()
    if token.startswith("p:"):
        try:
            return Target.p_th_largest(int(token.split(":", 1)[1]))
        except ValueError:
            raise CliError(f"bad index in {token!r}") from None
    if token.startswith("smallest:"):
        try:
            return Target.smallest_via_shift(float(token.split(":", 1)[1]))
        except ValueError:
            raise CliError(f"bad shift in {token!r}") from None
    raise CliError(f"unknown target {token!r}")


def parse_start_token(token):
    if token == "eigvec":
        return StartVector.eigvec_of_a0()
    if token.startswith("random:"):
        try:
            return StartVector.random(int(token.split(":", 1)[1]))
        except ValueError:
            raise CliError(f"bad seed in {token!r}") from None
    raise CliError(f"unknown start policy {token!r}")


def _execute_single(matrix_token, approx_token, method_token, target_token,
                    tol, max_outer, start_token):
    """Build fresh operators and run one method (isolated counters)."""
    a, reaction = build_matrix(parse_matrix_token(matrix_token))
    target = parse_target_token(target_token)
    approx = parse_approx_token(approx_token)
    strategy, ell = parse_method_token(method_token)
    start = parse_start_token(start_token)

    if approx == "natural-reaction":
        if reaction is None:
            raise CliError("natural-reaction is only valid with builtin rd1d "
                           "matrices")
        if target.kind == "smallest":
            raise CliError("natural-reaction does not approximate the shifted "
                           "matrix; use an explicit approximation for "
                           "smallest-eigenvalue runs")
        a0 = reaction
    else:
        base = ShiftedNegatedOperator(target.alpha, a) \
            if target.kind == "smallest" else a
        try:
            a0 = build_approx(base, approx)
        except ValueError as exc:
            raise CliError(str(exc)) from None

    config = SolverConfig(strategy=strategy, target=target, ell=ell,
                          tol=tol, max_outer=max_outer, start=start)
    return run_outer(a, a0, config)


def write_run_csv(path, meta, result):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(f"# spameig {__version__}\n")
        for key, value in meta.items():
            handle.write(f"# {key}={value}\n")
        handle.write(f"# threshold={_fmt(result.threshold)}\n")
        handle.write(f"# reference_value={_fmt(result.reference_value)}\n")
        handle.write(f"# converged={'true' if result.converged else 'false'}\n")
        handle.write(f"# iterations={result.iterations}\n")
        handle.write(",".join(CSV_COLUMNS) + "\n")
        for rec in result.records:
            handle.write(",".join([
                str(rec.outer_k),
                _fmt(rec.ritz_value),
                _fmt(rec.abs_error),
                _fmt(rec.resnorm),
                str(rec.a_matvecs),
                str(rec.inner_matvecs),
            ]) + "\n")


def read_run_csv(path):
    """Parse a run CSV back into (meta dict, row dicts)."""
    meta = {}
    rows = []
    header = None
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.rstrip("\n")
            if line.startswith("# "):
                body = line[2:]
                if "=" in body:
                    key, value = body.split("=", 1)
                    meta[key] = value
                else:
                    meta.setdefault("generator", body)
                continue
            if header is None:
                header = line.split(",")
                continue
            parts = line.split(",")
            rows.append(dict(zip(header, parts)))
    return meta, rows


def _summary_entry(meta, rows):
    iterations = meta.get("iterations", rows[-1]["outer_k"] if rows else "0")
    converged = meta.get("converged", "false") == "true"
    last = rows[-1] if rows else {"a_matvecs": "0", "inner_matvecs": "0"}
    return {
        "method": meta.get("method", "?"),
        "iterations": int(iterations),
        "converged": converged,
        "a_matvecs": int(last["a_matvecs"]),
        "inner_matvecs": int(last["inner_matvecs"]),
    }


def compare_table(entries):
    """Aligned text table summarizing runs; '*' marks non-converged."""
    header = ("method", "iterations", "a_matvecs", "inner_matvecs")
    rows = [header]
    for e in entries:
        iters = str(e["iterations"]) + ("" if e["converged"] else "*")
        rows.append((e["method"], iters, str(e["a_matvecs"]),
                     str(e["inner_matvecs"])))
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    lines = []
    for r in rows:
        lines.append("  ".join(col.ljust(w) if i == 0 else col.rjust(w)
                               for i, (col, w) in enumerate(zip(r, widths))))
    return "\n".join(lines)


def write_comparison_csv(path, entries):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("method,iterations,converged,a_matvecs,inner_matvecs\n")
        for e in entries:
            handle.write(f"{e['method']},{e['iterations']},"
                         f"{'true' if e['converged'] else 'false'},"
                         f"{e['a_matvecs']},{e['inner_matvecs']}\n")


def _cmd_gen(args):
    parsed = parse_matrix_token(args.matrix)
    if parsed[0] == "file":
        raise CliError("gen needs a builtin matrix spec")
    op, _ = build_matrix(parsed)
    write_matrix_market(args.out, op, comments=(f"spameig gen {args.matrix}",))
    print(f"wrote {args.out} ({op.dim}x{op.dim}, {op.nnz_lower} stored entries)")
    return 0


def _cmd_run(args):
    os.makedirs(args.out, exist_ok=True)
    entries = []
    for method_token in args.method:
        result = _execute_single(args.matrix, args.approx, method_token,
                                 args.target, args.tol, args.max_outer,
                                 args.start)
        meta = {
            "matrix": args.matrix,
            "approx": args.approx,
            "method": method_token,
            "target": args.target,
            "tol": _fmt(args.tol),
            "max_outer": str(args.max_outer) if args.max_outer else "",
            "start": args.start,
            "seed": "" if result.seed is None else str(result.seed),
        }
        path = os.path.join(args.out, f"{result.label}.csv")
        write_run_csv(path, meta, result)
        print(f"wrote {path} ({result.iterations} iterations, "
              f"{'converged' if result.converged else 'not converged'})")
        entries.append({
            "method": method_token,
            "iterations": result.iterations,
            "converged": result.converged,
            "a_matvecs": result.records[-1].a_matvecs,
            "inner_matvecs": result.records[-1].inner_matvecs,
        })
    comparison = os.path.join(args.out, "comparison.csv")
    write_comparison_csv(comparison, entries)
    print(compare_table(entries))
    return 0


def _cmd_compare(args):
    entries = []
    for path in args.csv:
        if not os.path.exists(path):
            raise CliError(f"no such file: {path}")
        meta, rows = read_run_csv(path)
        entries.append(_summary_entry(meta, rows))
    print(compare_table(entries))
    if args.out:
        write_comparison_csv(args.out, entries)
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="spameig",
        description="Eigensolver benchmark harness for subspace projected "
                    "approximate matrix methods.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="emit a builtin matrix as Matrix Market")
    gen.add_argument("--matrix", required=True,
                     help="builtin:banded:n,q,eps or builtin:rd1d:n")
    gen.add_argument("--out", required=True, help="output .mtx path")

    run = sub.add_parser("run", help="run methods and write convergence CSVs")
    run.add_argument("--matrix", required=True,
                     help="builtin:banded:n,q,eps, builtin:rd1d:n or a .mtx path")
    run.add_argument("--approx", default="zero",
                     help="zero | alphaI:a | diag | band:q0 | lowrank:m | "
                          "natural-reaction")
    run.add_argument("--method", action="append", required=True,
                     help="lanczos | fullspam | spam1 | spam1l:L | jd:L | jd1:L "
                          "(repeatable)")
    run.add_argument("--target", default="largest",
                     help="largest | p:K | smallest:ALPHA")
    run.add_argument("--tol", type=float, default=1e-10)
    run.add_argument("--max-outer", type=int, default=None, dest="max_outer")
    run.add_argument("--start", default="random:0",
                     help="random:SEED | eigvec")
    run.add_argument("--out", default=".", help="output directory")

    compare = sub.add_parser("compare", help="summarize run CSVs")
    compare.add_argument("csv", nargs="+", help="run CSV files")
    compare.add_argument("--out", default=None, help="comparison CSV path")

    return parser


def cli_run(argv):
    """Entry point returning a process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_compare(args)
    except (CliError, MatrixMarketError, DensifyCapError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


def main():
    return cli_run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
