"""Command-line interface: ``rankone analyze | sweep | compare | selftest``.

Exit codes: 0 success, 1 input or I/O error, 2 numerical failure,
3 self-test failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .errors import AnalysisUnavailable, ConsistencyError, NumericalFailure, ProblemFileError
from .fileio import (
    atomic_write,
    csv_text,
    fmt_complex,
    fmt_poly,
    fmt_real,
    load_problem_file,
    render_svg,
    track_rows,
    write_track_csv,
)
from .oracle import (
    analytic_branches,
    approx_error,
    branch_values,
    fit_exponent,
    predicted_exponent,
    sweep,
)
from .perturb import analyze, finite_clusters, infinity_expansion

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERICAL = 2
EXIT_SELFTEST = 3
DEFAULT_STEPS = 200


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; that code is reserved
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _use_color(stream):
    return "NO_COLOR" not in os.environ and hasattr(stream, "isatty") and stream.isatty()


def _t_list(text):
    try:
        vals = [float(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from None
    if not vals or any(not np.isfinite(v) or v <= 0 for v in vals):
        raise argparse.ArgumentTypeError("t values must be positive and finite")
    return vals


def _positive(text):
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not np.isfinite(val) or val <= 0:
        raise argparse.ArgumentTypeError("t must be positive and finite")
    return val


def _steps(text):
    try:
        val = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if val < 8:
        raise argparse.ArgumentTypeError("steps must be at least 8")
    return val


def build_parser():
    p = _Parser(prog="rankone",
                description="Eigenvalue asymptotics of rank-one perturbations A + tau u v*.")
    sub = p.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    a = sub.add_parser("analyze", help="moments, p_uv and expansion coefficients")
    a.add_argument("file")
    a.add_argument("--json", action="store_true", help="machine-readable output")

    s = sub.add_parser("sweep", help="oracle tracks at |tau| = t as CSV and SVG")
    s.add_argument("file")
    s.add_argument("--t", type=_positive, help="radius |tau| (default: first t in file)")
    s.add_argument("--steps", type=_steps, help=f"theta samples (default {DEFAULT_STEPS})")
    s.add_argument("--order", type=int, choices=(1, 2, 3), default=1)
    s.add_argument("--csv", metavar="PATH", help="CSV output path (default: stdout)")
    s.add_argument("--svg", metavar="PATH", help="SVG output path")

    c = sub.add_parser("compare", help="expansion error against the oracle over several t")
    c.add_argument("file")
    c.add_argument("--t", type=_t_list, help="comma- or space-separated radii")
    c.add_argument("--order", type=int, choices=(1, 2, 3), default=1)
    c.add_argument("--steps", type=_steps, default=64)

    sub.add_parser("selftest", help="run the built-in checks")
    return p


# -- analyze ----------------------------------------------------------------

def _analysis_bundle(pf):
    an = analyze(pf.instance, **({"moment_zero_tol": pf.tolerances["moment_zero_tol"]}
                                 if "moment_zero_tol" in pf.tolerances else {}))
    if an.is_degenerate:
        return an, None, []
    exp = infinity_expansion(an)
    clusters = finite_clusters(pf.instance, an, pf.tolerances.get("cluster_tol"))
    return an, exp, clusters


def _pair(z):
    if z is None:
        return None
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _analysis_dict(inst, an, exp, clusters):
    d = {
        "label": inst.label,
        "n": inst.n,
        "m_A": [_pair(c) for c in an.minpoly.m_A.coeffs],
        "l": an.l,
        "classification": an.classification.value,
        "kappa": an.kappa,
        "p_uv": [_pair(c) for c in an.p_uv.coeffs],
    }
    if exp is not None:
        d["infinity"] = {"branches": exp.branch_count, "c_minus1": _pair(exp.c_minus1),
                         "c0": _pair(exp.c0), "c1": _pair(exp.c1)}
    d["clusters"] = [
        {"id": c.cluster_id, "zeta": _pair(c.zeta), "k": c.k,
         "collides_with_sigma_A": c.collides_with_mA,
         "b1": _pair(c.b1), "b2": _pair(c.b2)}
        for c in clusters
    ]
    return d


def _analysis_text(inst, an, exp, clusters):
    out = []
    if inst.label:
        out.append(f"instance        {inst.label} (n = {inst.n})")
    out.append(f"m_A(λ)          {fmt_poly(an.minpoly.m_A)}")
    out.append(f"l               {an.l}")
    out.append(f"classification  {an.classification.value}")
    if an.is_degenerate:
        out.append("p_uv(λ)         0")
        out.append("spectrum of A + τuv* equals spectrum of A for every τ")
        return "\n".join(out) + "\n"
    out.append(f"κ               {an.kappa}")
    out.append(f"p_uv(λ)         {fmt_poly(an.p_uv)}")
    out.append(f"branches to ∞   {exp.branch_count}")
    out.append(f"c_-1            {fmt_complex(exp.c_minus1)}")
    out.append(f"c_0             {fmt_complex(exp.c0)}")
    out.append(f"c_1             {fmt_complex(exp.c1)}")
    if not clusters:
        out.append("no finite limit points")
    for c in clusters:
        out.append(f"cluster-{c.cluster_id}       ζ = {fmt_complex(c.zeta)}, k = {c.k}")
        if c.collides_with_mA:
            out.append("                ζ is an eigenvalue of A: expansion does not apply")
        else:
            out.append(f"                b_1 = {fmt_complex(c.b1)}, b_2 = {fmt_complex(c.b2)}")
    return "\n".join(out) + "\n"


def cmd_analyze(pf, as_json, stdout):
    an, exp, clusters = _analysis_bundle(pf)
    if as_json:
        stdout.write(json.dumps(_analysis_dict(pf.instance, an, exp, clusters), indent=2) + "\n")
    else:
        stdout.write(_analysis_text(pf.instance, an, exp, clusters))
    return EXIT_OK


# -- sweep ------------------------------------------------------------------

def _curve_grid(steps):
    return 2 * np.pi * np.arange(steps + 1) / steps


def cmd_sweep(pf, t, steps, order, out_csv, out_svg, stdout, stderr=None):
    inst = pf.instance
    an, exp, clusters = _analysis_bundle(pf)
    sw = sweep(inst, t, steps)
    rep = approx_error(inst, an, t, steps, order, exp, clusters, sw=sw)
    curves = {b.branch_id: branch_values(b, exp, t, sw.thetas)
              for b in analytic_branches(exp, clusters, order)} if exp is not None else {}
    rows = track_rows(sw, rep, curves, clusters)
    svg = None
    if out_svg:
        grid = _curve_grid(steps)
        first = ([branch_values(b, exp, t, grid) for b in analytic_branches(exp, clusters, 1)]
                 if exp is not None else [])
        higher = ([branch_values(b, exp, t, grid) for b in analytic_branches(exp, clusters, order)]
                  if exp is not None and order > 1 else [])
        pts = np.concatenate([sw.tracks.ravel(), sw.persistent_tracks.ravel()])
        svg = render_svg(pts, first, higher, title=f"{inst.label} t={fmt_real(t)}".strip())
    target = out_csv
    try:
        if out_csv:
            write_track_csv(out_csv, rows)
        else:
            stdout.write(csv_text(rows))
        target = out_svg
        if svg is not None:
            atomic_write(out_svg, svg)
    except OSError as exc:
        raise ProblemFileError(f"cannot write {target}: {exc.strerror or exc}") from None
    for w in sw.warnings:
        print(f"warning: {w}", file=stderr or sys.stderr)
    return EXIT_OK


# -- compare ----------------------------------------------------------------

def cmd_compare(pf, t_list, order, steps, stdout):
    inst = pf.instance
    an, exp, clusters = _analysis_bundle(pf)
    if an.is_degenerate:
        stdout.write("fully degenerate: the spectrum does not move, nothing to compare\n")
        return EXIT_OK
    t_list = sorted(t_list)
    ids, targets, table = [], {}, []
    for t in t_list:
        rep = approx_error(inst, an, t, steps, order, exp, clusters)
        row = {b.branch_id: b for b in rep.branches}
        for b in rep.branches:
            if b.branch_id not in targets:
                ids.append(b.branch_id)
                targets[b.branch_id] = b.target
        table.append(row)
    body = []
    for t, row in zip(t_list, table):
        cells = [fmt_real(row[i].max_error) + ("*" if row[i].ambiguous else "")
                 if i in row else "-" for i in ids]
        body.append([fmt_real(t)] + cells)
    exps, preds = [], []
    for i in ids:
        pairs = [(t, row[i].max_error) for t, row in zip(t_list, table) if i in row]
        slope, exact = fit_exponent([p[0] for p in pairs], [p[1] for p in pairs])
        exps.append("exact" if exact else ("-" if slope is None else fmt_real(round(slope, 4))))
        preds.append(fmt_real(round(predicted_exponent(targets[i], order, an, clusters), 4)))
    grid = [["t"] + ids] + body + [["exponent"] + exps, ["predicted"] + preds]
    width = max(len(c) for r in grid for c in r) + 2
    out = [f"order {order} truncation, max |oracle - expansion| over theta ({steps} samples)"]
    out += ["".join(c.ljust(width) for c in r) for r in grid]
    if any(b.ambiguous for row in table for b in row.values()):
        out.append("* track assignment ambiguous at this t")
    stdout.write("\n".join(line.rstrip() for line in out) + "\n")
    return EXIT_OK


# -- selftest ---------------------------------------------------------------

def cmd_selftest(stdout):
    from .selftest import format_report, run_selftest

    checks = run_selftest()
    stdout.write(format_report(checks, color=_use_color(stdout)))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_SELFTEST


# -- entry point ------------------------------------------------------------

def _fail(stderr, msg):
    prefix = "\033[31merror\033[0m" if _use_color(stderr) else "error"
    print(f"{prefix}: {msg}", file=stderr)


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        parser.print_usage(stderr)
        print(exc, file=stderr)
        return EXIT_INPUT
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_INPUT

    if args.command == "selftest":
        return cmd_selftest(stdout)
    try:
        pf = load_problem_file(args.file)
    except ProblemFileError as exc:
        _fail(stderr, exc)
        return EXIT_INPUT
    try:
        with np.errstate(all="ignore"):
            return _dispatch(args, pf, stdout, stderr)
    except ProblemFileError as exc:
        _fail(stderr, exc)
        return EXIT_INPUT
    except (NumericalFailure, ConsistencyError, AnalysisUnavailable,
            ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        _fail(stderr, f"numerical failure: {exc}")
        return EXIT_NUMERICAL


def _dispatch(args, pf, stdout, stderr):
    if args.command == "analyze":
        return cmd_analyze(pf, args.json, stdout)
    if args.command == "sweep":
        t = args.t if args.t is not None else (pf.t_values[0] if pf.t_values else None)
        if t is None:
            _fail(stderr, "sweep needs --t or a t value in the problem file")
            return EXIT_INPUT
        steps = args.steps or pf.steps or DEFAULT_STEPS
        return cmd_sweep(pf, t, steps, args.order, args.csv, args.svg, stdout, stderr)
    t_list = args.t or list(pf.t_values)
    if not t_list:
        _fail(stderr, "compare needs --t or t values in the problem file")
        return EXIT_INPUT
    return cmd_compare(pf, t_list, args.order, args.steps, stdout)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
