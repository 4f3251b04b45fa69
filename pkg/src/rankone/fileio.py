"""Problem files, track CSV files and SVG figures.

A problem file is a JSON document::

    {
      "label": "generic",
      "A": [[-1, 0, 0], [0, 0, 0], [0, 0, 1]],
      "u": [1, 1, 1],
      "v": [1, 2, [3, 0]],
      "t": [1.0],
      "steps": 200,
      "tolerances": {"moment_zero_tol": 1e-10, "cluster_tol": 1e-6}
    }

Complex numbers are ``[re, im]`` pairs; a plain number ``x`` stands for
``[x, 0]``.  Only ``A``, ``u`` and ``v`` are required.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .errors import ProblemFileError
from .perturb import ProblemInstance

__all__ = [
    "ProblemFile",
    "load_problem_file",
    "parse_problem",
    "problem_to_json",
    "fmt_real",
    "fmt_complex",
    "fmt_poly",
    "CSV_HEADER",
    "track_rows",
    "csv_text",
    "write_track_csv",
    "read_track_csv",
    "render_svg",
    "atomic_write",
]

_TOLERANCE_KEYS = ("moment_zero_tol", "cluster_tol")


@dataclass(frozen=True, eq=False)
class ProblemFile:
    instance: ProblemInstance
    label: str = ""
    t_values: tuple = ()
    steps: int | None = None
    tolerances: dict = field(default_factory=dict)


def _number(x, where):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ProblemFileError(f"field {where}: expected a number, got {json.dumps(x)[:40]}")
    try:
        x = float(x)
    except OverflowError:
        raise ProblemFileError(f"field {where}: number out of range") from None
    if not math.isfinite(x):
        raise ProblemFileError(f"field {where}: number must be finite")
    return x


def _complex(x, where):
    if isinstance(x, list):
        if len(x) != 2:
            raise ProblemFileError(f"field {where}: complex pair must have 2 entries, got {len(x)}")
        return complex(_number(x[0], f"{where}[0]"), _number(x[1], f"{where}[1]"))
    return complex(_number(x, where), 0.0)


def _vector(x, where):
    if not isinstance(x, list) or not x:
        raise ProblemFileError(f"field {where}: expected a non-empty array")
    return [_complex(e, f"{where}[{i}]") for i, e in enumerate(x)]


def load_problem_file(path):
    """Read and validate a problem file.

    Raises
    ------
    ProblemFileError
        On unreadable files, malformed JSON (with line and column) or
        invalid fields (with the field path).
    """
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise ProblemFileError(f"{path}: cannot read file: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(
            f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    except (ValueError, RecursionError) as exc:
        raise ProblemFileError(f"{path}: malformed document: {exc}") from None
    try:
        return _parse_document(doc)
    except ProblemFileError as exc:
        raise ProblemFileError(f"{path}: {exc}") from None


def _parse_document(doc):
    if not isinstance(doc, dict):
        raise ProblemFileError("top level must be an object")
    for key in ("A", "u", "v"):
        if key not in doc:
            raise ProblemFileError(f"missing required field {key!r}")

    rows = doc["A"]
    if not isinstance(rows, list) or not rows:
        raise ProblemFileError("field A: expected a non-empty array of rows")
    A = [_vector(r, f"A[{i}]") for i, r in enumerate(rows)]
    n = len(A)
    for i, r in enumerate(A):
        if len(r) != n:
            raise ProblemFileError(
                f"field A[{i}]: row has {len(r)} entries, matrix has {n} rows")
    u = _vector(doc["u"], "u")
    v = _vector(doc["v"], "v")
    for name, vec in (("u", u), ("v", v)):
        if len(vec) != n:
            raise ProblemFileError(
                f"field {name}: length {len(vec)} does not match dimension {n} of A")

    label = doc.get("label", "")
    if not isinstance(label, str):
        raise ProblemFileError("field label: expected a string")
    t_raw = doc.get("t", [])
    if not isinstance(t_raw, list):
        t_raw = [t_raw]
    t_values = tuple(_number(x, f"t[{i}]") for i, x in enumerate(t_raw))
    if any(t <= 0 for t in t_values):
        raise ProblemFileError("field t: values must be positive")
    steps = doc.get("steps")
    if steps is not None and (isinstance(steps, bool) or not isinstance(steps, int) or steps < 8):
        raise ProblemFileError("field steps: expected an integer >= 8")
    tol_raw = doc.get("tolerances", {})
    if not isinstance(tol_raw, dict):
        raise ProblemFileError("field tolerances: expected an object")
    tolerances = {}
    for key, val in tol_raw.items():
        if key not in _TOLERANCE_KEYS:
            raise ProblemFileError(f"field tolerances.{key}: unknown tolerance")
        val = _number(val, f"tolerances.{key}")
        if val <= 0:
            raise ProblemFileError(f"field tolerances.{key}: must be positive")
        tolerances[key] = val

    inst = ProblemInstance(np.array(A), u, v, label=label)
    return ProblemFile(inst, label, t_values, steps, tolerances)


def parse_problem(path):
    """The :class:`ProblemInstance` described by a problem file."""
    return load_problem_file(path).instance


def problem_to_json(inst, **extra):
    def pair(z):
        return [float(z.real), float(z.imag)]

    doc = {"label": inst.label} if inst.label else {}
    doc["A"] = [[pair(z) for z in row] for row in inst.A]
    doc["u"] = [pair(z) for z in inst.u]
    doc["v"] = [pair(z) for z in inst.v]
    doc.update(extra)
    return json.dumps(doc, indent=2) + "\n"


# -- number formatting ------------------------------------------------------

def fmt_real(x):
    """12 significant digits, lowercase exponent, no negative zero."""
    s = format(float(x), ".12g")
    return "0" if s == "-0" else s


def fmt_complex(z):
    z = complex(z)
    if z.imag == 0:
        return fmt_real(z.real)
    im = fmt_real(abs(z.imag))
    if z.real == 0:
        return ("-" if z.imag < 0 else "") + im + "i"
    return f"{fmt_real(z.real)}{'-' if z.imag < 0 else '+'}{im}i"


def fmt_poly(p, var="λ"):
    if p.is_zero:
        return "0"
    terms = []
    for j in range(p.degree(), -1, -1):
        c = complex(p.coeffs[j])
        if c == 0:
            continue
        mono = "" if j == 0 else (var if j == 1 else f"{var}^{j}")
        if c.imag == 0:
            sign = "-" if c.real < 0 else "+"
            mag = abs(c.real)
            body = fmt_real(mag) if (mag != 1 or not mono) else ""
        else:
            sign = "+"
            body = f"({fmt_complex(c)})"
        terms.append((sign, body + mono))
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


# -- CSV --------------------------------------------------------------------

CSV_HEADER = ("theta", "branch", "kind", "re", "im", "approx_re", "approx_im", "abs_err")


def _nearest_target(z_track, expansion_vals, clusters):
    """Label an unassigned track by the closest analytic curve or cluster."""
    best, label = math.inf, "infinity"
    for tgt, vals in expansion_vals:
        d = float(np.mean(np.abs(z_track - vals)))
        if d < best:
            best, label = d, tgt
    for c in clusters:
        d = float(np.mean(np.abs(z_track - c.zeta)))
        if d < best:
            best, label = d, f"cluster-{c.cluster_id}"
    return label


def track_rows(sw, report, branch_curves, clusters):
    """Rows of the track CSV, ordered by theta, then branch.

    ``branch_curves`` maps ``branch_id`` to analytic values on the sweep grid.
    """
    assigned = {b.track: b for b in report.branches}
    kinds, approx = {}, {}
    inf_vals = [(b.target, branch_curves[b.branch_id]) for b in report.branches]
    for i in range(sw.tracks.shape[0]):
        if i in assigned:
            b = assigned[i]
            kinds[i] = "infinity" if b.target == "infinity" else b.target
            approx[i] = branch_curves[b.branch_id]
        else:
            kinds[i] = _nearest_target(sw.tracks[i], inf_vals, clusters)
            approx[i] = None
    m = sw.tracks.shape[0]
    rows = []
    for j, th in enumerate(sw.thetas):
        for i in range(m):
            z = sw.tracks[i, j]
            a = approx[i]
            if a is None:
                rows.append((fmt_real(th), str(i), kinds[i], fmt_real(z.real),
                             fmt_real(z.imag), "", "", ""))
            else:
                rows.append((fmt_real(th), str(i), kinds[i], fmt_real(z.real), fmt_real(z.imag),
                             fmt_real(a[j].real), fmt_real(a[j].imag), fmt_real(abs(z - a[j]))))
        for p, alpha in enumerate(sw.persistent):
            z = sw.persistent_tracks[p, j]
            rows.append((fmt_real(th), str(m + p), "persistent", fmt_real(z.real),
                         fmt_real(z.imag), fmt_real(alpha.real), fmt_real(alpha.imag),
                         fmt_real(abs(z - alpha))))
    return rows


def csv_text(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    w.writerows(rows)
    return buf.getvalue()


def atomic_write(path, text):
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_track_csv(path, rows):
    atomic_write(path, csv_text(rows))


def read_track_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ProblemFileError(f"{path}: unexpected CSV header {reader.fieldnames}")
        return list(reader)


# -- SVG --------------------------------------------------------------------

SVG_SIZE = 800
ORACLE_COLOR = "#d62728"
FIRST_ORDER_COLOR = "#1f4fd6"
HIGHER_ORDER_COLOR = "#2ca02c"


def render_svg(points, first_order_curves, higher_order_curves, title=""):
    """SVG 1.1 scatter of ``points`` (red) with blue and green polylines.

    Axes have equal aspect and are fitted to all data with a 10% margin.
    """
    pts = np.asarray(points, dtype=complex).ravel()
    allz = [pts] + [np.asarray(c) for c in first_order_curves] + \
        [np.asarray(c) for c in higher_order_curves]
    allz = np.concatenate([z.ravel() for z in allz]) if allz else np.zeros(0, complex)
    if allz.size == 0:
        allz = np.array([0j])
    xmin, xmax = allz.real.min(), allz.real.max()
    ymin, ymax = allz.imag.min(), allz.imag.max()
    span = max(xmax - xmin, ymax - ymin)
    if span == 0:
        span = max(1.0, abs(allz[0]))
    span *= 1.2
    cx, cy = (xmin + xmax) / 2, (ymin + ymax) / 2
    scale = SVG_SIZE / span
    half = SVG_SIZE / 2

    def xy(z):
        return (half + (z.real - cx) * scale, half - (z.imag - cy) * scale)

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{SVG_SIZE}" height="{SVG_SIZE}" viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">',
    ]
    if title:
        out.append(f"<title>{_escape(title)}</title>")
    out.append(f'<rect x="0" y="0" width="{SVG_SIZE}" height="{SVG_SIZE}" fill="white"/>')
    ox, oy = xy(0j)
    if 0 <= ox <= SVG_SIZE:
        out.append(f'<line x1="{ox:.3f}" y1="0" x2="{ox:.3f}" y2="{SVG_SIZE}" '
                   'stroke="#bbbbbb" stroke-width="1"/>')
    if 0 <= oy <= SVG_SIZE:
        out.append(f'<line x1="0" y1="{oy:.3f}" x2="{SVG_SIZE}" y2="{oy:.3f}" '
                   'stroke="#bbbbbb" stroke-width="1"/>')
    for color, curves in ((FIRST_ORDER_COLOR, first_order_curves),
                          (HIGHER_ORDER_COLOR, higher_order_curves)):
        for c in curves:
            coords = " ".join("{:.3f},{:.3f}".format(*xy(z)) for z in np.asarray(c).ravel())
            out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" '
                       'stroke-width="1.5"/>')
    for z in pts:
        x, y = xy(z)
        out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="2" fill="{ORACLE_COLOR}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(s):
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
