import io
import json
import random

import numpy as np
import pytest

from rankone import perturb
from rankone.cli import main
from rankone.fileio import read_track_csv
from rankone.selftest import run_selftest


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_analyze_generic(problems_dir):
    code, out, _ = run(["analyze", problems_dir / "generic.json"])
    assert code == 0
    assert "κ               0" in out
    assert "6λ^2 + 2λ - 2" in out
    assert "c_-1            6" in out and "0.333333" in out


def test_analyze_json(problems_dir):
    code, out, _ = run(["analyze", problems_dir / "generic.json", "--json"])
    d = json.loads(out)
    assert code == 0 and d["kappa"] == 0 and d["classification"] == "Regular"
    assert d["infinity"]["c_minus1"] == pytest.approx([6, 0])
    assert len(d["clusters"]) == 2


def test_analyze_collision_flag(problems_dir):
    code, out, _ = run(["analyze", problems_dir / "collision.json", "--json"])
    c = json.loads(out)["clusters"]
    assert code == 0 and len(c) == 1
    assert c[0]["k"] == 2 and c[0]["collides_with_sigma_A"] and c[0]["b1"] is None
    _, text, _ = run(["analyze", problems_dir / "collision.json"])
    assert "ζ is an eigenvalue of A" in text


def test_analyze_degenerate(problems_dir):
    code, out, _ = run(["analyze", problems_dir / "nilpotent.json"])
    assert code == 0 and "FullyDegenerate" in out and "for every τ" in out


def test_sweep_generic_files(problems_dir, tmp_path):
    csv_path, svg_path = tmp_path / "g.csv", tmp_path / "g.svg"
    code, _, _ = run(["sweep", problems_dir / "generic.json", "--t", 1, "--steps", 200,
                      "--csv", csv_path, "--svg", svg_path])
    assert code == 0
    rows = read_track_csv(csv_path)
    assert len(rows) == 600
    assert {r["kind"] for r in rows} == {"infinity", "cluster-1", "cluster-2"}
    svg = svg_path.read_text()
    assert svg.count("<polyline") == 3 and svg.count("<circle") == 600


def test_sweep_theta_increases_within_branch(problems_dir):
    _, out, _ = run(["sweep", problems_dir / "kappa_one.json", "--steps", 16])
    rows = [line.split(",") for line in out.strip().splitlines()[1:]]
    for b in {r[1] for r in rows}:
        th = [float(r[0]) for r in rows if r[1] == b]
        assert all(x < y for x, y in zip(th, th[1:]))


def test_sweep_order_three_svg(problems_dir, tmp_path):
    svg_path = tmp_path / "k.svg"
    code, _, _ = run(["sweep", problems_dir / "kappa_one.json", "--t", 4, "--order", 3,
                      "--svg", svg_path])
    svg = svg_path.read_text()
    assert code == 0
    assert svg.count('stroke="#1f4fd6"') == 3 and svg.count('stroke="#2ca02c"') == 3


def test_sweep_scalar_exact(problems_dir):
    code, out, _ = run(["sweep", problems_dir / "scalar.json", "--t", 2, "--order", 3])
    rows = [line.split(",") for line in out.strip().splitlines()[1:]]
    assert code == 0 and len(rows) == 200
    assert max(float(r[7]) for r in rows) <= 1e-12


def test_sweep_collision_persistent(problems_dir):
    _, out, _ = run(["sweep", problems_dir / "collision.json"])
    kinds = [line.split(",")[2] for line in out.strip().splitlines()[1:]]
    assert kinds.count("persistent") == 200 and len(kinds) == 600


def test_csv_round_trip_matches_oracle(problems_dir, tmp_path):
    from rankone.oracle import sweep

    csv_path = tmp_path / "r.csv"
    run(["sweep", problems_dir / "generic.json", "--t", 1, "--steps", 32, "--csv", csv_path])
    rows = read_track_csv(csv_path)
    inst = perturb.ProblemInstance(np.diag([-1.0, 0, 1]), [1, 1, 1], [1, 2, 3])
    sw = sweep(inst, 1.0, 32)
    for r in rows:
        j = round(float(r["theta"]) / (2 * np.pi / 32)) - 1
        z = complex(float(r["re"]), float(r["im"]))
        exact = sw.tracks[int(r["branch"]), j]
        assert abs(z - exact) <= 1e-11 * max(1.0, abs(exact))


def test_outputs_are_byte_identical(problems_dir, tmp_path):
    outs = []
    for k in range(2):
        c, s = tmp_path / f"{k}.csv", tmp_path / f"{k}.svg"
        run(["sweep", problems_dir / "kappa_one.json", "--t", 4, "--order", 2,
             "--csv", c, "--svg", s])
        outs.append((c.read_bytes(), s.read_bytes()))
    assert outs[0] == outs[1]


def test_compare_generic(problems_dir):
    code, out, _ = run(["compare", problems_dir / "generic.json", "--t", "1,10,100"])
    assert code == 0
    lines = out.splitlines()
    header = lines[1].split()
    col = header.index("cluster-2-1")
    errs = [float(lines[i].split()[col]) for i in (2, 3, 4)]
    assert errs[0] > errs[1] > errs[2]


def test_compare_infinity_exponent(problems_dir):
    _, out, _ = run(["compare", problems_dir / "generic.json", "--t", "100,1000,10000",
                     "--order", 2])
    row = next(line for line in out.splitlines() if line.startswith("exponent"))
    assert float(row.split()[1]) == pytest.approx(-1, abs=0.15)


def test_compare_exact_marker(problems_dir):
    _, out, _ = run(["compare", problems_dir / "scalar.json", "--t", "1 10 100", "--order", 3])
    row = next(line for line in out.splitlines() if line.startswith("exponent"))
    assert row.split()[1] == "exact"


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["sweep", "x.json", "--t", "-1"],
    ["sweep", "x.json", "--t", "1", "--order", "5"],
    ["compare", "x.json", "--t", "a,b"],
])
def test_usage_errors_exit_1(argv):
    assert run(argv)[0] == 1


def test_input_errors_exit_1(tmp_path, problems_dir):
    bad = tmp_path / "bad.json"
    bad.write_text('{"A": [[1, 2], [3, 4]], "u": [1, 2], "v": [1]}')
    code, _, err = run(["analyze", bad])
    assert code == 1 and "field v" in err
    assert run(["analyze", tmp_path / "missing.json"])[0] == 1
    code, _, err = run(["sweep", problems_dir / "generic.json", "--t", 1,
                        "--csv", tmp_path / "no" / "x.csv"])
    assert code == 1 and "cannot write" in err


def test_numerical_failure_exit_2(tmp_path):
    big = tmp_path / "big.json"
    big.write_text('{"A": [[1e300, 1e300], [1e300, 1e300]], "u": [1e300, 1], "v": [1, 1e300]}')
    code, _, err = run(["analyze", big])
    assert code == 2 and "numerical failure" in err


def test_selftest_passes_and_is_deterministic():
    a = run(["selftest"])
    b = run(["selftest"])
    assert a[0] == 0
    assert a[1] == b[1]
    assert "FAIL" not in a[1]


def test_selftest_catches_b2_sign_flip(monkeypatch):
    original = perturb.b2_direct
    monkeypatch.setattr(perturb, "b2_direct", lambda *args: -original(*args))
    failed = [c.name for c in run_selftest() if not c.passed]
    assert any("two-formula agreement" in name for name in failed)
    assert run(["selftest"])[0] == 3


def test_no_color_env(monkeypatch):
    monkeypatch.setenv("NO_COLOR", "1")
    assert "\033[" not in run(["selftest"])[1]


_TOKENS = ["0", "-1", "1e999", "NaN", "Infinity", "true", "null", '"x"', "[]", "{}",
           "[1, 2, 3]", "[[1]]", "1e-320", "[0, 1]", "[[0, 1], [1, 0]]", "-0", "9" * 40]


def _mutate(text, rnd):
    s = list(text)
    for _ in range(rnd.randint(1, 4)):
        op = rnd.random()
        i = rnd.randrange(len(s) + 1)
        if op < 0.25 and s:
            del s[min(i, len(s) - 1)]
        elif op < 0.5:
            s.insert(i, rnd.choice('[]{},:"0123456789.-eE '))
        elif op < 0.8:
            # replace a number-like run with a hostile token
            j = min(len(s), i + rnd.randint(1, 6))
            s[i:j] = list(rnd.choice(_TOKENS))
        else:
            k = rnd.choice(["A", "u", "v", "t", "steps", "label", "tolerances"])
            s = list(text.replace(f'"{k}"', f'"{k}x"', 1)) if rnd.random() < 0.5 else s
    return "".join(s)


def test_fuzz_never_crashes(problems_dir, tmp_path):
    rnd = random.Random(2024)
    seeds = [p.read_text() for p in sorted(problems_dir.glob("*.json"))]
    seen = {0: 0, 1: 0, 2: 0}
    path = tmp_path / "fuzz.json"
    for i in range(1000):
        path.write_text(_mutate(rnd.choice(seeds), rnd))
        argv = ["analyze", path] if i % 10 else ["sweep", path, "--t", "2", "--steps", "8"]
        code, _, _ = run(argv)
        assert code in seen, f"unexpected exit code {code} on:\n{path.read_text()}"
        seen[code] += 1
    assert seen[1] > 0 and seen[0] > 0
