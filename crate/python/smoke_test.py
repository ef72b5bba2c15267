#!/usr/bin/env python3
"""Smoke test of the mlaguerre_py extension module.

Builds nothing itself: run `cargo build -p mlaguerre-py --release` first,
then `python3 python/smoke_test.py`. The script locates the compiled
cdylib under target/, exposes it under the importable name, and checks a
sample of documented values end to end.
"""

import json
import shutil
import sys
import tempfile
from fractions import Fraction
from pathlib import Path


def import_extension():
    repo = Path(__file__).resolve().parent.parent
    candidates = [
        repo / "target" / "release" / "libmlaguerre_py.so",
        repo / "target" / "debug" / "libmlaguerre_py.so",
        repo / "target" / "release" / "libmlaguerre_py.dylib",
        repo / "target" / "debug" / "libmlaguerre_py.dylib",
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("no built extension found; run: cargo build -p mlaguerre-py --release")
    stage = Path(tempfile.mkdtemp(prefix="mlaguerre-py-"))
    shutil.copy2(built, stage / "mlaguerre_py.so")
    sys.path.insert(0, str(stage))
    import mlaguerre_py

    return mlaguerre_py


def approx(a, b, tol=1e-12):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    m = import_extension()
    print(f"loaded mlaguerre_py {m.__version__}")

    # exact scalar arithmetic
    assert m.pochhammer(Fraction(1, 2), 3) == Fraction(15, 8)
    assert m.pochhammer(-2, 3) == 0
    assert approx(m.log_gamma(0.5), 0.5723649429247001)
    assert approx(m.log_pochhammer(1.0, 5), 4.787491742782046)  # ln 120
    square, value = m.q_value(1)
    assert square == Fraction(1, 4) and approx(value, 0.5)

    # univariate polynomials: two routes agree; poles raise
    assert m.laguerre_uv(2, 0, 1) == Fraction(-1, 2)
    assert m.laguerre_uv(10, "1/3", "7/2") == m.laguerre_uv_recurrence(10, "1/3", "7/2")
    try:
        m.laguerre_uv(2, -1, 1)
    except ValueError:
        pass
    else:
        sys.exit("pole at alpha = -1 should raise ValueError")

    # classical bounds at documented points
    assert approx(m.szego_bound(1, 0, 2), 2.718281828459045)
    assert approx(m.lewandowski_szynal_bound(1, 0, 3), 4.0)
    assert approx(m.rooney_bound_1(3, 0, 0), 1.0)
    assert m.rooney_bound_2(2, "-1/2", 3) <= m.rooney_bound_1(2, "-1/2", 3)
    assert approx(m.kummer_1f1(1.0, 2.0, 0.5), 2 * (2.718281828459045**0.5 - 1), 1e-10)

    # multivariate evaluation, three ways
    assert m.laguerre_mv([1, 1], 1, [2, 2]) == -2
    assert m.gf_expansion_coeff([1, 1], 1, [2, 2]) == -2
    assert m.phi2k([-1, -1], 2, [2, 2]) == Fraction(-1, 3)
    assert m.diagonal_sequence(0, [1, 1], 1) == [1, -1]

    # series reduction and majorization chain
    equal, lhs, rhs = m.panda_reduce_check([Fraction(1, 2), Fraction(1, 2)], 8)
    assert equal and lhs == rhs
    phi2, kummer, expo = m.chain_check(2, 1.0, [1.0, 1.0], "theorem1")
    assert phi2 <= kummer <= expo

    # envelope bounds
    r = m.theorem1_bound([1, 1], 1, [0, 0])
    assert approx(r["bound"], 48.0) and approx(r["tightness"], 0.125)
    r = m.theorem2_bound([1, 1], 1, [0, 0])
    assert approx(r["bound"], 67.88225099390857, 1e-9)
    r = m.theorem2_bound([1, 1], "-3/4", [1, 1], extended=True)
    assert r["tightness"] is not None

    # diagonal envelopes and the asymptote adjudication
    assert approx(m.ab_ratio_ln(1, 2), -0.34657359027997264, 1e-9)  # ln(1/sqrt 2)
    verdictd = m.adjudicate_asymptote(2, 2000)
    assert verdictd["verdict"] == "DERIVED_FORM"
    assert approx(m.ratio_asymptote(100, 2, "derived"), verdictd["derived_constant"], 1e-9)

    # Dirichlet measure
    assert m.dirichlet_moment([Fraction(1, 2), Fraction(1, 2)], 1, [1, 1]) == Fraction(1, 24)
    pts = m.dirichlet_sample(["1/2", "1/2"], 1, seed=9, count=100)
    assert len(pts) == 100 and all(sum(p) < 1 and min(p) > 0 for p in pts)
    c = m.integral_repr_check([1], [0], 0, [1], samples=50_000, seed=3)
    assert c["lhs"] == 1.0 and c["within_3_sigma"]
    c = m.specialization_check([1, 1], 1, [2, 2], "theorem2", samples=50_000, seed=5)
    assert c["lhs"] == -2.0 and c["within_3_sigma"]

    # sweep engine round trip
    config = {
        "k": 2,
        "index_cap": 1,
        "alpha_set": ["1"],
        "x_grid": {"mode": "grid", "values": ["0", "1"]},
        "bounds": ["theorem1", "theorem2"],
        "comparison_policy": "float_guarded",
    }
    records_csv, summary_json = m.run_sweep(json.dumps(config))
    assert records_csv.splitlines()[0] == "k,n_vec,alpha,x_vec,value,bound_source,bound,tightness,verdict"
    summary = json.loads(summary_json)
    assert summary["violations"] == 0
    assert summary["records"] == 4 * 4 * 2
    again_csv, again_summary = m.run_sweep(json.dumps(config))
    assert (records_csv, summary_json) == (again_csv, again_summary)

    print("smoke test passed")


if __name__ == "__main__":
    main()
