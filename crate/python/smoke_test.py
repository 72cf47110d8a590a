"""Smoke test of the pyswsc extension.

Build and install first:
    maturin build --release -m crates/swsc-py/Cargo.toml -o dist
    pip install dist/pyswsc-*.whl
"""

import math

import pyswsc


def check_information():
    ch = pyswsc.Channel.gaussian(8.0, 8.0)
    info = ch.info()
    # Chain rule at receiver 1: I(X;Y1) + I(W;Y1|X) = I(X,W;Y1).
    assert math.isclose(info["I(X;Y1)"] + info["I(W;Y1|X)"], info["I(X,W;Y1)"], abs_tol=1e-9)
    snd = ch.region("snd")
    assert math.isclose(snd.r1_max(), info["I(X;Y1|W)"], abs_tol=1e-9)
    assert snd.contains(0.5, 0.5)
    ian = ch.region("ian")
    assert ian.max_symmetric() <= snd.max_symmetric() + 1e-12


def check_regions():
    ch = pyswsc.Channel.corpus(0)
    union = ch.region("swsc-union", grid=21)
    snd = ch.region("snd")
    for r1, r2, _ in union.boundary(50):
        assert snd.contains(r1, r2, 1e-9)
    csv = union.boundary_csv(10)
    assert csv.startswith("R1_bits,R2_bits,source_label\n")
    try:
        ch.region("swsc", split="2-1", order="d1=m1@0>m2@0;d2=m1@-1>m2@-1")
    except ValueError as e:
        assert "infeasible" in str(e)
    else:
        raise AssertionError("infeasible order accepted")


def check_projection():
    # Atoms a0..a5 of the single-block 2-1 system; R2 <= min(a1, a5).
    vals = [0.7, 0.2, 0.4, 0.5, 0.3, 0.6]
    parts = [[0], [2], [1], [0], [1], [2]]
    cons = pyswsc.fm_project_atoms([0, 0, 1], list(zip(parts, vals)))
    r2 = min(rhs for a, b, rhs, _ in cons if (a, b) == (0, 1))
    r1 = min(rhs for a, b, rhs, _ in cons if (a, b) == (1, 0))
    assert math.isclose(r2, min(vals[1], vals[5]))
    assert math.isclose(r1, min(vals[0], vals[3]) + min(vals[2], vals[4]))


def check_suites_and_sim():
    for suite in ["lemma1", "fm"]:
        rep = pyswsc.verify(suite)
        assert rep["passed"], rep
    p = pyswsc.theory_point(8.0, 8.0)
    assert p["ian_gaussian"] <= p["swcm"] <= p["snd"]
    cfg = '{"n": 128, "b": 4, "trials": 3, "snr_db": 30, "inr_db": 30, "rates": [0.5, 0.5]}'
    a = pyswsc.simulate(cfg)
    assert a == pyswsc.simulate(cfg)
    assert a["swsc"]["streams"][0]["errors"] == 0
    table = pyswsc.schedule_table(2, 4)
    assert table.splitlines()[2] == "X2\tm1(1)\tm1(2)\tm1(3)\t1"


if __name__ == "__main__":
    check_information()
    check_regions()
    check_projection()
    check_suites_and_sim()
    print("pyswsc smoke test passed")
