"""Smoke test for the pynptest extension module.

Build and install first:  pip install --no-build-isolation -e crates/py
"""

import random
import tempfile
import os

import pynptest


def main():
    rng = random.Random(1)
    x = [rng.random() for _ in range(200)]
    y = [rng.random() ** 1.5 for _ in range(150)]

    res = pynptest.gof_test(x, "uniform", methods="ks,ad,es-s-p", replicates=500, seed=7)
    assert [r["method"] for r in res] == ["KS", "AD", "ES-s-P"], res
    assert all(0.0 < r["pvalue"] <= 1.0 for r in res)
    assert pynptest.gof_test(x, "uniform", methods="ks", replicates=500, seed=7) == res[:1]

    fitted = pynptest.gof_test(x, "normal", methods="ad", replicates=200, seed=3)
    assert fitted[0]["kind"] == "simulation"

    ts = pynptest.twosample_test(x, y, replicates=300, seed=5)
    assert len(ts) == 13
    same = pynptest.twosample_test(x, x, methods="ks", replicates=200, seed=5)
    assert same[0]["pvalue"] == 1.0

    dx = ([0.0, 1.0, 2.0], [5, 10, 4])
    dy = ([1.0, 2.0, 3.0], [6, 9, 2])
    disc = pynptest.twosample_test_discrete(dx, dy, methods="ks,ad", replicates=200, seed=2)
    assert len(disc) == 2

    try:
        pynptest.twosample_test_discrete(dx, dy, methods="zc")
    except ValueError as e:
        assert "ZC" in str(e)
    else:
        raise AssertionError("ZC on histogram data must be rejected")

    cal = pynptest.MinPCalibration.gof(["ks", "ad"], "uniform", 50, replicates=200, inner_replicates=100, seed=9)
    assert 0.0 < cal.adjust(0.01) <= 1.0
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "cal.json")
        cal.save(path)
        assert pynptest.MinPCalibration.load(path).minp_values == cal.minp_values

    ids = [c["id"] for c in pynptest.cases()]
    assert "gof/uniform-linear" in ids and "twosample/normal-shift" in ids

    rows = pynptest.power("gof/uniform-linear", thetas=[0.0, 0.3], methods="ks", runs=100, n=100, seed=1, reuse_null=True)
    assert len(rows) == 2 and rows[1]["rate"] > rows[0]["rate"]

    print(f"pynptest {pynptest.__version__}: smoke test passed")


if __name__ == "__main__":
    main()
