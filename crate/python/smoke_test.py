"""Smoke test for the asqlab extension module. Run after `pip install --no-build-isolation .`."""

import math
from fractions import Fraction

import asqlab


def main():
    f24 = asqlab.Space.fkn(2, 4, 8)
    assert f24.norm({1: 2}, exact=True) == Fraction(1)
    assert f24.oracle_norm([1, 1, 1, 1, 0, 0, 0, 0], exact=True) == Fraction(1)

    rep = asqlab.coordinate_witness(f24, {1: 2})
    assert rep["verdict"] == "pass", rep
    assert rep["h"]

    x2 = asqlab.Space.xn(2, 2, 16)
    assert x2.norm({4: 1, 5: -1}) == 1.0
    rep = asqlab.pair_witness(x2, [{4: 2}])
    assert rep["verdict"] == "pass" and rep["bound"] == "3/2", rep

    f = x2.counterexample()
    assert f == {4: Fraction(2)}
    cert = asqlab.refute(x2, {8: 1, 9: -1}, Fraction(1, 8))
    assert cert["passed"], cert

    s = asqlab.Space.c0_sum([(2, 2, 16), (2, 4, 16), (2, 6, 16)])
    assert s.is_sum and s.dims == [16, 16, 16]
    rep = asqlab.sum_witness(s, [[{}, {4: 1, 5: -1}, {}]], Fraction(1, 4))
    assert rep["verdict"] == "pass" and rep["placement"] == [3], rep

    e = asqlab.mvee([[1.0, 1.0], [1.0, -1.0]])
    assert all(abs(q - 0.5 * (i == j)) < 1e-6 for i, row in enumerate(e["q"]) for j, q in enumerate(row)), e

    jb = asqlab.john_bound([[1.0, 1.0], [1.0, -1.0]], samples=500, seed=1)
    assert jb["passed"] and float(jb["worst_value"]) >= math.sqrt(1.5), jb

    spec = asqlab.Space.from_json('{"kind": "xn", "k": 2, "N": 2, "m": 16}')
    est = asqlab.modulus(spec, [0, 0, 0, 1, -1] + [0] * 11, starts=4, iters=20, seed=1)
    assert float(est["value_upper"]) <= 1.5 + 1e-9, est

    assert asqlab.run_cli(["verify-eq8", "--k", "2", "--n", "4", "--m", "8", "--trials", "3", "--seed", "1", "--out", "/dev/null"]) == 0
    try:
        asqlab.Space.xn(1, 2, 16)
    except ValueError:
        pass
    else:
        raise AssertionError("bad parameters accepted")
    print("asqlab smoke test passed")


if __name__ == "__main__":
    main()
