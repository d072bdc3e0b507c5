import math

import pytest

import warpsol


def bryant():
    s0, c = 0.1, -1.0 / 18.0
    return {
        "n": 4,
        "rho": 0.0,
        "fibers": [{"dim": 3, "k": 1.0}],
        "initial": {"s0": s0, "h": [s0 + c * s0**3], "w": [1 + 3 * c * s0**2], "f": 9 * c * s0**2, "fprime": 18 * c * s0},
    }


def test_jet_and_derivative():
    v, d1, d2, d3 = warpsol.jet("s^3", 2.0)
    assert (v, d1, d2, d3) == pytest.approx((8.0, 12.0, 12.0, 6.0), abs=1e-13)
    assert warpsol.jet(warpsol.derivative("exp(2*s)"), 0.0)[0] == pytest.approx(2.0)


def test_parse_error_carries_position():
    with pytest.raises(warpsol.ParseError) as err:
        warpsol.jet("s +* 2", 1.0)
    assert err.value.position == 3
    assert isinstance(err.value, ValueError)


def test_catalog_check_and_classify():
    spec = warpsol.catalog("type_iii", n=6)
    assert spec["warps"] == ["s^(3/5)", "s^(2/5)"]
    report = warpsol.check(spec)
    assert report["exit_code"] == 0 and report["pass"]
    assert report["verdict"] == "type_iii"
    verdict, predicates = warpsol.classify(spec)
    assert verdict == "type_iii" and predicates["harmonic_weyl"]


def test_catalog_validation():
    with pytest.raises(warpsol.ValidationError, match="n≠5"):
        warpsol.catalog("type_iii", n=5)


def test_integrate_bryant():
    out = warpsol.integrate(bryant(), s1=10.0)
    assert len(out["s"]) == 201
    assert out["drift"]["C0_drift"] <= 1e-8 * (1 + abs(out["drift"]["C0_initial"]))
    assert out["verdict"] == "type_iv_D_flat"
    assert all(b > a for a, b in zip(out["h"][0], out["h"][0][1:]))
    assert out["csv"].startswith("s,h_1,w_1,f,fprime,R,C0,res_cotton_max\n")


def test_numeric_error_carries_last_valid_s():
    spec = {
        "n": 6,
        "rho": -0.5,
        "fibers": [{"dim": 2, "k": 1}, {"dim": 3, "k": -1}],
        "initial": {"s0": 0.5, "h": [0.7, 1.2], "w": [0.3, -0.2], "f": 0.1, "fprime": 0.4},
    }
    with pytest.raises(warpsol.NumericError) as err:
        warpsol.integrate(spec, s1=2.0)
    assert 1.3 < err.value.last_valid_s < 1.4


def test_obstruction_is_deterministic():
    a = warpsol.obstruction(6, 1.0, samples=2000)
    assert a["feasible_count"] == 0 and a["samples"] == 2000
    assert a == warpsol.obstruction(6, 1.0, samples=2000)
    assert math.isfinite(a["worst_margin"])
