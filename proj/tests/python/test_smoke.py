import math

import numpy as np
import pytest

import fpqmc


def test_sobol_first_points():
    pts = fpqmc.sobol_points(4)
    assert pts.shape == (4, 3)
    np.testing.assert_array_equal(pts[1], [0.5, 0.5, 0.5])
    np.testing.assert_array_equal(pts[2], [0.75, 0.25, 0.25])
    np.testing.assert_array_equal(fpqmc.sobol_points(2, start=2), pts[2:])


def test_inverse_normal_cdf():
    assert fpqmc.inverse_normal_cdf(0.5) == 0.0
    assert fpqmc.inverse_normal_cdf(0.975) == pytest.approx(1.959963984540054, abs=1e-12)
    z = fpqmc.inverse_normal_cdf(np.array([0.1, 0.9]))
    assert z[0] == pytest.approx(-z[1], abs=1e-15)


def test_morton_round_trip():
    key = fpqmc.morton_interleave(5, 3, 6)
    assert fpqmc.morton_deinterleave(key) == [5, 3, 6]
    assert fpqmc.morton_interleave(1, 0, 0) == 1
    assert fpqmc.morton_interleave(0, 1, 0) == 2


def test_moments_hand_case():
    m = fpqmc.compute_moments(np.array([[3.0, 0, 0], [-3.0, 0, 0]]))
    assert m["count"] == 2
    assert m["energy"] == pytest.approx(4.5)
    assert m["stress"][0][0] == pytest.approx(6.0)
    assert m["stress"][1][1] == pytest.approx(-3.0)


def test_fit_slope():
    pts = [(2.0**k, 2.0 ** (-k / 2)) for k in range(6, 12)]
    assert fpqmc.fit_slope(pts) == pytest.approx(-0.5)
    with pytest.raises(ValueError):
        fpqmc.fit_slope(pts[:2])


def test_run_scenario_shape_and_determinism():
    c = fpqmc.default_config("relax-const")
    c.particles, c.repetitions, c.steps = 128, 3, 5
    c.strategy = "array-rqmc"
    a = fpqmc.run_scenario(c, workers=1)
    b = fpqmc.run_scenario(c, workers=2)
    assert a.shape == (3, 5, 1, len(fpqmc.QUANTITIES))
    np.testing.assert_array_equal(a, b)
    energy = a[:, -1, 0, fpqmc.QUANTITIES.index("energy")]
    assert np.all(energy > 1.5)  # heating towards the 600 K reservoir
    with pytest.raises(ValueError):
        c.strategy = "bogus"


def test_uniform_demo_records():
    recs = fpqmc.run_uniform_demo([64, 128, 256, 512], 20)
    mc = next(r for r in recs if r["strategy"] == "mc" and r["quantity"] == "moment_1")
    assert len(mc["points"]) == 4
    assert math.isfinite(mc["slope"])
