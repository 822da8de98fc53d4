import math

import numpy as np
import pytest

import excursion as ex


def test_tail_helpers():
    assert ex.gaussian_tail(3.0) == pytest.approx(0.0013498980316300945, rel=1e-12)
    assert ex.log_gaussian_tail(40.0) == pytest.approx(-804.60844201375379, rel=1e-14)
    assert ex.gamma_level(8.0) == 7.875
    with pytest.raises(ex.InvalidLevelError):
        ex.gamma_level(1.0)


def test_cosine_truth_and_grid_oracle():
    assert ex.cosine_truth(8.0) == pytest.approx(2.1337694678814972e-15, rel=1e-12)
    grid = [0.75 * i / 7 for i in range(8)]
    assert ex.cosine_grid_truth(3.0, grid) < ex.cosine_truth(3.0)


def test_field_and_covariance():
    field = ex.make_field("sqexp", [0.0, 0.0], [1.0, 1.0], mean_slope=[0.1, 0.1])
    assert field.dim == 2
    assert field.mean([1.0, 1.0]) == pytest.approx(0.2)
    c = ex.cov_matrix(field, np.array([[0.0, 0.0], [1.0, 0.0]]))
    assert c.shape == (2, 2)
    assert c[0, 1] == pytest.approx(math.exp(-1.0))
    assert math.exp(ex.normalizing_integral(field, 3.0)) == pytest.approx(0.0018802245299155424, rel=1e-8)
    assert ex.cluster_scale(field, 5.0)["zeta"] == pytest.approx(5.0)
    assert ex.choose_m(0.5, field) == 64


def test_estimate_cosine():
    field = ex.make_field("cosine", [0.0], [0.75])
    out = ex.estimate(field, 4.0, n=2000, seed=3)
    tail = out["tail"]
    assert tail["n"] == 2000 and tail["m"] == 20
    assert abs(tail["estimate"] - ex.cosine_truth(4.0)) < 4 * tail["std_err"]
    again = ex.estimate(field, 4.0, n=2000, seed=3, workers=3)
    assert again["tail"]["estimate"] == tail["estimate"]


def test_estimate_with_integrand():
    field = ex.make_field("sqexp", [0.0, 0.0], [1.0, 1.0])
    out = ex.estimate(field, 3.0, n=1000, xi=1.0)
    assert abs(out["integral"]["estimate"] - ex.gaussian_tail(3.0)) < 4 * out["integral"]["std_err"]
    assert out["conditional"]["estimate"] > 0


def test_presets():
    rows = ex.run_table("table1", {"n": 100, "levels": "3,4"})
    assert [r["b"] for r in rows] == [3.0, 4.0]
    assert rows[0]["true_value"] == pytest.approx(ex.cosine_truth(3.0))
    with pytest.raises(ex.ConfigurationError, match="bogus"):
        ex.run_table("table1", {"bogus": 1})
    pk = ex.run_pickands({"n": 200, "levels": "6"})
    assert pk[0]["H_hat"] > 0
    with pytest.raises(ex.ConfigurationError):
        ex.run_pickands({"alpha": 0})


def test_crude_grid_mc():
    field = ex.make_field("cosine", [0.0], [0.75])
    r = ex.crude_grid_mc(field, -5.0, 8, 1000)
    assert r["estimate"] >= 0.999
