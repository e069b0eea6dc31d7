import json
import math

import numpy as np
import pytest

import hydrob


def grid_coords(g):
    n1, n2, ny = g.shape
    x = np.arange(n1) * g.lh / g.nh
    y = np.arange(ny) * 2 * np.pi / ny
    return np.meshgrid(x, np.zeros(n2), y, indexing="ij")


def test_version():
    assert hydrob.__version__ == "0.1.0"


def test_closure_matches_oracle():
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(200):
        p = hydrob.MaterialParams(rng.uniform(0.05, 0.95), rng.uniform(-1, 1))
        q1, q2 = rng.uniform(-1.4, 1.4, size=2)
        t13, t23 = hydrob.stress_closure(q1, q2, p)
        t11, t22, t33, t12 = hydrob.stress_derived(q1, q2, t13, t23, p)
        oracle = hydrob.algebraic_oracle(q1, q2, p)
        worst = max(worst, np.max(np.abs(np.array([t11, t22, t33, t12, t13, t23]) - oracle)))
    assert worst <= 1e-10


def test_g_identity():
    m, s = 2.5, 0.6
    assert hydrob.g2(m, s) == pytest.approx((1 + hydrob.g1(m, s)) ** 2 - 1, abs=1e-15)


def test_parseval_and_derivative():
    g = hydrob.Grid(1, 16, 16)
    x, _, y = grid_coords(g)
    f = np.sin(x) * np.cos(2 * y) + 0.3
    assert hydrob.anisotropic_norm(g, f) == pytest.approx(math.sqrt(np.mean(f**2)), rel=1e-12)
    dy = hydrob.derivative(g, f, "y")
    assert np.max(np.abs(dy + 2 * np.sin(x) * np.sin(2 * y))) < 1e-12
    with pytest.raises(hydrob.WeightOverflowError):
        hydrob.anisotropic_norm(g, f, r=100.0)


def test_fit_rate():
    eps = [0.2, 0.1, 0.05]
    fit = hydrob.fit_rate(eps, [3 * e for e in eps])
    assert fit["slope"] == pytest.approx(1.0)
    assert fit["intercept"] == pytest.approx(math.log(3.0))


def test_relaxation_is_exact():
    g = hydrob.Grid(1, 16, 16)
    p = hydrob.MaterialParams(0.5, 0.3)
    assert hydrob.relaxation_decay_error(g, 0.01, 1.0, 10, p) <= 1e-8


def test_config_round_trip_and_errors():
    text = hydrob.default_config()
    assert hydrob.normalize_config(text, "limit") == text
    with pytest.raises(hydrob.ConfigError, match="theta"):
        hydrob.normalize_config("[params]\ntheta = 1.5\n", "limit")
    with pytest.raises(hydrob.ConfigError, match="5/2"):
        hydrob.normalize_config("[monitors]\ns1 = 2\n", "convergence")


def test_execute_limit(tmp_path):
    cfg = "[grid]\nnh = 16\nny = 16\n[stepping]\nt_final = 0.05\n"
    code, summary, message = hydrob.execute(cfg, "limit", tmp_path)
    assert code == 0, message
    assert summary["status"] == "completed"
    assert summary["energy_ok"]
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert "timeseries.csv" in manifest["files"]

    u = hydrob.limit_final_velocity(cfg)
    assert u.shape == (16, 1, 16)
    assert np.all(np.isfinite(u))
    assert np.max(np.abs(u.mean(axis=2))) < 1e-12
