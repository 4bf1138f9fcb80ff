import math

import numpy as np
import pytest

import fraclab


def test_kernel_values():
    p = fraclab.KernelParams(q=1.0, lam=1.0)
    assert fraclab.eval_g(p, 1.0) == pytest.approx(math.tanh(1.0), rel=1e-15)
    assert fraclab.eval_Phi(p, 0.7) == fraclab.eval_Phi(p, -0.7)
    assert abs(fraclab.partition_sum(p, 0.3) - 1.0) < 1e-10


def test_special_functions():
    assert fraclab.gamma_fn(5.0) == 24.0
    assert fraclab.mittag_leffler(0.5, -1.0) == pytest.approx(math.e * math.erfc(1.0), rel=1e-12)


def test_caputo_linear_is_exact():
    d = fraclab.caputo_l1(np.linspace(0.0, 1.0, 257), 0.0, 1.0, 0.5)
    assert d[-1] == pytest.approx(1.0 / math.gamma(1.5), rel=1e-12)


def test_fractional_laplacian_eigenfunction():
    x = np.arange(64) * 2 * math.pi / 64
    out = np.asarray(fraclab.frac_laplacian(np.sin(3 * x), 2 * math.pi, 0.7))
    assert np.max(np.abs(out - 3 ** 1.4 * np.sin(3 * x))) < 1e-10


def test_kantorovich_from_python_callable():
    p = fraclab.KernelParams()
    e = fraclab.apply_expectation(lambda t: 2.0, [0.37], 16, p)
    assert abs(e - 2.0) < 1e-10
    assert fraclab.variance_closed_form(lambda t: 1.0, [0.2], 8, p, 0.0) == 0.0


def test_mollify_constant_and_dissipation():
    x = np.arange(512) * 2 * math.pi / 512
    m = np.asarray(fraclab.mollify(np.full(512, 1.7), 2 * math.pi, 8, 0.0))
    assert np.max(np.abs(m - 1.7)) < 1e-12
    eps = fraclab.energy_dissipation(np.sin(3 * x), 2 * math.pi, nu=0.1, s=0.6)
    assert eps == pytest.approx(0.1 * 3 ** 1.2 * math.pi, abs=1e-8)


def test_burgers_zero_trajectory():
    times, traj = fraclab.frac_burgers_solve(np.zeros(32), alpha=0.5, s=0.75, nu=0.1)
    traj = np.asarray(traj)
    assert traj.shape == (len(times), 32)
    assert not traj.any()


def test_fit_slope():
    slope, hw = fraclab.fit_slope([1, 2, 4, 8], [1, 4, 16, 64])
    assert slope == pytest.approx(2.0)
    assert hw < 1e-10


def test_run_experiment_and_config_errors():
    r = fraclab.run_experiment({"experiment": "kernel"})
    assert r["passed"]
    assert r["csv"].startswith("experiment,param,n,metric,value,stderr\n")
    with pytest.raises(ValueError, match="alpha"):
        fraclab.run_experiment({"experiment": "caputo", "alpha": 1.5})
