import math

import numpy as np
import pytest

from bekktail.fixtures import diagonal, scalar_arch, single_entry_order2, symmetric_pair, triangular_pair
from bekktail.model import make_spec
from bekktail.stationarity import (Verdict, closed_form_gamma, decide, expected_kronecker, kronecker_condition,
                                   lyapunov_estimate, nelson_bound)
from bekktail.tailtheory import E_LOG_ABS_NORMAL, solve_component_tail_index

# E log|z| = -(euler_gamma + log 2)/2; a 10^7-draw Monte Carlo mean gave -0.63465 +- 0.00035
E_LOG_ABS_Z = -0.6351814227307391


def test_expected_log_abs_normal_constant():
    assert E_LOG_ABS_NORMAL == pytest.approx(E_LOG_ABS_Z, abs=1e-15)


def test_expected_log_abs_normal_monte_carlo():
    z = np.random.default_rng(0).standard_normal(2_000_000)
    lz = np.log(np.abs(z))
    assert abs(lz.mean() - E_LOG_ABS_Z) < 4 * lz.std() / math.sqrt(z.size)


def test_nelson_bound_value():
    # 2 exp(0.5772156649...) evaluated to 30 digits with mpmath
    assert nelson_bound() == pytest.approx(3.562144835980396, abs=1e-14)
    assert f"{nelson_bound():.4g}" == "3.562"


def test_scalar_boundary_closed_form():
    assert closed_form_gamma(scalar_arch(math.sqrt(nelson_bound()))) == pytest.approx(0.0, abs=1e-14)
    assert closed_form_gamma(scalar_arch(1.0)) == pytest.approx(E_LOG_ABS_Z, abs=1e-14)


def test_diagonal_closed_form():
    s = make_spec(np.eye(2), [np.diag([0.5, 1.5])])
    assert closed_form_gamma(s) == pytest.approx(math.log(1.5) + E_LOG_ABS_Z, abs=1e-14)
    assert closed_form_gamma(s) == pytest.approx(-0.2297, abs=1e-4)


def test_no_closed_form_for_general_order():
    assert closed_form_gamma(single_entry_order2()) is None


@pytest.mark.parametrize("a2,verdict", [(3.0, Verdict.STATIONARY), (3.6, Verdict.NON_STATIONARY),
                                        (4.0, Verdict.NON_STATIONARY), (1.0, Verdict.STATIONARY)])
def test_scalar_verdicts(a2, verdict):
    spec = scalar_arch(math.sqrt(a2))
    assert (closed_form_gamma(spec) < 0) == (a2 < nelson_bound())
    assert lyapunov_estimate(spec, n_horizon=2000, replicas=200).verdict is verdict


def test_decision_rule():
    assert decide(-1.0, 0.1) is Verdict.STATIONARY
    assert decide(1.0, 0.1) is Verdict.NON_STATIONARY
    assert decide(0.1, 0.1) is Verdict.INCONCLUSIVE


@pytest.mark.parametrize("factory", [diagonal, symmetric_pair, triangular_pair])
def test_monte_carlo_matches_closed_form(factory):
    spec = factory()
    r = lyapunov_estimate(spec, n_horizon=2000, replicas=200, seed=1)
    assert r.closed_form is not None
    assert abs(r.gamma_hat - r.closed_form) <= 3 * r.stderr


def test_horizon_subadditivity():
    s = single_entry_order2()
    short = lyapunov_estimate(s, n_horizon=25, replicas=400, seed=3)
    long = lyapunov_estimate(s, n_horizon=200, replicas=400, seed=3)
    assert long.gamma_hat <= short.gamma_hat + 3 * math.hypot(short.stderr, long.stderr)


def test_scale_shift_is_exact_for_order_one():
    s = symmetric_pair()
    a = lyapunov_estimate(s, n_horizon=500, replicas=50, seed=2)
    b = lyapunov_estimate(s.scaled(1.7), n_horizon=500, replicas=50, seed=2)
    assert b.gamma_hat - a.gamma_hat == pytest.approx(math.log(1.7), abs=1e-9)


def test_scale_increases_general_order():
    s = single_entry_order2()
    a = lyapunov_estimate(s, n_horizon=500, replicas=50, seed=2)
    b = lyapunov_estimate(s.scaled(1.5), n_horizon=500, replicas=50, seed=2)
    assert b.gamma_hat > a.gamma_hat


@pytest.mark.parametrize("sigma", np.linspace(0.2, 1.85, 12))
def test_moment_root_implies_negative_exponent(sigma):
    solve_component_tail_index(sigma)
    assert closed_form_gamma(scalar_arch(sigma)) < 0


def test_backends_give_same_estimate():
    from bekktail.kernels import compiled_available
    if not compiled_available():
        pytest.skip("compiled kernels not built")
    s = single_entry_order2()
    a = lyapunov_estimate(s, n_horizon=300, replicas=20, backend="python")
    b = lyapunov_estimate(s, n_horizon=300, replicas=20, backend="cython")
    assert a.gamma_hat == pytest.approx(b.gamma_hat, rel=1e-12)


def test_kronecker_scalar():
    for a in (0.5, 0.99, 1.2):
        r = kronecker_condition(scalar_arch(a))
        assert r["rho"] == pytest.approx(a * a) and r["sufficient"] == (a * a < 1)


def test_kronecker_diagonal():
    r = kronecker_condition(make_spec(np.eye(2), [np.diag([0.5, 0.8])]))
    assert r["rho"] == pytest.approx(0.64) and r["sufficient"]


def test_kronecker_strictness_gap():
    spec = scalar_arch(math.sqrt(2.0))
    assert not kronecker_condition(spec)["sufficient"]
    assert lyapunov_estimate(spec).verdict is Verdict.STATIONARY


def test_expected_kronecker_matches_monte_carlo():
    from bekktail import rng
    from bekktail.model import build_companion_template
    from bekktail.simulate import coefficients_from_normals
    s = single_entry_order2()
    t = build_companion_template(s)
    M, _ = coefficients_from_normals(t, rng.normals(rng.stream(0, rng.SIMULATION, 5), (100_000, t.n_normals)))
    emp = np.einsum("nij,nkl->ikjl", M, M).reshape(16, 16) / M.shape[0]
    assert np.max(np.abs(emp - expected_kronecker(s))) < 0.01
