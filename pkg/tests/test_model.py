import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bekktail.errors import AllZeroCoefficients, ConfigError, NotPositiveDefinite, ShapeMismatch
from bekktail.fixtures import single_entry_order2
from bekktail.model import (ModelSpec, build_companion_template, load_spec, make_spec, one_step_covariance,
                            spec_from_dict, validate_spec)
from bekktail.simulate import coefficients_from_normals


def test_smallest_spec_is_valid():
    s = make_spec([[1.0]], [[[1.0]]])
    assert (s.d, s.q, s.l) == (1, 1, 1)


def test_indefinite_intercept_rejected():
    with pytest.raises(NotPositiveDefinite):
        make_spec([[1, 2], [2, 1]], [np.eye(2) * 0.5])


def test_intercept_is_symmetrized_before_cholesky():
    s = make_spec([[2.0, 0.5], [0.3, 2.0]], [np.eye(2) * 0.5])
    assert np.allclose(s.C, [[2.0, 0.4], [0.4, 2.0]])


def test_all_zero_coefficients_rejected():
    with pytest.raises(AllZeroCoefficients):
        make_spec(np.eye(2), [np.zeros((2, 2))])


def test_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        validate_spec(ModelSpec(d=2, q=1, l=1, C=np.eye(2), A=np.zeros((1, 1, 3, 3))))
    with pytest.raises(ShapeMismatch):
        validate_spec(ModelSpec(d=2, q=1, l=1, C=np.eye(3), A=np.ones((1, 1, 2, 2))))


def test_order_two_single_entry_model_is_valid():
    s = single_entry_order2()
    assert (s.d, s.q, s.l) == (2, 2, 4)


def test_validated_arrays_are_read_only():
    s = make_spec(np.eye(2), [np.eye(2) * 0.5])
    with pytest.raises(ValueError):
        s.A[0, 0, 0, 0] = 1.0


def _config(**over):
    cfg = {"d": 2, "q": 1, "l": 1, "C": [[1, 0], [0, 1]],
           "A": [{"lag": 1, "index": 1, "matrix": [[0.5, 0.2], [0, 0.8]]}]}
    cfg.update(over)
    return cfg


def test_config_round_trip(tmp_path):
    s = spec_from_dict(_config())
    p = tmp_path / "m.json"
    p.write_text(json.dumps(s.to_dict()))
    t = load_spec(p)
    assert np.array_equal(t.A, s.A) and t.digest() == s.digest()


def test_config_unknown_key_rejected():
    with pytest.raises(ConfigError):
        spec_from_dict(_config(extra=1))


def test_config_missing_entry_rejected():
    with pytest.raises(ShapeMismatch):
        spec_from_dict(_config(l=2))


def test_config_duplicate_entry_rejected():
    cfg = _config(l=2)
    cfg["A"].append(dict(cfg["A"][0]))
    with pytest.raises(ShapeMismatch):
        spec_from_dict(cfg)


def test_config_bad_json(tmp_path):
    p = tmp_path / "m.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        load_spec(p)


def test_companion_q1_has_no_deterministic_part():
    t = build_companion_template(make_spec(np.eye(2), [np.eye(2) * 0.5]))
    assert t.dim == 2 and not np.any(t.deterministic_part)


def test_companion_q2_layout():
    t = build_companion_template(make_spec(np.eye(2), np.full((2, 1, 2, 2), 0.1)))
    assert t.dim == 4
    assert np.array_equal(t.deterministic_part[2:, :2], np.eye(2))
    assert not np.any(t.deterministic_part[2:, 2:])
    assert not np.any(t.deterministic_part[:2])


def test_companion_q3_scalar_subdiagonal():
    t = build_companion_template(make_spec([[1.0]], np.full((3, 1, 1, 1), 0.3)))
    expected = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], dtype=float)
    assert np.array_equal(t.deterministic_part, expected)


def test_slot_order_is_lag_major():
    s = single_entry_order2()
    t = build_companion_template(s)
    assert [(r.lag, r.index) for r in t.random_slots] == [(i, j) for i in (1, 2) for j in (1, 2, 3, 4)]
    assert len(t.random_slots) == s.q * s.l


def test_zero_state_gives_intercept():
    s = make_spec([[2.0, 0.3], [0.3, 1.0]], [np.eye(2) * 0.5])
    assert np.array_equal(one_step_covariance(s, [0, 0]), s.C)


def test_scalar_one_step_covariance():
    assert one_step_covariance(make_spec([[1.0]], [[[1.0]]]), [2.0])[0, 0] == 5.0


def test_diagonal_one_step_covariance():
    s = make_spec(np.eye(2), [np.diag([0.5, 0.8])])
    # diagonal entries 1 + 0.25 and 1 + 0.64; the rank-one term also couples them by 0.5 * 0.8
    assert np.allclose(one_step_covariance(s, [1, 1]), [[1.25, 0.4], [0.4, 1.64]])


def test_one_step_covariance_dimension_mismatch():
    with pytest.raises(ShapeMismatch):
        one_step_covariance(make_spec(np.eye(2), [np.eye(2) * 0.5]), [1.0, 2.0, 3.0])


dims = st.tuples(st.integers(1, 3), st.integers(1, 3), st.integers(1, 3))


@given(dims, st.integers(0, 2 ** 32 - 1))
def test_one_step_covariance_matches_companion_gaussian_identity(dql, seed):
    d, q, l = dql
    g = np.random.default_rng(seed)
    A = g.normal(size=(q, l, d, d))
    L = g.normal(size=(d, d))
    s = make_spec(L @ L.T + np.eye(d), A)
    x = g.normal(size=d * q)
    t = build_companion_template(s)
    # the top block of M x + Q is linear in the normals: its covariance is J J' with J the Jacobian
    K = len(t.random_slots)
    J = np.zeros((d, K + d))
    for k, slot in enumerate(t.random_slots):
        J[:, k] = (slot.placement @ x)[:d]
    J[:, K:] = t.chol
    assert np.max(np.abs(J @ J.T - one_step_covariance(s, x))) <= 1e-12 * (1 + np.max(np.abs(J @ J.T)))


@given(dims, st.integers(0, 2 ** 32 - 1))
def test_zero_normals_reproduce_deterministic_part(dql, seed):
    d, q, l = dql
    g = np.random.default_rng(seed)
    s = make_spec(np.eye(d), g.normal(size=(q, l, d, d)))
    t = build_companion_template(s)
    M, Q = coefficients_from_normals(t, np.zeros(t.n_normals))
    assert np.array_equal(M, t.deterministic_part) and not np.any(Q)


def test_scaled_spec():
    s = make_spec(np.eye(2), [np.eye(2) * 0.5])
    assert np.allclose(s.scaled(2.0).A, 2 * s.A)
