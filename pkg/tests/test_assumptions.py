import numpy as np
import pytest

from bekktail.assumptions import (AssumptionName, AssumptionVerdict, Status, check_all,
                                  check_det_nondegenerate, check_irreducibility_density,
                                  check_nonparallel_trajectory, check_proximality_density,
                                  minimize_lambda_min)
from bekktail.fixtures import diagonal, non_triangular_pair, single_entry_order2, symmetric_pair
from bekktail.model import ModelSpec, make_spec, validate_spec

BASIS = np.array([[[1.0, 0], [0, 0]], [[0, 1.0], [0, 0]], [[0, 0], [1.0, 0]], [[0, 0], [0, 1.0]]])


def order2(A):
    A = np.asarray(A, dtype=float)
    return validate_spec(ModelSpec(d=2, q=A.shape[0], l=A.shape[1], C=np.eye(2), A=A))


def status(verdicts):
    return {v.name: v.status for v in verdicts}


def test_failing_verdict_requires_witness():
    with pytest.raises(ValueError):
        AssumptionVerdict(AssumptionName.DET_NONDEGENERATE, Status.FAILS)


def test_single_entry_order_two_all_hold():
    out = check_all(single_entry_order2())
    assert [v.name for v in out] == list(AssumptionName)
    assert all(v.status is Status.HOLDS for v in out)
    assert all(v.addresses for v in out)


def test_diagonal_density_fails_on_first_axis():
    v = check_irreducibility_density(diagonal((0.6, 1.2)))
    assert v.status is Status.FAILS
    assert np.allclose(np.abs(v.witness["x"]), [1.0, 0.0])
    assert v.witness["lambda_min"] == pytest.approx(0.0, abs=1e-20)


def test_full_basis_density_holds():
    v = check_irreducibility_density(make_spec(np.eye(2), BASIS))
    assert v.status is Status.HOLDS
    assert v.witness["min_lambda"] == pytest.approx(1.0, rel=1e-6)


def test_lambda_min_optimizer_finds_global_minimum():
    # Cov(M x) = diag(x1^2 + x2^2 (c^2), ...) for symmetric_pair; compare against a dense sphere scan
    s = symmetric_pair()
    lams, X = minimize_lambda_min(s, starts=50, seed=1)
    theta = np.linspace(0, np.pi, 20001)
    dense = []
    for t in theta:
        x = np.array([np.cos(t), np.sin(t)])
        cov = sum(np.outer(A @ x, A @ x) for A in s.A[0])
        dense.append(np.linalg.eigvalsh(cov)[0])
    assert lams.min() == pytest.approx(min(dense), rel=1e-6, abs=1e-12)
    assert np.allclose(np.linalg.norm(X, axis=1), 1.0)


def test_nonparallel_holds_for_non_triangular_pair():
    v = check_nonparallel_trajectory(non_triangular_pair())
    assert v.status is Status.HOLDS
    assert v.witness["starts"] > 100  # random directions plus structured ones


@pytest.mark.parametrize("factor", [1.0, 2.0, -0.5])
def test_nonparallel_proportional_pair_is_undetermined(factor):
    A = np.array([[0.8, 0.3], [0.3, 0.8]])
    v = check_nonparallel_trajectory(make_spec(np.eye(2), [A, factor * A]))
    assert v.status is Status.UNDETERMINED
    assert "always parallel" in v.detail


def test_nonparallel_finds_structured_parallel_direction():
    # A1 = diag(1, 2), A2 = diag(2, 1): parallel images only along the axes, which are absorbing
    v = check_nonparallel_trajectory(make_spec(np.eye(2), [np.diag([1.0, 2.0]), np.diag([2.0, 1.0])]))
    assert v.status is Status.UNDETERMINED
    assert np.count_nonzero(np.abs(v.witness["start"]) > 1e-12) == 1


def test_nonparallel_never_fails():
    specs = [diagonal((0.5, 0.5)), make_spec(np.eye(2), [[[0.0, 1.0], [0.0, 0.0]]]), symmetric_pair(),
             single_entry_order2(), non_triangular_pair()]
    assert all(check_nonparallel_trajectory(s, trials=20).status is not Status.FAILS for s in specs)


def test_proximality_rank_witness():
    v = check_proximality_density(diagonal((0.6, 1.2)))
    assert v.status is Status.FAILS
    assert v.witness == "rank 1 of 4"


def test_proximality_duplicated_matrix_lag_two():
    A = np.stack([BASIS, BASIS])
    A[1, 3] = A[1, 2]  # lag 2 spans only three directions
    v = check_proximality_density(order2(A))
    assert v.status is Status.FAILS
    assert v.witness == "rank 3 of 4"
    assert "lag 2" in v.detail


def test_proximality_duplicated_matrix_single_lag_searches_support():
    A = BASIS.copy()
    A[3] = A[2]
    v = check_proximality_density(make_spec(np.eye(2), A))
    assert v.status is Status.HOLDS
    assert "rank 3 of 4" in v.detail and v.witness["eigen_gap"] > 0


def test_proximality_rotation_multiples_undetermined():
    # every support element is a multiple of a rotation: complex dominant pair, never proximal
    R = np.array([[0.0, -1.0], [1.0, 0.0]])
    v = check_proximality_density(make_spec(np.eye(2), [R, 2 * R]))
    assert v.status is Status.UNDETERMINED


def test_det_holds_and_fails():
    assert check_det_nondegenerate(single_entry_order2()).status is Status.HOLDS
    assert check_det_nondegenerate(diagonal((0.6, 1.2))).status is Status.HOLDS
    v = check_det_nondegenerate(make_spec(np.eye(2), [[[1.0, 2.0], [0.0, 0.0]]]))
    assert v.status is Status.FAILS and v.witness == "row 2 is zero in every A_qj"
    v = check_det_nondegenerate(make_spec(np.eye(2), [[[1.0, 0.0], [3.0, 0.0]], [[2.0, 0.0], [1.0, 0.0]]]))
    assert v.status is Status.FAILS and v.witness == "column 2 is zero in every A_qj"


def test_det_rank_one_sum_fails_at_all_points():
    u, w = np.array([1.0, 2.0]), np.array([0.5, -1.0])
    v = check_det_nondegenerate(make_spec(np.eye(2), [np.outer(u, w), 3 * np.outer(u, w)]))
    assert v.status is Status.FAILS
    assert v.witness["max_relative_det"] < 1e-12


def test_det_uses_last_lag():
    A = np.stack([BASIS, np.zeros_like(BASIS)])
    A[1, 0] = BASIS[0]
    assert check_det_nondegenerate(order2(A)).status is Status.FAILS


@pytest.mark.parametrize("spec", [single_entry_order2(), diagonal((0.6, 1.2)), non_triangular_pair(), symmetric_pair()],
                         ids=["order2", "diagonal", "general", "commuting"])
def test_tiny_perturbation_keeps_verdicts(spec):
    base = status(check_all(spec, seed=3))
    A = spec.A + 1e-12 * np.random.default_rng(0).standard_normal(spec.A.shape)
    pert = validate_spec(ModelSpec(d=spec.d, q=spec.q, l=spec.l, C=spec.C, A=A))
    assert status(check_all(pert, seed=3)) == base


def test_verdict_serialization():
    d = check_proximality_density(diagonal((0.6, 1.2))).to_dict()
    assert d["name"] == "ProximalityDensity" and d["status"] == "Fails" and d["witness"] == "rank 1 of 4"
