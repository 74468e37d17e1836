"""Worked example models with concrete parameter values and their expected qualitative conclusions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import UnknownExample
from .model import ModelSpec, make_spec, validate_spec
from .tailtheory import TailMethod, solve_component_tail_index


@dataclass
class Fixture:
    example_id: str
    title: str
    spec: ModelSpec
    expectations: Callable[[object], list[tuple[str, bool]]]
    force_triangular: bool = False
    variants: list["Fixture"] = field(default_factory=list)


def _alpha(sigma: float) -> float:
    return solve_component_tail_index(sigma)


def _close(x, y, rtol=1e-9) -> bool:
    return x is not None and y is not None and math.isclose(x, y, rel_tol=rtol)


def _alphas(run) -> list:
    return run.tail.alphas if run.tail is not None else [None] * run.spec.d


def _verdicts(run) -> dict:
    return {v.name.value: v.status.value for v in (run.assumptions or [])}


# ---------------------------------------------------------------------------

def stacked_arch(a=(0.6, 1.2)) -> ModelSpec:
    d = len(a)
    mats = [np.diag([a[i] if k == i else 0.0 for k in range(d)]) for i in range(d)]
    return make_spec(np.eye(d), np.array(mats))


def _ex51(run):
    a = _alphas(run)
    exp = [_alpha(0.6), _alpha(1.2)]
    return [
        ("X_1 index solves E|a_1 z|^alpha = 1", _close(a[0], exp[0])),
        ("X_2 index solves E|a_2 z|^alpha = 1", _close(a[1], exp[1])),
        ("larger coefficient gives the heavier tail", a[1] is not None and a[0] is not None and a[1] < a[0]),
    ]


def upper_triangular_2x2(a=0.5, b=0.8, c=0.2) -> ModelSpec:
    return make_spec(np.eye(2), np.array([[[a, c], [0.0, b]]]))


def _ex52(run):
    a = _alphas(run)
    y1, y2 = _alpha(0.5), _alpha(0.8)
    return [
        ("X_2 index = alpha_2^(Y)", _close(a[1], y2)),
        ("X_1 index = min(alpha_1^(Y), alpha_2^(Y))", _close(a[0], min(y1, y2))),
    ]


def symmetric_pair(a=0.9, b=0.3, c=0.4) -> ModelSpec:
    return make_spec(np.eye(2), np.array([[[a, b], [b, a]], c * np.eye(2)]))


def _ex53(run):
    a = _alphas(run)
    target = min(_alpha(math.hypot(0.9 - 0.3, 0.4)), _alpha(math.hypot(0.9 + 0.3, 0.4)))
    return [
        ("structure is simultaneously diagonalizable", run.dec.kind.value == "SimDiagonalizable"),
        ("both components share min(alpha_1^(Y), alpha_2^(Y))", _close(a[0], target) and _close(a[1], target)),
    ]


def repeated_eigenvalue_3x3(a=0.5, b=0.9, c=0.3) -> ModelSpec:
    return make_spec(np.eye(3), np.array([[[a, 0, 0], [0, a, 0], [0, c, b]]]))


def _ex54(run):
    a = _alphas(run)
    ya, yb = _alpha(0.5), _alpha(0.9)
    return [
        ("X_1 and X_2 carry the index of the repeated eigenvalue a", _close(a[0], ya) and _close(a[1], ya)),
        ("X_3 index = min over both eigenvalues", _close(a[2], min(ya, yb))),
    ]


def circulant_3x3(a=0.5, b=0.2) -> ModelSpec:
    A = np.full((3, 3), b) + (a - b) * np.eye(3)
    return make_spec(np.eye(3), np.array([A]))


def _ex56(a, b):
    def check(run):
        al = _alphas(run)
        target = min(_alpha(abs(a - b)), _alpha(abs(a + 2 * b)))
        out = [("every component carries the smallest transformed index", all(_close(x, target) for x in al))]
        if abs(a - b) > abs(a + 2 * b):
            methods = [c.method for c in run.tail.per_component]
            out.append(("a component mixing the repeated eigenvalue uses the equal-eigenvalue rule",
                        TailMethod.SIM_DIAG_REPEATED in methods))
        return out
    return check


def _ex62(run):
    a = _alphas(run)
    y1, y2 = _alpha(0.5), _alpha(0.8)
    return [
        ("triangular route with P = I", run.dec.kind.value == "SimTriangularizable2D"),
        ("same conclusion as the diagonal route", _close(a[1], y2) and _close(a[0], min(y1, y2))),
    ]


def triangular_pair(a=0.4, b=1.0, c=0.5, c_tilde=1.1) -> ModelSpec:
    return make_spec(np.eye(2), np.array([[[a, b], [0.0, a]], [[c, 0.0], [0.0, c_tilde]]]))


def _ex64(run):
    al = _alphas(run)
    a1, a2 = _alpha(math.hypot(0.4, 0.5)), _alpha(math.hypot(0.4, 1.1))
    out = [
        ("P = I", run.dec.kind.value == "SimTriangularizable2D" and np.allclose(np.abs(run.dec.P), np.eye(2))),
        ("X_1 index = min(alpha_1, alpha_2)", _close(al[0], min(a1, a2))),
        ("X_2 index = alpha_2", _close(al[1], a2)),
    ]
    const = run.tail.constants if run.tail is not None else None
    if const is not None and const.c1_tilde is not None:
        out.append(("forward constant c~_1 > 0", const.c1_tilde > 0))
    return out


def rotated_triangular_pair(a=0.5, b=0.9, c=0.3) -> ModelSpec:
    A1 = [[a, (b - a) / 2], [(a - b) / 2, b]]
    A2 = [[a, c], [a - b + c, b]]
    return make_spec(np.eye(2), np.array([A1, A2]))


def _ex65(a, b, c):
    def check(run):
        al = _alphas(run)
        beta1 = _alpha(math.sqrt((a + b) ** 2 / 4 + (a + c) ** 2))
        beta2 = _alpha(math.sqrt((a + b) ** 2 / 4 + (b - c) ** 2))
        out = [("simultaneously triangularizable but not diagonalizable",
                run.dec.kind.value == "SimTriangularizable2D")]
        if beta1 < beta2:
            out.append(("both components carry beta_1", _close(al[0], beta1) and _close(al[1], beta1)))
        else:
            out.append(("both components undetermined (dependent equal-index transformed components)",
                        all(x is None for x in al)))
        return out
    return check


def single_entry_order2(a=0.4) -> ModelSpec:
    A = np.zeros((2, 4, 2, 2))
    for i in range(2):
        for j, (r, k) in enumerate([(0, 0), (1, 0), (0, 1), (1, 1)]):
            A[i, j, r, k] = a
    return validate_spec(ModelSpec(d=2, q=2, l=4, C=np.eye(2), A=A))


def _ex75(run):
    v = _verdicts(run)
    al = _alphas(run)
    return [
        ("all four assumption checks hold", len(v) == 4 and all(s == "Holds" for s in v.values())),
        ("a positive spectral tail index exists", al[0] is not None and al[0] > 0),
    ]


def non_triangular_pair(a=0.8, b=0.3) -> ModelSpec:
    return make_spec(np.eye(2), np.array([[[a, b], [b, a]], [[a, b], [-b, -a]]]))


def _ex76(run):
    v = _verdicts(run)
    return [
        ("structure is general", run.dec.kind.value == "General"),
        ("non-parallel irreducibility check holds", v.get("IrreducibilityNonParallel") == "Holds"),
        ("determinant check holds", v.get("DetNondegenerate") == "Holds"),
    ]


def _build() -> dict[str, Fixture]:
    fx = [
        Fixture("5.1", "stacked univariate ARCH(1), a = (0.6, 1.2)", stacked_arch(), _ex51),
        Fixture("5.2", "upper-triangular A, a=0.5, b=0.8, c=0.2", upper_triangular_2x2(), _ex52),
        Fixture("5.3", "commuting pair {[[a,b],[b,a]], cI}, a=0.9, b=0.3, c=0.4", symmetric_pair(), _ex53),
        Fixture("5.4", "repeated eigenvalue 3x3, a=0.5, b=0.9, c=0.3", repeated_eigenvalue_3x3(), _ex54),
        Fixture("5.6", "circulant 3x3, a=0.5, b=0.2", circulant_3x3(0.5, 0.2), _ex56(0.5, 0.2),
                variants=[Fixture("5.6b", "circulant 3x3, a=0.5, b=-0.4 (repeated eigenvalue dominates)",
                                  circulant_3x3(0.5, -0.4), _ex56(0.5, -0.4))]),
        Fixture("6.2", "example 5.2 through the triangular route", upper_triangular_2x2(), _ex62,
                force_triangular=True),
        Fixture("6.4", "triangular pair, a=0.4, b=1, c=0.5, c~=1.1", triangular_pair(), _ex64),
        Fixture("6.5", "non-commuting triangularizable pair, a=0.5, b=0.9, c=0.3",
                rotated_triangular_pair(0.5, 0.9, 0.3), _ex65(0.5, 0.9, 0.3),
                variants=[Fixture("6.5b", "same pair with c=-0.3 (beta_2 < beta_1)",
                                  rotated_triangular_pair(0.5, 0.9, -0.3), _ex65(0.5, 0.9, -0.3))]),
        Fixture("7.5", "d=q=2, l=4 single-entry coefficients, all a_ij = 0.4", single_entry_order2(), _ex75),
        Fixture("7.6", "non-triangularizable pair, a=0.8, b=0.3", non_triangular_pair(), _ex76),
    ]
    return {f.example_id: f for f in fx}


FIXTURES = _build()


def get_fixture(example_id: str) -> Fixture:
    try:
        return FIXTURES[str(example_id)]
    except KeyError:
        raise UnknownExample(f"unknown example {example_id!r}; known: {', '.join(FIXTURES)}") from None


def scalar_arch(a: float = 1.0, c: float = 1.0) -> ModelSpec:
    return make_spec(np.array([[c]]), np.array([[[a]]]))


def diagonal(entries=(0.6, 1.2)) -> ModelSpec:
    return make_spec(np.eye(len(entries)), np.array([np.diag(entries)]))
