from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from delta_ideal.curvature import constant_curvature, curvature_from_gauss, product_curvature, tau_subspace
from delta_ideal.delta import (DeltaOptions, PartitionError, PartitionTuple, Theorem, _Objective, b_coefficient,
                               delta_invariant, h2_coefficient, inequality_rhs, random_orthogonal)
from delta_ideal.shape import symmetrize
from oracles import b_naive, delta2n2_h2_coefficient, delta_oracle, lagrangian_full_coefficient_at

FAST = DeltaOptions(n_samples=500, n_refine=3, restarts=10)


@pytest.mark.parametrize("n", range(5, 13))
def test_delta2n2_coefficient_matches_full_lagrangian(n):
    c = h2_coefficient(n, (2, n - 2), Theorem.DELTA2N2)
    assert c == h2_coefficient(n, (2, n - 2), Theorem.LAGRANGIAN_FULL)
    assert c == delta2n2_h2_coefficient(n) == lagrangian_full_coefficient_at(n, (2, n - 2))
    assert b_coefficient((2, n - 2), n) == 2 * (n - 2) == b_naive((2, n - 2), n)


@given(st.integers(4, 12).flatmap(lambda n: st.tuples(st.just(n), st.lists(st.integers(2, n - 1), min_size=1,
                                                                            max_size=3))))
def test_b_coefficient_counts_mixed_planes(args):
    n, parts = args
    parts = sorted(parts)
    if sum(parts) > n:
        return
    assert b_coefficient(parts, n) == b_naive(parts, n)


def test_partition_validation():
    with pytest.raises(PartitionError):
        PartitionTuple(5, (3, 2))
    with pytest.raises(PartitionError):
        PartitionTuple(5, (1, 3))
    with pytest.raises(PartitionError):
        PartitionTuple(5, (3, 3))
    with pytest.raises(PartitionError):
        h2_coefficient(6, (2, 3), Theorem.DELTA2N2)
    with pytest.raises(PartitionError):
        h2_coefficient(5, (2, 3), Theorem.LAGRANGIAN_STRICT)
    assert h2_coefficient(5, (2,), Theorem.LAGRANGIAN_STRICT) > 0


def test_real_space_form_delta2_coefficient():
    # delta(2) <= n^2 (n-2) / (2 (n-1)) H^2 + (n+1)(n-2)/2 c for real space forms
    n = 6
    assert h2_coefficient(n, (2,), Theorem.REAL_SPACE_FORM) == Fraction(n * n * (n - 2), 2 * (n - 1))
    assert b_coefficient((2,), n) == Fraction((n + 1) * (n - 2), 2)


@pytest.mark.parametrize("c", [1.0, -1.0, 0.0])
def test_constant_curvature_is_exact(c):
    res = delta_invariant(constant_curvature(5, c), (2, 3), FAST, c=c, H2=0.0, theorem=Theorem.DELTA2N2)
    assert res.delta_value == pytest.approx(6 * c, abs=1e-9)
    assert res.residual == pytest.approx(0.0, abs=1e-9)


def test_product_against_oracle():
    expected, _ = delta_oracle((2, 3), (1.0, 1.0), (2, 3), samples=20_000)
    res = delta_invariant(product_curvature((2, 3), (1.0, 1.0)), (2, 3), FAST)
    assert res.delta_value == pytest.approx(expected, abs=1e-6)
    # the minimizing bases realize the infimum
    inf = sum(tau_subspace(product_curvature((2, 3), (1.0, 1.0)), B) for B in res.minimizing_bases)
    assert inf == pytest.approx(res.inf_value, abs=1e-10)


@given(st.integers(0, 10_000))
def test_analytic_gradient(seed):
    rng = np.random.default_rng(seed)
    curv = curvature_from_gauss(symmetrize(rng.standard_normal((5, 5, 5))), 1.0)
    obj = _Objective(curv, PartitionTuple(5, (2, 3)))
    Q0 = random_orthogonal(rng, 1, 5)[0]
    x = 0.3 * rng.standard_normal(obj.free[0].size)
    _, g = obj.value_and_grad(Q0, x)
    fd = np.array([(obj.value_and_grad(Q0, x + e * 1e-6)[0] - obj.value_and_grad(Q0, x - e * 1e-6)[0]) / 2e-6
                   for e in np.eye(x.size)])
    assert np.allclose(g, fd, atol=1e-6 * (1 + np.abs(fd).max()))


@given(st.integers(0, 10_000), st.sampled_from([-1.0, 0.0, 1.0]), st.integers(5, 7))
def test_inequality_holds_for_any_cubic_form(seed, c, n):
    """Every symmetric cubic form is realized by some Lagrangian, so rhs >= delta always."""
    h = symmetrize(np.random.default_rng(seed).standard_normal((n, n, n)))
    H2 = float(np.sum((np.einsum("caa->c", h) / n) ** 2))
    res = delta_invariant(curvature_from_gauss(h, c), (2, n - 2), FAST, c=c, H2=H2, theorem=Theorem.DELTA2N2)
    assert res.residual >= -1e-9


def test_bfgs_and_nelder_mead_agree():
    h = symmetrize(np.random.default_rng(3).standard_normal((5, 5, 5)))
    curv = curvature_from_gauss(h, 1.0)
    a = delta_invariant(curv, (2, 3), DeltaOptions(n_samples=500, n_refine=3, restarts=10, method="Nelder-Mead"))
    b = delta_invariant(curv, (2, 3), FAST)
    assert a.delta_value == pytest.approx(b.delta_value, abs=1e-9)


def test_rhs_formula():
    assert inequality_rhs(5, (2, 3), 1.0, 0.0, Theorem.DELTA2N2) == pytest.approx(6.0)
    assert inequality_rhs(5, (2, 3), 0.0, 1.0, Theorem.DELTA2N2) == pytest.approx(75 / 16)
