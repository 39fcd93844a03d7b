import numpy as np
import pytest

from delta_ideal.families.charts import construct_family
from delta_ideal.families.companions import (CompanionKind, CompanionVariant, InconsistentFieldError,
                                             integrate_companions)
from delta_ideal.families.warp import solve_warp_field
from delta_ideal.pipeline import analyze_point, sample_points
from delta_ideal.shape import LagrangianInconsistencyError


@pytest.fixture(scope="module")
def cn_warp():
    return solve_warp_field("Cn_III", 5, "Reduced1D", (-0.35, 0.35, 0.0), (1.0, 0.0))


def test_cn_companion_is_iy(cn_warp):
    """With f = cos(4x)^(1/4) and n = 5, z_x = 0 and z_y = i, so z = i y."""
    comp = integrate_companions(cn_warp)
    assert comp.kind is CompanionKind.Z
    x = np.linspace(-0.3, 0.3, 41)
    y = np.linspace(-0.4, 0.4, 41)
    z = comp.evaluate(x, y)["z"]
    assert np.max(np.abs(z - 1j * y)) <= 1e-8
    h = 1e-5
    zx = (comp.evaluate(x + h, y)["z"] - comp.evaluate(x - h, y)["z"]) / (2 * h)
    zy = (comp.evaluate(x, y + h)["z"] - comp.evaluate(x, y - h)["z"]) / (2 * h)
    assert np.max(np.abs(zx)) <= 1e-8
    assert np.max(np.abs(zy - 1j)) <= 1e-8
    assert comp.residuals["compatibility"] < 1e-6


def test_cp_theta_rows_stay_unit():
    w = solve_warp_field("CPn_III", 5, "Reduced1D", (-0.3, 0.3, 0.0), (0.5, 0.0))
    comp = integrate_companions(w)
    X, Y = np.meshgrid(np.linspace(-0.25, 0.25, 21), np.linspace(-0.4, 0.4, 21))
    theta = comp.evaluate(X, Y)["Theta"]
    norms = np.sum(np.abs(theta) ** 2, axis=-1)
    assert np.max(np.abs(norms - 1)) <= 1e-7


@pytest.mark.parametrize("kind,f0", [("CHn_IIIa", 0.5), ("CHn_IIIb", 1.5)])
def test_lift_systems_are_compatible(kind, f0):
    w = solve_warp_field(kind, 5, "Reduced1D", (-0.3, 0.3, 0.0), (f0, 0.0))
    assert integrate_companions(w).residuals["compatibility"] < 1e-6


def light_like_warp():
    return solve_warp_field("CHn_IIIc", 5, "Reduced1D", (-0.5, 0.5, 0.0), (1.0, 0.0), axis="y")


def test_light_like_variants():
    w = light_like_warp()
    assert integrate_companions(w, CompanionVariant.PHASE_MINUS).residuals["compatibility"] < 1e-6
    with pytest.raises(InconsistentFieldError):
        integrate_companions(w, CompanionVariant.PHASE_PLUS)


def test_incompatible_fields_fail_downstream_when_unchecked():
    chart = construct_family("CHn_IIIc", 5)
    w = chart.payload["warp"]
    comp = integrate_companions(w, CompanionVariant.PHASE_PLUS, compat_tol=None)
    assert comp.residuals["compatibility"] > 1e-3
    from delta_ideal.families.blocks import builtin_block
    from delta_ideal.families.charts import build_case3_chart

    bad = build_case3_chart(chart.space, w, comp, builtin_block("FlatLagrangianSubspace", 3, certify=False),
                            y_window=(-0.2, 0.2))
    with pytest.raises(LagrangianInconsistencyError):
        for p in sample_points(bad, 5, 0):
            analyze_point(bad, p, checks=("lagrangian",))


def test_light_like_lift_norm():
    chart = construct_family("CHn_IIIc", 5)
    pts = sample_points(chart, 20, 3)
    L = chart.eval(pts)
    assert np.max(np.abs(chart.space.inner(L, L) + 1)) <= 1e-6
