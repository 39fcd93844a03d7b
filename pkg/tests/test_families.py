import numpy as np
import pytest

from delta_ideal.families.blocks import BlockError, BlockName, builtin_block, list_blocks
from delta_ideal.families.charts import FAMILIES, FamilyError, construct_family
from delta_ideal.jets import ImmersionDegeneracyError
from delta_ideal.pipeline import analyze_point, sample_points


def test_block_catalog():
    names = {b["name"] for b in list_blocks()}
    assert names == {b.value for b in BlockName}


@pytest.mark.parametrize("name", [BlockName.SPHERE, BlockName.HYPERBOLIC, BlockName.FLAT])
def test_totally_geodesic_and_flat_blocks_certify(name):
    b = builtin_block(name, 4)
    assert b.certified_minimal_ideal
    assert b.certification["max_H2"] <= 1e-10


def test_torus_is_minimal_but_not_ideal():
    b = builtin_block(BlockName.TORUS, 4)
    assert b.certification["max_H2"] <= 1e-10
    assert not b.certified_minimal_ideal


def test_block_argument_checks():
    with pytest.raises(BlockError):
        builtin_block(BlockName.SPHERE, 3, ambient="AdSLift")
    with pytest.raises(BlockError):
        builtin_block(BlockName.TORUS, 1)
    assert builtin_block(BlockName.SPHERE, 2).certification["passed"] is False


def test_sphere_block_lands_on_the_sphere():
    b = builtin_block(BlockName.SPHERE, 3, certify=False)
    u = np.random.default_rng(0).uniform(-0.5, 0.5, (10, 3))
    assert np.allclose(np.sum(np.abs(b(u)) ** 2, axis=-1), 1.0)


def test_unknown_family_and_small_n():
    with pytest.raises(FamilyError):
        construct_family("Cn_IV", 5)
    with pytest.raises(FamilyError):
        construct_family("Cn_II", 4)


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_family_charts_build(name):
    chart = construct_family(name, 5)
    assert chart.param_dim == 5
    assert chart.metadata["family"] == name
    assert chart.metadata["case"] == FAMILIES[name].case
    p = sample_points(chart, 1, 0)[0]
    assert np.all(np.isfinite(chart.eval(p)))


def test_half_angle_light_like_case2_is_degenerate():
    chart = construct_family("CHn_IIc", 5, variant="half_angle")
    with pytest.raises(ImmersionDegeneracyError):
        analyze_point(chart, sample_points(chart, 1, 0)[0], checks=("lagrangian",))


def test_cp_case3_lift_constraints():
    chart = construct_family("CPn_III", 5)
    warp = chart.payload["warp"]
    pts = sample_points(chart, 10, 1)
    f, _, _ = warp.derivatives(pts[:, 0], pts[:, 1])
    assert np.all((f > 0.3) & (f < 0.7))
    for p in pts:
        rec = analyze_point(chart, p, checks=("lagrangian", "lift"))
        assert rec.lift_norm_res < 1e-8
        assert rec.lift_horizontal_res < 1e-7


def test_cn_case2_profile_payload():
    chart = construct_family("Cn_II", 6)
    prof = chart.payload["profile"]
    assert prof.max_conserved_drift() < 1e-8
