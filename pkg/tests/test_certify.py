import math

import pytest

from delta_ideal.families.certify import (ChartCertificate, _finalize, certify_chart, certify_family,
                                          resolve_variants)
from delta_ideal.graphs import random_graph_chart
from delta_ideal.pipeline import PointRecord


def record(**kw):
    base = dict(lagrangian_res=0.0, lift_norm_res=0.0, lift_horizontal_res=0.0, cubic_sym_res=0.0,
                gauss_res=0.0, codazzi_res=0.0, delta=1.0, rhs=1.0, case="CaseII", pattern_res=0.0)
    rec = PointRecord(params=[0.0])
    for k, v in {**base, **kw}.items():
        setattr(rec, k, v)
    return rec


def test_nan_residual_fails():
    cert = _finalize(ChartCertificate("X", 5, None, "CaseII", records=[record(), record(gauss_res=math.nan)]))
    assert cert.maxima["gauss_res"] == math.inf
    assert not cert.structural_ok


def test_nan_delta_fails_ideality():
    cert = _finalize(ChartCertificate("X", 5, None, "CaseII", records=[record(delta=math.nan)]))
    assert not cert.ideal_ok


def test_wrong_case_fails_but_ambiguous_is_tolerated():
    recs = [record() for _ in range(199)] + [record(case="Ambiguous")]
    assert _finalize(ChartCertificate("X", 5, None, "CaseII", records=recs)).classification_ok
    recs[-1] = record(case="CaseIII")
    assert not _finalize(ChartCertificate("X", 5, None, "CaseII", records=recs)).classification_ok


def test_empty_certificate_fails():
    assert not _finalize(ChartCertificate("X", 5, None, None)).passed


def test_family_certificate():
    cert = certify_family("Cn_II", 5, n_points=3, seed=1)
    assert cert.passed, cert.summary()
    assert cert.case_counts == {"CaseII": 3}


def test_graph_is_structurally_sound_and_strictly_below_equality():
    cert = certify_chart(random_graph_chart(5, 0), n_points=2, seed=0)
    assert cert.structural_ok and cert.classification_ok
    assert not cert.ideal_ok
    assert cert.maxima["min_rhs_minus_delta"] > 0


def test_variant_resolution_light_like_case2():
    res = resolve_variants("CHn_IIc", 5, n_points=2, seed=0)
    s = res.summary()
    assert s["exactly_one"] and res.selected == "unit_norm"
    assert res.certificates["half_angle"].errors


def test_variant_resolution_light_like_case3():
    res = resolve_variants("CHn_IIIc", 5, n_points=2, seed=0)
    assert res.selected == "phase_minus"
    assert res.certificates["phase_plus"].construction_error


def test_construction_error_is_reported():
    cert = certify_family("CHn_IIIc", 5, n_points=1, variant="phase_plus")
    assert "incompatible" in cert.construction_error
    assert not cert.passed
