import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from delta_ideal.ambient import AmbientError, AmbientSpace, SpaceKind, apply_J, hermitian, to_complex, to_real

finite = st.floats(-10, 10, allow_nan=False)


def test_curvature_constants():
    assert AmbientSpace.flat(5).c == 0.0
    assert AmbientSpace.sphere(5).c == 1.0
    assert AmbientSpace.ads(5).c == -1.0
    assert AmbientSpace.from_curvature(-1.0, 4).kind is SpaceKind.ADS


def test_dimensions_and_signature():
    flat, sph, ads = AmbientSpace.flat(5), AmbientSpace.sphere(5), AmbientSpace.ads(5)
    assert (flat.real_dim, sph.real_dim, ads.real_dim) == (10, 12, 12)
    assert np.all(sph.complex_signature == 1)
    assert ads.complex_signature.tolist() == [-1, 1, 1, 1, 1, 1]


def test_flat_unit_vector():
    e1 = np.zeros(10)
    e1[0] = 1
    assert AmbientSpace.flat(5).inner(e1, e1) == 1.0


def test_dimension_mismatch():
    with pytest.raises(AmbientError):
        AmbientSpace.flat(5).inner(np.ones(8), np.ones(8))


def test_lift_constraints_on_sphere_point():
    sph = AmbientSpace.sphere(2)
    p = to_real(np.array([np.cos(0.3), 1j * np.sin(0.3), 0]))
    # horizontal tangent: orthogonal to p and to J p
    v = to_real(np.array([0, 0, 1.0]))
    norm_res, horiz = sph.lift_constraint_residuals(p, v[None])
    assert norm_res < 1e-15 and horiz < 1e-15
    _, bad = sph.lift_constraint_residuals(p, apply_J(p)[None])
    assert bad == pytest.approx(1.0)


def test_lift_constraints_undefined_in_flat():
    with pytest.raises(AmbientError):
        AmbientSpace.flat(2).lift_constraint_residuals(np.zeros(4), np.zeros((1, 4)))


def test_ads_timelike_first_slot():
    ads = AmbientSpace.ads(2)
    p = to_real(np.array([1.0, 0, 0]))
    assert ads.inner(p, p) == -1.0


@given(arrays(float, (3, 6), elements=finite), st.sampled_from(["flat", "sphere", "ads"]))
def test_J_is_an_isometry_and_skew(X, which):
    # all three have real dimension 6
    space = {"flat": AmbientSpace.flat(3), "sphere": AmbientSpace.sphere(2), "ads": AmbientSpace.ads(2)}[which]
    a, b = X[0], X[1]
    assert np.isclose(space.inner(apply_J(a), apply_J(b)), space.inner(a, b), atol=1e-9)
    assert abs(space.inner(apply_J(a), a)) < 1e-9
    assert np.allclose(apply_J(apply_J(a)), -a)


@given(arrays(float, (4, 6), elements=finite))
def test_real_complex_round_trip(X):
    assert np.array_equal(to_real(to_complex(X)), X)


@given(arrays(float, 6, elements=finite), arrays(float, 6, elements=finite))
def test_inner_is_real_part_of_hermitian(x, y):
    sig = AmbientSpace.ads(2).complex_signature
    h = hermitian(to_complex(x), to_complex(y), sig)
    assert np.isclose(AmbientSpace.ads(2).inner(x, y), h.real, atol=1e-9)
