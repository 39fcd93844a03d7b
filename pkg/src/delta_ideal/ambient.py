"""Ambient complex space forms and their real-coordinate models.

Three targets are supported:

* ``FlatC``      -- C^n with the Euclidean metric (c = 0)
* ``SphereLift`` -- the unit sphere S^{2n+1} in C^{n+1}, horizontal lifts of
  Lagrangians in CP^n(4) (c = 1)
* ``AdSLift``    -- the anti-de Sitter space H_1^{2n+1} in C_1^{n+1}, horizontal
  lifts of Lagrangians in CH^n(-4) (c = -1)

Complex vectors are stored as real arrays in interleaved layout
``(Re z1, Im z1, Re z2, Im z2, ...)``.  In the AdS model the first complex
slot is timelike.  All functions accept stacked vectors (leading batch axes)
and operate along the last axis.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np


class SpaceKind(str, enum.Enum):
    FLAT = "FlatC"
    SPHERE = "SphereLift"
    ADS = "AdSLift"


_CURVATURE = {SpaceKind.FLAT: 0.0, SpaceKind.SPHERE: 1.0, SpaceKind.ADS: -1.0}


class AmbientError(ValueError):
    """Raised on dimension mismatches or operations invalid for a space."""


@dataclass(frozen=True)
class AmbientSpace:
    kind: SpaceKind
    complex_dim_n: int
    signature_mask: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        kind = SpaceKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if self.complex_dim_n < 1:
            raise AmbientError("complex_dim_n must be positive")
        mask = np.ones(self.real_dim)
        if kind is SpaceKind.ADS:
            mask[:2] = -1.0
        mask.setflags(write=False)
        object.__setattr__(self, "signature_mask", mask)

    @classmethod
    def flat(cls, n: int) -> "AmbientSpace":
        return cls(SpaceKind.FLAT, n)

    @classmethod
    def sphere(cls, n: int) -> "AmbientSpace":
        return cls(SpaceKind.SPHERE, n)

    @classmethod
    def ads(cls, n: int) -> "AmbientSpace":
        return cls(SpaceKind.ADS, n)

    @classmethod
    def from_curvature(cls, c: float, n: int) -> "AmbientSpace":
        for kind, value in _CURVATURE.items():
            if value == c:
                return cls(kind, n)
        raise AmbientError(f"curvature c={c} not in {{-1, 0, 1}}")

    @property
    def c(self) -> float:
        return _CURVATURE[self.kind]

    @property
    def epsilon(self) -> float:
        """+1 on the sphere model, -1 on the AdS model, 0 for flat space."""
        return {SpaceKind.FLAT: 0.0, SpaceKind.SPHERE: 1.0, SpaceKind.ADS: -1.0}[self.kind]

    @property
    def is_lift(self) -> bool:
        return self.kind is not SpaceKind.FLAT

    @property
    def ambient_complex_dim(self) -> int:
        return self.complex_dim_n + (1 if self.is_lift else 0)

    @property
    def real_dim(self) -> int:
        return 2 * self.ambient_complex_dim

    @property
    def complex_signature(self) -> np.ndarray:
        return self.signature_mask[::2]

    def _check(self, *vectors):
        for v in vectors:
            if np.shape(v)[-1] != self.real_dim:
                raise AmbientError(
                    f"vector of length {np.shape(v)[-1]} in ambient of real dimension {self.real_dim}"
                )

    def inner(self, X, Y):
        """Real (pseudo-)inner product, i.e. Re of the Hermitian form."""
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        self._check(X, Y)
        return np.sum(self.signature_mask * X * Y, axis=-1)

    def gram(self, A, B=None):
        """Matrix of inner products between the rows of ``A`` and ``B``."""
        A = np.asarray(A, dtype=float)
        B = A if B is None else np.asarray(B, dtype=float)
        self._check(A, B)
        return (A * self.signature_mask) @ np.swapaxes(B, -1, -2)

    def apply_J(self, X):
        return apply_J(X)

    def lift_constraint_residuals(self, point, tangent_frame) -> tuple[float, float]:
        """Distance from the lift quadric and from the horizontal distribution.

        Returns ``(|<p,p> - eps|, max_V |<V, J p>|)``.
        """
        if not self.is_lift:
            raise AmbientError("lift constraints are undefined for FlatC")
        point = np.asarray(point, dtype=float)
        frame = np.atleast_2d(np.asarray(tangent_frame, dtype=float))
        self._check(point, frame)
        norm_res = abs(float(self.inner(point, point)) - self.epsilon)
        if frame.size == 0:
            return norm_res, 0.0
        horiz = np.abs(self.inner(frame, apply_J(point)))
        return norm_res, float(np.max(horiz))


def apply_J(X):
    """Multiplication by i in interleaved real layout."""
    X = np.asarray(X, dtype=float)
    if X.shape[-1] % 2:
        raise AmbientError("odd real dimension has no complex structure")
    out = np.empty_like(X)
    out[..., 0::2] = -X[..., 1::2]
    out[..., 1::2] = X[..., 0::2]
    return out


def to_real(z) -> np.ndarray:
    """Complex array (..., m) -> interleaved real array (..., 2m)."""
    z = np.ascontiguousarray(z, dtype=complex)
    return z.view(float).reshape(z.shape[:-1] + (2 * z.shape[-1],))


def to_complex(x) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=float)
    if x.shape[-1] % 2:
        raise AmbientError("odd real dimension has no complex structure")
    return x.view(complex).reshape(x.shape[:-1] + (x.shape[-1] // 2,))


def hermitian(z, w, signature=None):
    """Hermitian product sum_k s_k z_k conj(w_k) along the last axis."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if signature is None:
        return np.sum(z * np.conj(w), axis=-1)
    return np.sum(np.asarray(signature) * z * np.conj(w), axis=-1)
