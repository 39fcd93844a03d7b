"""Immersion charts, finite-difference jets and orthonormal tangent frames."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .ambient import AmbientSpace, to_real

# Per-order steps on unit-scaled parameters.
H1 = 1e-4
H2 = 1e-3
H3 = 5e-3

_D1_OFFSETS = np.array([-2.0, -1.0, 1.0, 2.0])
_D1_WEIGHTS = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
_D2_OFFSETS = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
_D2_WEIGHTS = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


class ChartDomainError(ValueError):
    """Parameters outside the chart's domain box (or too close to its edge)."""


class ImmersionDegeneracyError(ArithmeticError):
    """Jacobian (or induced metric) is numerically rank deficient."""


@dataclass
class ImmersionChart:
    """A parametrized map from a box in R^n into an ambient space.

    ``func`` maps an array of parameter tuples of shape ``(..., n)`` to complex
    ambient coordinates of shape ``(..., m)``; ``eval`` returns them in
    interleaved real layout.
    """

    family_tag: str
    param_dim: int
    domain_box: np.ndarray
    func: Callable[[np.ndarray], np.ndarray]
    space: AmbientSpace
    metadata: dict[str, Any] = field(default_factory=dict)
    # solution objects behind the chart (profile, warp field, companions); not serialized
    payload: dict[str, Any] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.domain_box = np.asarray(self.domain_box, dtype=float).reshape(self.param_dim, 2)

    def eval(self, params) -> np.ndarray:
        params = np.asarray(params, dtype=float)
        return to_real(self.func(params))

    def contains(self, params, margin: float = 0.0) -> bool:
        params = np.asarray(params, dtype=float)
        lo, hi = self.domain_box[:, 0] + margin, self.domain_box[:, 1] - margin
        return bool(np.all(params >= lo) and np.all(params <= hi))

    def sample_interior(self, rng: np.random.Generator, count: int, margin: float = 0.05) -> np.ndarray:
        """Uniform points at least ``margin`` (absolute) inside the box."""
        lo, hi = self.domain_box[:, 0] + margin, self.domain_box[:, 1] - margin
        if np.any(hi <= lo):
            raise ChartDomainError("margin leaves an empty interior")
        return lo + (hi - lo) * rng.random((count, self.param_dim))


@dataclass
class Jet3:
    params: np.ndarray
    value: np.ndarray
    d1: np.ndarray
    d2: np.ndarray | None = None
    d3: np.ndarray | None = None
    symmetry_residual_d2: float = 0.0
    symmetry_residual_d3: float = 0.0

    @property
    def n(self) -> int:
        return self.d1.shape[0]


@dataclass
class TangentFrame:
    """Orthonormal tangent vectors ``E_a = sum_i coeffs[a, i] d1[i]``."""

    vectors: np.ndarray
    gram: np.ndarray
    coeffs: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.vectors.shape[0]


def _d1_batch(func, P, h):
    B, n = P.shape
    shifts = np.einsum("o,ij->oij", _D1_OFFSETS * h, np.eye(n))
    pts = P[:, None, None, :] + shifts[None]
    vals = func(pts.reshape(-1, n)).reshape(B, len(_D1_OFFSETS), n, -1)
    return np.einsum("o,boid->bid", _D1_WEIGHTS / h, vals)


def _d2_batch(func, P, h):
    B, n = P.shape
    eye = np.eye(n)
    pure = P[:, None, None, :] + np.einsum("o,ij->oij", _D2_OFFSETS * h, eye)[None]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if pairs:
        grid = np.array([[a, b] for a in _D1_OFFSETS for b in _D1_OFFSETS]) * h
        mixed_shift = np.zeros((len(pairs), len(grid), n))
        for p, (i, j) in enumerate(pairs):
            mixed_shift[p, :, i] = grid[:, 0]
            mixed_shift[p, :, j] = grid[:, 1]
        mixed = P[:, None, None, :] + mixed_shift[None]
        pts = np.concatenate([pure.reshape(B, -1, n), mixed.reshape(B, -1, n)], axis=1)
    else:
        pts = pure.reshape(B, -1, n)
    vals = func(pts.reshape(-1, n)).reshape(B, pts.shape[1], -1)
    D = vals.shape[-1]
    n_pure = len(_D2_OFFSETS) * n
    pure_vals = vals[:, :n_pure].reshape(B, len(_D2_OFFSETS), n, D)
    d2 = np.zeros((B, n, n, D))
    diag = np.einsum("o,boid->bid", _D2_WEIGHTS / h**2, pure_vals)
    for i in range(n):
        d2[:, i, i] = diag[:, i]
    if pairs:
        w2 = np.outer(_D1_WEIGHTS, _D1_WEIGHTS).ravel() / h**2
        mixed_vals = vals[:, n_pure:].reshape(B, len(pairs), len(grid), D)
        mix = np.einsum("g,bpgd->bpd", w2, mixed_vals)
        for p, (i, j) in enumerate(pairs):
            d2[:, i, j] = mix[:, p]
            d2[:, j, i] = mix[:, p]
    return d2


def stencil_reach(order: int, h1: float = H1, h2: float = H2, h3: float = H3) -> float:
    """Largest parameter offset touched by a jet of the given order."""
    return {1: 2 * h1, 2: 2 * max(h1, h2), 3: 2 * max(h1, h2) + 2 * h3}[order]


def evaluate_jet(chart: ImmersionChart, params, order: int = 2, *, h1=H1, h2=H2, h3=H3,
                 check_rank: bool = True) -> Jet3:
    """Value and partial derivatives up to ``order`` by 4th-order central differences.

    No one-sided stencils are used; callers must keep ``params`` at least
    ``stencil_reach(order)`` away from the domain boundary.
    """
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    p = np.asarray(params, dtype=float).reshape(-1)
    if p.size != chart.param_dim:
        raise ChartDomainError(f"expected {chart.param_dim} parameters, got {p.size}")
    if not chart.contains(p, margin=stencil_reach(order, h1, h2, h3)):
        raise ChartDomainError(f"parameters {p} outside the interior of {chart.domain_box.tolist()}")
    func = chart.eval
    P = p[None, :]
    value = func(p)
    d1 = _d1_batch(func, P, h1)[0]
    if check_rank:
        s = np.linalg.svd(d1, compute_uv=False)
        if s[-1] <= 1e-8 * max(s[0], 1e-300):
            raise ImmersionDegeneracyError(f"Jacobian rank deficient at {p} (singular values {s})")
    jet = Jet3(params=p, value=value, d1=d1)
    if order >= 2:
        d2 = _d2_batch(func, P, h2)[0]
        jet.d2 = d2
        scale = 1.0 + np.max(np.abs(d2))
        jet.symmetry_residual_d2 = float(np.max(np.abs(d2 - np.swapaxes(d2, 0, 1)))) / scale
    if order >= 3:
        n = chart.param_dim
        shifted = P[:, None, None, :] + np.einsum("o,ij->oij", _D1_OFFSETS * h3, np.eye(n))[None]
        d2s = _d2_batch(func, shifted.reshape(-1, n), h2).reshape(len(_D1_OFFSETS), n, n, n, -1)
        d3 = np.einsum("o,oijkd->ijkd", _D1_WEIGHTS / h3, d2s)
        perms = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]
        stack = np.stack([np.transpose(d3, perm + (3,)) for perm in perms])
        scale = 1.0 + np.max(np.abs(d3))
        jet.symmetry_residual_d3 = float(np.max(np.abs(stack - d3[None]))) / scale
        jet.d3 = stack.mean(axis=0)
    return jet


def orthonormal_frame(jet: Jet3, space: AmbientSpace, pivot_tol: float = 1e-8) -> TangentFrame:
    """Modified Gram-Schmidt (with one reorthogonalization pass) of the d1 rows."""
    d1 = np.asarray(jet.d1, dtype=float)
    n = d1.shape[0]
    vecs = d1.copy()
    coeffs = np.eye(n)
    scale = np.max(np.sqrt(np.abs(np.einsum("id,d,id->i", d1, space.signature_mask, d1))))
    for a in range(n):
        for _ in range(2):
            for b in range(a):
                proj = space.inner(vecs[a], vecs[b])
                vecs[a] = vecs[a] - proj * vecs[b]
                coeffs[a] = coeffs[a] - proj * coeffs[b]
        norm2 = float(space.inner(vecs[a], vecs[a]))
        if norm2 <= (pivot_tol * scale) ** 2:
            raise ImmersionDegeneracyError(
                f"tangent vector {a} degenerate under the ambient metric (|v|^2 = {norm2:.3e})"
            )
        norm = np.sqrt(norm2)
        vecs[a] /= norm
        coeffs[a] /= norm
    return TangentFrame(vectors=vecs, gram=space.gram(vecs), coeffs=coeffs)

