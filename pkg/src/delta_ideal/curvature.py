"""Curvature of Lagrangian immersions.

Convention: ``R[i, j, k, l] = <R(e_i, e_j) e_k, e_l>`` with
``R(X, Y) = [nabla_X, nabla_Y] - nabla_[X,Y]``, so that the sectional
curvature is ``K(e_i ^ e_j) = R[i, j, j, i]`` and the unit sphere has K = +1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .ambient import AmbientSpace, apply_J
from .jets import (ChartDomainError, ImmersionChart, _D1_OFFSETS, _D1_WEIGHTS, _D2_OFFSETS,
                   _D2_WEIGHTS, _d1_batch, evaluate_jet, orthonormal_frame, stencil_reach)
from .shape import CubicTensor

METRIC_STEP = 5e-3


class CurvatureSource(str, enum.Enum):
    GAUSS = "GaussEquation"
    METRIC_FD = "MetricFiniteDifference"
    ANALYTIC = "Analytic"


@dataclass
class CurvatureOperator:
    R: np.ndarray
    source: CurvatureSource = CurvatureSource.ANALYTIC

    @property
    def n(self) -> int:
        return self.R.shape[0]

    def sectional(self, i: int, j: int) -> float:
        return float(self.R[i, j, j, i])

    def sectional_matrix(self) -> np.ndarray:
        return np.einsum("ijji->ij", self.R)

    def scalar(self) -> float:
        """tau(p): sum of sectional curvatures over i < j."""
        return 0.5 * float(np.einsum("ijji->", self.R))

    def symmetry_residuals(self) -> dict:
        R = self.R
        return {
            "antisym_12": float(np.max(np.abs(R + np.transpose(R, (1, 0, 2, 3))))),
            "antisym_34": float(np.max(np.abs(R + np.transpose(R, (0, 1, 3, 2))))),
            "pair": float(np.max(np.abs(R - np.transpose(R, (2, 3, 0, 1))))),
            "bianchi": bianchi_residual(R),
        }


def bianchi_residual(R) -> float:
    R = np.asarray(R)
    cyc = R + np.transpose(R, (1, 2, 0, 3)) + np.transpose(R, (2, 0, 1, 3))
    return float(np.max(np.abs(cyc)))


def constant_curvature(n: int, c: float) -> CurvatureOperator:
    d = np.eye(n)
    R = c * (np.einsum("il,jk->ijkl", d, d) - np.einsum("ik,jl->ijkl", d, d))
    return CurvatureOperator(R=R, source=CurvatureSource.ANALYTIC)


def product_curvature(dims, curvatures) -> CurvatureOperator:
    """Riemannian product of space forms, blocks in the given order."""
    n = int(sum(dims))
    R = np.zeros((n, n, n, n))
    start = 0
    for m, c in zip(dims, curvatures):
        sl = slice(start, start + m)
        R[sl, sl, sl, sl] = constant_curvature(m, c).R
        start += m
    return CurvatureOperator(R=R, source=CurvatureSource.ANALYTIC)


def curvature_from_gauss(cubic: CubicTensor | np.ndarray, c: float) -> CurvatureOperator:
    h = cubic.h if isinstance(cubic, CubicTensor) else np.asarray(cubic, dtype=float)
    n = h.shape[0]
    R = constant_curvature(n, c).R
    R = R + np.einsum("cil,cjk->ijkl", h, h) - np.einsum("cik,cjl->ijkl", h, h)
    return CurvatureOperator(R=R, source=CurvatureSource.GAUSS)


def tau_subspace(curv: CurvatureOperator, basis, tol: float = 1e-8) -> float:
    """Scalar curvature of the subspace spanned by the orthonormal rows of ``basis``."""
    V = np.atleast_2d(np.asarray(basis, dtype=float))
    if np.max(np.abs(V @ V.T - np.eye(V.shape[0]))) > tol:
        raise ValueError("basis of tau_subspace is not orthonormal")
    P = V.T @ V
    return 0.5 * float(np.einsum("ijkl,il,jk->", curv.R, P, P))


def _metric_derivatives(chart: ImmersionChart, p: np.ndarray, space: AmbientSpace, hm: float, h1: float):
    """g, dg[k, i, j] = d_k g_ij and ddg[k, l, i, j] at ``p`` by nested differences."""
    n = p.size
    eye = np.eye(n)
    pts = [p[None, :]]
    pts.append((p + np.einsum("o,ij->oij", _D2_OFFSETS * hm, eye)).reshape(-1, n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    grid = np.array([[a, b] for a in _D1_OFFSETS for b in _D1_OFFSETS]) * hm
    for (i, j) in pairs:
        shift = np.zeros((len(grid), n))
        shift[:, i], shift[:, j] = grid[:, 0], grid[:, 1]
        pts.append(p + shift)
    P = np.vstack(pts)
    d1 = _d1_batch(chart.eval, P, h1)
    G = np.einsum("bid,d,bjd->bij", d1, space.signature_mask, d1)
    g = G[0]
    pure = G[1:1 + 5 * n].reshape(5, n, n, n)
    dg = np.einsum("o,okij->kij", _D1_WEIGHTS / hm, pure[[0, 1, 3, 4]])
    ddg = np.zeros((n, n, n, n))
    diag = np.einsum("o,okij->kij", _D2_WEIGHTS / hm**2, pure)
    for k in range(n):
        ddg[k, k] = diag[k]
    w2 = np.outer(_D1_WEIGHTS, _D1_WEIGHTS).ravel() / hm**2
    mixed = G[1 + 5 * n:].reshape(len(pairs), len(grid), n, n)
    for q, (i, j) in enumerate(pairs):
        val = np.einsum("g,gab->ab", w2, mixed[q])
        ddg[i, j] = val
        ddg[j, i] = val
    return g, dg, ddg


def riemann_fd(chart: ImmersionChart, params, space: AmbientSpace, *, hm: float = METRIC_STEP,
               h1: float = 1e-4, frame=None) -> CurvatureOperator:
    """Riemann tensor of the induced metric from its finite-difference derivatives.

    Uses only first derivatives of the chart (through the metric), so it is
    independent of the second fundamental form.  The result is expressed in the
    same orthonormal frame that ``orthonormal_frame`` builds at ``params``.
    """
    p = np.asarray(params, dtype=float).reshape(-1)
    if not chart.contains(p, margin=2 * hm + 2 * h1):
        raise ChartDomainError(f"riemann_fd needs a margin of {2 * hm + 2 * h1} around {p}")
    g, dg, ddg = _metric_derivatives(chart, p, space, hm, h1)
    ginv = np.linalg.inv(g)
    # Christoffel symbols of the first kind: gam1[m, i, j] = Gamma_{m i j} (m lowered)
    gam1 = 0.5 * (np.einsum("ijm->mij", dg) + np.einsum("jim->mij", dg) - dg)
    gam = np.einsum("lm,mij->lij", ginv, gam1)
    # d_k Gamma_{m i j}
    dgam1 = 0.5 * (np.einsum("kijm->kmij", ddg) + np.einsum("kjim->kmij", ddg)
                   - np.einsum("kmij->kmij", ddg))
    dginv = -np.einsum("la,kab,bm->klm", ginv, dg, ginv)
    dgam = np.einsum("lm,kmij->klij", ginv, dgam1) + np.einsum("klm,mij->klij", dginv, gam1)
    # R^l_{ijk} = d_i Gamma^l_jk - d_j Gamma^l_ik + Gamma^l_im Gamma^m_jk - Gamma^l_jm Gamma^m_ik
    Rup = (np.einsum("iljk->lijk", dgam) - np.einsum("jlik->lijk", dgam)
           + np.einsum("lim,mjk->lijk", gam, gam) - np.einsum("ljm,mik->lijk", gam, gam))
    Rc = np.einsum("lm,mijk->ijkl", g, Rup)
    if frame is None:
        frame = orthonormal_frame(evaluate_jet(chart, p, order=1, h1=h1), space)
    C = frame.coeffs
    R = np.einsum("ai,bj,ck,dl,ijkl->abcd", C, C, C, C, Rc)
    return CurvatureOperator(R=R, source=CurvatureSource.METRIC_FD)


def codazzi_residual(chart: ImmersionChart, params, space: AmbientSpace, jet=None) -> float:
    """max |(nabla_X h)(Y, Z) - (nabla_Y h)(X, Z)| over orthonormal frame triples.

    With C_jkl = <D_j d_k L, J d_l L> the coordinate cubic form, the Lagrangian
    identity nabla^perp J = J nabla turns Codazzi into total symmetry of nabla C.
    """
    p = np.asarray(params, dtype=float).reshape(-1)
    if jet is None:
        if not chart.contains(p, margin=stencil_reach(3)):
            raise ChartDomainError(f"codazzi_residual needs a margin of {stencil_reach(3)} around {p}")
        jet = evaluate_jet(chart, p, order=3)
    eta = space.signature_mask
    d1, d2, d3 = jet.d1, jet.d2, jet.d3
    Jd1, Jd2 = apply_J(d1), apply_J(d2)
    g = np.einsum("id,d,jd->ij", d1, eta, d1)
    ginv = np.linalg.inv(g)
    gam = np.einsum("mk,ijd,d,kd->mij", ginv, d2, eta, d1)
    C = np.einsum("jkd,d,ld->jkl", d2, eta, Jd1)
    dC = np.einsum("ijkd,d,ld->ijkl", d3, eta, Jd1) + np.einsum("jkd,d,ild->ijkl", d2, eta, Jd2)
    nabla = (dC - np.einsum("mij,mkl->ijkl", gam, C) - np.einsum("mik,jml->ijkl", gam, C)
             - np.einsum("mil,jkm->ijkl", gam, C))
    T = nabla - np.transpose(nabla, (1, 0, 2, 3))
    F = orthonormal_frame(jet, space).coeffs
    Tf = np.einsum("ai,bj,ck,dl,ijkl->abcd", F, F, F, F, T)
    return float(np.max(np.abs(Tf)))
