"""Building-block immersions used as the fibre factor of the families."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from ..ambient import AmbientSpace, SpaceKind
from ..jets import ImmersionChart

# Gauss-Legendre nodes for line-integrated potentials of the blocks.
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


class BlockName(str, enum.Enum):
    SPHERE = "TotallyGeodesicLegendreSphere"
    HYPERBOLIC = "TotallyGeodesicLegendreHyperbolic"
    FLAT = "FlatLagrangianSubspace"
    TORUS = "MinimalLagrangianTorus"


class BlockError(ValueError):
    pass


_AMBIENT = {
    BlockName.SPHERE: SpaceKind.SPHERE,
    BlockName.HYPERBOLIC: SpaceKind.ADS,
    BlockName.FLAT: SpaceKind.FLAT,
    BlockName.TORUS: SpaceKind.SPHERE,
}


@dataclass
class BuildingBlock:
    name: BlockName
    dim: int
    chart: ImmersionChart
    jac: object
    certified_minimal_ideal: bool = False
    certification: dict = field(default_factory=dict)

    @property
    def space(self) -> AmbientSpace:
        return self.chart.space

    def __call__(self, u):
        return self.chart.func(u)

    def potential(self, u, base=None):
        """w(u) with dw = sum_k <Phi, i d_k Phi> du_k, integrated on the segment from ``base``.

        The 1-form is closed for a Lagrangian block, so the path does not
        matter.  <X, iY> is taken with the block's own signature.
        """
        u = np.asarray(u, dtype=float)
        base = np.zeros(self.dim) if base is None else np.asarray(base, dtype=float)
        sig = self.space.complex_signature
        d = (u - base).reshape(-1, self.dim)
        s = 0.5 * (_GL_NODES + 1.0)
        pts = (base + s[:, None, None] * d[None]).reshape(-1, self.dim)
        val = self.chart.func(pts)
        J = self.jac(pts)
        integrand = np.einsum("m,pm,pkm->pk", sig, val, np.conj(1j * J)).real
        integrand = integrand.reshape(len(s), -1, self.dim)
        w = 0.5 * np.einsum("q,qbk,bk->b", _GL_WEIGHTS, integrand, d)
        return w.reshape(u.shape[:-1])


def _sphere(u):
    u = np.asarray(u, dtype=float)
    r = np.sqrt(1.0 + np.sum(u * u, axis=-1, keepdims=True))
    return (np.concatenate([np.ones_like(r), u], axis=-1) / r).astype(complex)


def _sphere_jac(u):
    u = np.asarray(u, dtype=float)
    m = u.shape[-1]
    r2 = 1.0 + np.sum(u * u, axis=-1)
    r = np.sqrt(r2)[..., None, None]
    x = np.concatenate([np.ones(u.shape[:-1] + (1,)), u], axis=-1)
    e = np.concatenate([np.zeros((m, 1)), np.eye(m)], axis=-1)
    return (e / r - u[..., :, None] * x[..., None, :] / r**3).astype(complex)


def _hyperbolic(u):
    u = np.asarray(u, dtype=float)
    r = np.sqrt(1.0 - np.sum(u * u, axis=-1, keepdims=True))
    return (np.concatenate([np.ones_like(r), u], axis=-1) / r).astype(complex)


def _hyperbolic_jac(u):
    u = np.asarray(u, dtype=float)
    m = u.shape[-1]
    r2 = 1.0 - np.sum(u * u, axis=-1)
    r = np.sqrt(r2)[..., None, None]
    x = np.concatenate([np.ones(u.shape[:-1] + (1,)), u], axis=-1)
    e = np.concatenate([np.zeros((m, 1)), np.eye(m)], axis=-1)
    return (e / r + u[..., :, None] * x[..., None, :] / r**3).astype(complex)


def _flat(u):
    return np.asarray(u, dtype=float).astype(complex)


def _flat_jac(u):
    u = np.asarray(u, dtype=float)
    return np.broadcast_to(np.eye(u.shape[-1]), u.shape + (u.shape[-1],)).astype(complex)


def _torus(u):
    u = np.asarray(u, dtype=float)
    m = u.shape[-1] + 1
    ang = np.concatenate([u, -np.sum(u, axis=-1, keepdims=True)], axis=-1)
    return np.exp(1j * ang) / np.sqrt(m)


def _torus_jac(u):
    u = np.asarray(u, dtype=float)
    k = u.shape[-1]
    m = k + 1
    z = _torus(u)
    coef = np.concatenate([np.eye(k), -np.ones((k, 1))], axis=-1)
    return 1j * coef * z[..., None, :]


_IMPL = {
    BlockName.SPHERE: (_sphere, _sphere_jac, 0.6),
    BlockName.HYPERBOLIC: (_hyperbolic, _hyperbolic_jac, 0.35),
    BlockName.FLAT: (_flat, _flat_jac, 1.0),
    BlockName.TORUS: (_torus, _torus_jac, np.pi),
}


def block_chart(name, dim: int) -> tuple[ImmersionChart, object]:
    name = BlockName(name)
    func, jac, half = _IMPL[name]
    space = AmbientSpace(_AMBIENT[name], dim)
    box = np.tile([-half, half], (dim, 1))
    chart = ImmersionChart(family_tag=f"Block_{name.value}", param_dim=dim, domain_box=box,
                           func=func, space=space, metadata={"block": name.value})
    return chart, jac


def certify_block(block: BuildingBlock, n_points: int = 8, seed: int = 0, tol: float = 1e-4) -> dict:
    """Measure H and the delta(dim-1) equality residual at sample points."""
    from ..pipeline import block_point_report

    rng = np.random.default_rng(seed)
    pts = block.chart.sample_interior(rng, n_points, margin=0.1 * (block.chart.domain_box[0, 1]
                                                                   - block.chart.domain_box[0, 0]))
    reports = [block_point_report(block.chart, p) for p in pts]
    max_h2 = max(r["H2"] for r in reports)
    max_res = max(abs(r["ideality_res"]) for r in reports)
    max_lag = max(r["lagrangian_res"] for r in reports)
    return {
        "points": n_points,
        "max_H2": max_h2,
        "max_abs_ideality_res": max_res,
        "max_lagrangian_res": max_lag,
        "passed": bool(max_h2 <= 1e-10 and max_res <= tol and max_lag <= 1e-7),
    }


def builtin_block(name, dim: int, ambient: SpaceKind | str | None = None, *,
                  certify: bool = True, seed: int = 0) -> BuildingBlock:
    """Construct a catalog block and (by default) run its certification."""
    name = BlockName(name)
    if ambient is not None and SpaceKind(ambient) is not _AMBIENT[name]:
        raise BlockError(f"{name.value} lives in {_AMBIENT[name].value}, not {SpaceKind(ambient).value}")
    if dim < 1:
        raise BlockError("block dimension must be positive")
    if name is BlockName.TORUS and dim < 2:
        raise BlockError("torus block needs dimension >= 2")
    chart, jac = block_chart(name, dim)
    block = BuildingBlock(name=name, dim=dim, chart=chart, jac=jac)
    if certify and dim >= 3:
        block.certification = certify_block(block, seed=seed)
        block.certified_minimal_ideal = block.certification["passed"]
    elif certify:
        block.certification = {"passed": False, "reason": "delta(dim-1) needs dim >= 3"}
    return block


def list_blocks() -> list[dict]:
    return [{"name": n.value, "ambient": _AMBIENT[n].value} for n in BlockName]
