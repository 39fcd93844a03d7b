"""Per-point verification pipeline shared by the certification suite and the CLI."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .curvature import codazzi_residual, curvature_from_gauss, riemann_fd
from .delta import DeltaOptions, Theorem, delta_invariant
from .ideal import IDEAL_TOL, classify_case
from .rng import point_streams
from .jets import ChartDomainError, ImmersionChart, evaluate_jet, orthonormal_frame, stencil_reach
from .shape import lagrangian_residual, second_fundamental_form, symmetrize, CubicTensor

# clearance from the box edge: third-order stencil plus the metric-difference reach
DEFAULT_MARGIN = stencil_reach(3) + 2e-2 + 1e-3

ALL_CHECKS = ("lagrangian", "lift", "cubic_symmetry", "gauss", "codazzi", "delta", "classify")


@dataclass
class PointRecord:
    params: list
    lagrangian_res: float = float("nan")
    lift_norm_res: float = float("nan")
    lift_horizontal_res: float = float("nan")
    cubic_sym_res: float = float("nan")
    gauss_res: float = float("nan")
    codazzi_res: float = float("nan")
    delta: float = float("nan")
    rhs: float = float("nan")
    ideality_res: float = float("nan")
    H2: float = float("nan")
    case: str = ""
    gamma: float = float("nan")
    lam: float = float("nan")
    mu: float = float("nan")
    pattern_res: float = float("nan")
    position_res: float = float("nan")
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


def default_delta_options(seed: int = 0) -> DeltaOptions:
    return DeltaOptions(n_samples=2000, n_refine=4, restarts=20, seed=seed)


def analyze_point(chart: ImmersionChart, params, *, checks=ALL_CHECKS, parts=None,
                  theorem: Theorem | str = Theorem.DELTA2N2, delta_opts: DeltaOptions | None = None,
                  ideal_tol: float = IDEAL_TOL) -> PointRecord:
    """Run the enabled residual checks, delta and the case classifier at one point."""
    space = chart.space
    n = chart.param_dim
    p = np.asarray(params, dtype=float)
    rec = PointRecord(params=p.tolist())
    checks = set(checks)
    order = 3 if "codazzi" in checks else 2
    jet = evaluate_jet(chart, p, order=order)
    rec.lagrangian_res = lagrangian_residual(jet, space)
    frame = orthonormal_frame(jet, space)
    if space.is_lift:
        rec.lift_norm_res, rec.lift_horizontal_res = space.lift_constraint_residuals(jet.value, frame.vectors)
    else:
        rec.lift_norm_res = rec.lift_horizontal_res = 0.0
    raw = second_fundamental_form(jet, space, frame)
    rec.cubic_sym_res = raw.symmetry_residual()
    rec.position_res = raw.diagnostics.get("position_residual", 0.0)
    cubic = CubicTensor(h=symmetrize(raw.h), frame=frame, diagnostics=raw.diagnostics)
    rec.H2 = cubic.H2
    curv = curvature_from_gauss(cubic, space.c)
    if "gauss" in checks:
        fd = riemann_fd(chart, p, space, frame=frame)
        rec.gauss_res = float(np.max(np.abs(fd.R - curv.R)))
    if "codazzi" in checks:
        rec.codazzi_res = codazzi_residual(chart, p, space, jet=jet)
    if "delta" in checks or "classify" in checks:
        if parts is None:
            parts = (2, n - 2)
        res = delta_invariant(curv, parts, delta_opts or default_delta_options(),
                              c=space.c, H2=cubic.H2, theorem=theorem)
        rec.delta, rec.rhs, rec.ideality_res = res.delta_value, res.rhs, res.residual
        rec.extra["delta_converged"] = res.optimizer_trace["converged"]
    if "classify" in checks:
        cls = classify_case(cubic, frame, cubic.H2, rec.ideality_res, ideal_tol=ideal_tol)
        rec.case = cls.case.value
        rec.pattern_res = cls.pattern_residual
        if cls.coeffs is not None:
            rec.gamma, rec.lam, rec.mu = cls.coeffs.gamma, cls.coeffs.lam, cls.coeffs.mu
        rec.extra["K_spectrum"] = cls.K_spectrum
        for key in ("parallel_gap", "k_spread"):
            if key in cls.diagnostics:
                rec.extra[key] = cls.diagnostics[key]
    return rec


def block_point_report(chart: ImmersionChart, params) -> dict:
    """H^2, Lagrangian residual and the delta(dim-1) equality residual of a block."""
    m = chart.param_dim
    rec = analyze_point(chart, params, checks=("lagrangian", "delta"), parts=(m - 1,),
                        theorem=Theorem.LAGRANGIAN_STRICT,
                        delta_opts=DeltaOptions(n_samples=500, n_refine=2, restarts=5))
    return {"H2": rec.H2, "ideality_res": rec.ideality_res, "lagrangian_res": rec.lagrangian_res}


def sample_points(chart: ImmersionChart, count: int, seed: int, margin: float | None = None) -> np.ndarray:
    """Interior points, uniform in the shrunken box; point i uses SplitMix64 stream i of ``seed``."""
    if margin is None:
        margin = DEFAULT_MARGIN
    lo = chart.domain_box[:, 0] + margin
    hi = chart.domain_box[:, 1] - margin
    if np.any(hi <= lo):
        raise ChartDomainError("margin leaves an empty interior")
    if count == 0:
        return np.zeros((0, chart.param_dim))
    return np.array([lo + (hi - lo) * s.random(chart.param_dim) for s in point_streams(seed, count)])
