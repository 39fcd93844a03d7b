"""Warping functions f(x, y) of the case-III families.

Every warp equation in the classification has the shape

    A f^(2n-3) f_xx + A f f_yy + B f^(2n-4) f_x^2 - D f_y^2 + E f^(2n-2) = 0

with coefficients A, B, D, E depending on f only; ``_coefficients`` lists them
per ambient.  With f_y = 0 it collapses to the ODE A f f_xx + B f_x^2 + E f^2 = 0.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RectBivariateSpline

from .ode import Trajectory, integrate_two_sided

DEFAULT_STEP = 1e-4
GUARD_MARGIN = 1e-3


class WarpKind(str, enum.Enum):
    CN = "Cn_III"
    CPN = "CPn_III"
    CHN_A = "CHn_IIIa"
    CHN_B = "CHn_IIIb"
    CHN_C = "CHn_IIIc"


class WarpMode(str, enum.Enum):
    REDUCED_1D = "Reduced1D"
    RELAX_2D = "Relax2D"


class WarpError(ValueError):
    pass


def _coefficients(kind: WarpKind, n: int, f):
    f2 = f * f
    one = f * 0 + 1
    if kind is WarpKind.CN:
        return one, (n - 2) * one, (n - 2) * one, (n - 1) * one
    if kind is WarpKind.CPN:
        a = 1 - f2
        return a, (n - 2) * a + 2 * f2, (n - 2) * a - 2 * f2, (n - 1) * a + 2 * f2
    if kind is WarpKind.CHN_A:
        a = 1 + f2
        return a, (n - 2) * a - 2 * f2, (n - 2) * a + 2 * f2, (n - 1) * a - 2 * f2
    if kind is WarpKind.CHN_B:
        a = f2 - 1
        return a, (n - 2) * a - 2 * f2, (n - 2) * a + 2 * f2, (n - 1) * a - 2 * f2
    return one, (n - 4) * one, n * one, (n - 3) * one


def _pde_terms(kind, n, f, fx, fy, fxx, fyy):
    kind = WarpKind(kind)
    A, B, D, E = _coefficients(kind, n, f)
    p = f ** (2 * n - 4)
    return A * f * fxx, A * f * fyy / p, B * fx**2, -D * fy**2 / p, E * f * f


def pde_operator(kind, n, f, fx, fy, fxx, fyy):
    """Left-hand side of the warp PDE divided by f^(2n-4)."""
    return sum(_pde_terms(kind, n, f, fx, fy, fxx, fyy))


def relative_pde_residual(kind, n, f, fx, fy, fxx, fyy):
    """PDE operator over the sum of its term magnitudes (scale-free near blow-up)."""
    terms = _pde_terms(kind, n, f, fx, fy, fxx, fyy)
    return sum(terms) / np.maximum(sum(np.abs(t) for t in terms), 1.0)


def reduced_rhs(kind, n, axis: str = "x"):
    """First-order system for (f, f') along x (f_y = 0) or along y (f_x = 0)."""
    kind = WarpKind(kind)

    def rhs_x(x, y):
        f, fx = y[..., 0], y[..., 1]
        A, B, _, E = _coefficients(kind, n, f)
        return np.stack([fx, -(B * fx**2 + E * f * f) / (A * f)], axis=-1)

    def rhs_y(t, y):
        f, fy = y[..., 0], y[..., 1]
        A, _, D, E = _coefficients(kind, n, f)
        return np.stack([fy, (D * fy**2 - E * f ** (2 * n - 2)) / (A * f)], axis=-1)

    return rhs_x if axis == "x" else rhs_y


def _range_guard(kind: WarpKind, margin: float):
    def guard(x, y):
        f = y[0]
        if f <= margin:
            return "f reached 0"
        if kind is WarpKind.CPN and f >= 1 - margin:
            return "f reached 1"
        if kind is WarpKind.CHN_B and f <= 1 + margin:
            return "f reached 1"
        return None

    return guard


def check_range(kind, f):
    kind = WarpKind(kind)
    f = np.asarray(f)
    if np.any(f <= 0):
        raise WarpError(f"{kind.value}: warping function must be positive")
    if kind is WarpKind.CPN and np.any(f >= 1):
        raise WarpError("CPn_III (sphere lift) requires f < 1")
    if kind is WarpKind.CHN_B and np.any(f <= 1):
        raise WarpError("CHn_IIIb (hyperbolic Phi block) requires f > 1")


@dataclass
class WarpField:
    kind: WarpKind
    n: int
    mode: WarpMode
    x: np.ndarray
    y: np.ndarray
    f: np.ndarray
    pde_residual: np.ndarray
    reduced_1d: bool
    line: Trajectory | None = None
    reduced_axis: str = "x"
    spline: RectBivariateSpline | None = None
    richardson: float = float("nan")
    converged: bool = True
    iterations: int = 0
    truncation: str | None = None
    meta: dict = field(default_factory=dict)

    def derivatives(self, x, y):
        """(f, f_x, f_y) at arbitrary points inside the field's domain."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.reduced_1d:
            if self.reduced_axis == "x":
                s = self.line(x + 0 * y)
                return s[..., 0], s[..., 1], np.zeros_like(s[..., 0])
            s = self.line(y + 0 * x)
            return s[..., 0], np.zeros_like(s[..., 0]), s[..., 1]
        xb, yb = np.broadcast_arrays(x, y)
        f = self.spline.ev(xb, yb)
        fx = self.spline.ev(xb, yb, dx=1)
        fy = self.spline.ev(xb, yb, dy=1)
        return f, fx, fy

    def line_residual(self, ts) -> np.ndarray:
        """Relative PDE residual at line coordinates ``ts`` (Reduced1D only), clipped off the ends."""
        if not self.reduced_1d:
            raise WarpError("line_residual needs a Reduced1D field")
        reach = 3 * 2.5e-4
        ts = np.clip(np.asarray(ts, dtype=float), self.line.t[0] + reach, self.line.t[-1] - reach)
        return _reduced_residual(self.kind, self.n, self.line, ts, self.reduced_axis)

    @property
    def max_residual(self) -> float:
        return float(np.max(np.abs(self.pde_residual))) if self.pde_residual.size else 0.0


def _reduced_residual(kind, n, line: Trajectory, xs, axis="x", h=2.5e-4):
    """Relative PDE residual with f'' from a 4th-order difference of the dense solution."""
    offs = np.array([-2, -1, 0, 1, 2]) * h
    w = np.array([-1, 16, -30, 16, -1]) / (12 * h * h)
    vals = line(xs[:, None] + offs[None, :])[..., 0]
    f2 = vals @ w
    s = line(xs)
    f, f1 = s[:, 0], s[:, 1]
    zero = 0.0 * f
    if axis == "x":
        return relative_pde_residual(kind, n, f, f1, zero, f2, zero)
    return relative_pde_residual(kind, n, f, zero, f1, zero, f2)


def solve_warp_field(kind, n: int, mode=WarpMode.REDUCED_1D, grid=None, init=None, *,
                     step: float = DEFAULT_STEP, boundary=None, damping: float = 0.5,
                     max_iters: int = 100_000, tol: float = 1e-10,
                     margin: float = GUARD_MARGIN, axis: str = "x") -> WarpField:
    """Solve for f on ``grid``.

    Reduced1D: ``grid = (x_lo, x_hi, x0)`` or ``(x_lo, x_hi)`` and
    ``init = (f(x0), f_x(x0))``; the ODE is marched both ways from x0.
    With ``axis="y"`` the roles swap: f depends on y only, ``grid`` is a
    y-range and ``init = (f(y0), f_y(y0))``.
    Relax2D: ``grid = (xs, ys)`` arrays and ``boundary`` a callable f(x, y)
    supplying Dirichlet data and the initial guess.
    """
    kind = WarpKind(kind)
    mode = WarpMode(mode)
    if n < 5:
        raise WarpError("the classification needs n >= 5")
    if mode is WarpMode.REDUCED_1D:
        x_lo, x_hi = float(grid[0]), float(grid[1])
        x0 = float(grid[2]) if len(grid) > 2 else 0.0
        f0, fx0 = (float(v) for v in init)
        check_range(kind, f0)
        if axis not in ("x", "y"):
            raise WarpError("axis must be 'x' or 'y'")
        rhs = reduced_rhs(kind, n, axis)
        guard = _range_guard(kind, margin)
        line = integrate_two_sided(rhs, x0, np.array([f0, fx0]), step, x_lo, x_hi, guard)
        half = integrate_two_sided(rhs, x0, np.array([f0, fx0]), step / 2, x_lo, x_hi, guard)
        xs = line.t
        both = (xs >= half.t[0]) & (xs <= half.t[-1])
        rich = float(np.max(np.abs(half(xs[both])[:, 0] - line.y[both, 0])))
        inner = xs[(xs > xs[0] + 3e-3) & (xs < xs[-1] - 3e-3)]
        res = _reduced_residual(kind, n, line, inner, axis)
        other = np.array([0.0])
        gx, gy = (xs, other) if axis == "x" else (other, xs)
        f = line.y[:, :1].copy() if axis == "x" else line.y[:, 0][None, :].copy()
        return WarpField(kind=kind, n=n, mode=mode, x=gx, y=gy, f=f,
                         pde_residual=res, reduced_1d=True, line=line, reduced_axis=axis, richardson=rich,
                         truncation=line.truncation,
                         meta={"start": x0, "init": [f0, fx0], "step": step, "axis": axis})
    xs, ys = (np.asarray(g, dtype=float) for g in grid)
    if boundary is None:
        raise WarpError("Relax2D needs boundary data")
    f, its, conv = _relax(kind, n, xs, ys, boundary, damping, max_iters, tol)
    check_range(kind, f)
    res = _grid_residual(kind, n, xs, ys, f)
    rich = float("nan")
    if len(xs) <= 51 and len(ys) <= 51:
        xs2 = np.linspace(xs[0], xs[-1], 2 * len(xs) - 1)
        ys2 = np.linspace(ys[0], ys[-1], 2 * len(ys) - 1)
        f2, _, _ = _relax(kind, n, xs2, ys2, boundary, damping, max_iters, tol)
        rich = float(np.max(np.abs(f2[::2, ::2] - f)))
    spline = RectBivariateSpline(xs, ys, f, kx=3, ky=3)
    return WarpField(kind=kind, n=n, mode=mode, x=xs, y=ys, f=f, pde_residual=res, reduced_1d=False,
                     spline=spline, richardson=rich, converged=conv, iterations=its,
                     meta={"damping": damping, "tol": tol})


def _grid_residual(kind, n, xs, ys, f):
    hx, hy = xs[1] - xs[0], ys[1] - ys[0]
    c = f[1:-1, 1:-1]
    fxx = (f[2:, 1:-1] - 2 * c + f[:-2, 1:-1]) / hx**2
    fyy = (f[1:-1, 2:] - 2 * c + f[1:-1, :-2]) / hy**2
    fx = (f[2:, 1:-1] - f[:-2, 1:-1]) / (2 * hx)
    fy = (f[1:-1, 2:] - f[1:-1, :-2]) / (2 * hy)
    return relative_pde_residual(kind, n, c, fx, fy, fxx, fyy)


def _relax(kind, n, xs, ys, boundary, damping, max_iters, tol):
    """Damped lexicographic nonlinear Gauss-Seidel with one Newton step per node."""
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    f = np.asarray(boundary(X, Y), dtype=float).copy()
    nx, ny = f.shape
    hx, hy = float(xs[1] - xs[0]), float(ys[1] - ys[0])
    g = f.tolist()
    eps = 1e-7
    p_exp = 2 * n - 4

    def local(fc, e, w, nn, s):
        fxx = (e - 2 * fc + w) / hx**2
        fyy = (nn - 2 * fc + s) / hy**2
        fx = (e - w) / (2 * hx)
        fy = (nn - s) / (2 * hy)
        A, B, D, E = _coefficients(kind, n, fc)
        p = fc ** p_exp
        return A * fc * fxx + A * fc * fyy / p + B * fx * fx - D * fy * fy / p + E * fc * fc

    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        change = 0.0
        for i in range(1, nx - 1):
            row, up, dn = g[i], g[i + 1], g[i - 1]
            for j in range(1, ny - 1):
                fc = row[j]
                r0 = local(fc, up[j], dn[j], row[j + 1], row[j - 1])
                r1 = local(fc + eps, up[j], dn[j], row[j + 1], row[j - 1])
                d = (r1 - r0) / eps
                if d == 0.0:
                    continue
                delta = -damping * r0 / d
                row[j] = fc + delta
                change = max(change, abs(delta))
        if change < tol:
            converged = True
            break
    return np.array(g), it, converged
