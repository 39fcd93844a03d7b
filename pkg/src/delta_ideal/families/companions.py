"""Companion fields of the case-III families, integrated alongside the warp field.

Each family carries extra unknowns on the (x, y) factor:

* ``z``     (flat ambient): z_x = e^{i(n-1)x} f_y / f^(n-2),  z_y = e^{i(n-1)x} f^(n-1) (i - f_x/f)
* ``Theta`` (sphere / AdS lifts): a 2x2 complex frame with Theta_x = A Theta, Theta_y = B Theta
* ``F_uv``  (AdS, light-like case): a complex F and the real part v of the first slot

Values are propagated by RK4 along one base line and then across it.  For a
Reduced1D warp field the coefficients across the base line are constant (up to
explicit phases e^{ikx}), so that second step is done in closed form: linear
or exponential integrals, a 2x2 matrix exponential, and Gauss-Legendre
quadrature for v.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RectBivariateSpline

from .ode import Trajectory, integrate_two_sided
from .warp import WarpField, WarpKind, reduced_rhs

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


COMPAT_TOL = 1e-3


class InconsistentFieldError(ValueError):
    """The x- and y-systems of the companion fields do not agree."""


class CompanionKind(str, enum.Enum):
    Z = "z"
    THETA = "Theta"
    F_UV = "F_uv"


class CompanionVariant(str, enum.Enum):
    """Sign conventions for the light-like AdS family.

    PHASE_MINUS: F_y = e^{-i(n-3)x} f^(n-4) (f_x + i f), conj(F) in the last slot.
    PHASE_PLUS:  F_y = e^{+i(n-3)x} f^(n-4) (f_x - i f), F in the last slot and
                 conj(F) inside the f_x term of v_y.
    """

    PHASE_MINUS = "phase_minus"
    PHASE_PLUS = "phase_plus"


COMPANION_OF = {
    WarpKind.CN: CompanionKind.Z,
    WarpKind.CPN: CompanionKind.THETA,
    WarpKind.CHN_A: CompanionKind.THETA,
    WarpKind.CHN_B: CompanionKind.THETA,
    WarpKind.CHN_C: CompanionKind.F_UV,
}


def theta_matrices(kind: WarpKind, n: int, f, fx, fy):
    """(A, B) with Theta_x = A Theta and Theta_y = B Theta; rows of Theta are Theta_1, Theta_2."""
    f = np.asarray(f, dtype=float)
    g = fy / f ** (n - 2)
    p = f ** (n - 2)
    A = np.zeros(f.shape + (2, 2), dtype=complex)
    B = np.zeros_like(A)
    if kind is WarpKind.CPN:
        d = 1 - f * f
        A[..., 0, 0] = 1j * f * f
        A[..., 0, 1] = -g
        A[..., 1, 0] = g
        A[..., 1, 1] = 1j * ((1 - n) * d - f * f)
        B[..., 0, 1] = p * (fx + 1j * f)
        B[..., 1, 0] = p * (-fx + 1j * f)
    elif kind is WarpKind.CHN_A:
        d = 1 + f * f
        A[..., 0, 0] = -1j * f * f
        A[..., 0, 1] = -g
        A[..., 1, 0] = -g
        A[..., 1, 1] = -1j * ((n - 1) * d - f * f)
        B[..., 0, 1] = p * (fx + 1j * f)
        B[..., 1, 0] = p * (fx - 1j * f)
    elif kind is WarpKind.CHN_B:
        d = f * f - 1
        A[..., 0, 0] = -1j * f * f
        A[..., 0, 1] = -g
        A[..., 1, 0] = g
        # the opposite sign on this entry makes Theta_xy != Theta_yx
        A[..., 1, 1] = -1j * ((n - 1) * d - f * f)
        B[..., 0, 1] = p * (fx + 1j * f)
        B[..., 1, 0] = p * (-fx + 1j * f)
    else:
        raise ValueError(f"no Theta system for {kind}")
    return A / d[..., None, None], B / d[..., None, None]


def _f_derivs(n, variant, x, f, fx, fy):
    """(F_x, F_y) of the light-like family."""
    a = (n - 3) * x
    if variant is CompanionVariant.PHASE_MINUS:
        e = np.exp(-1j * a)
        return -e * fy / f**n, e * f ** (n - 4) * (fx + 1j * f)
    e = np.exp(1j * a)
    return -e * fy / f**n, e * f ** (n - 4) * (fx - 1j * f)


def _v_derivs(n, variant, x, f, fx, fy, F):
    """(v_x, v_y) of the light-like family, without the block term."""
    eF = np.exp(1j * (n - 3) * x) * F
    vx = -1.0 / f**2 - fy / f**n * eF.imag
    if variant is CompanionVariant.PHASE_MINUS:
        tail = eF.imag
    else:
        tail = (np.exp(1j * (n - 3) * x) * np.conj(F)).imag
    vy = -f ** (n - 3) * eF.real + f ** (n - 4) * fx * tail
    return vx, vy


def _pack(kind, vals: dict):
    if kind is CompanionKind.Z:
        z = vals["z"]
        return np.stack([z.real, z.imag], axis=-1)
    if kind is CompanionKind.THETA:
        t = vals["Theta"].reshape(vals["Theta"].shape[:-2] + (4,))
        return np.concatenate([t.real, t.imag], axis=-1)
    F = vals["F"]
    return np.stack([F.real, F.imag, vals["v"]], axis=-1)


def _unpack(kind, s):
    if kind is CompanionKind.Z:
        return {"z": s[..., 0] + 1j * s[..., 1]}
    if kind is CompanionKind.THETA:
        t = s[..., :4] + 1j * s[..., 4:8]
        return {"Theta": t.reshape(s.shape[:-1] + (2, 2))}
    return {"F": s[..., 0] + 1j * s[..., 1], "v": s[..., 2]}


def _derivative(kind, wkind, n, variant, axis, x, f, fx, fy, vals):
    """d/dx (axis 0) or d/dy (axis 1) of the companion values."""
    if kind is CompanionKind.Z:
        e = np.exp(1j * (n - 1) * x)
        if axis == 0:
            return {"z": e * fy / f ** (n - 2)}
        return {"z": e * f ** (n - 1) * (1j - fx / f)}
    if kind is CompanionKind.THETA:
        A, B = theta_matrices(wkind, n, f, fx, fy)
        M = A if axis == 0 else B
        return {"Theta": M @ vals["Theta"]}
    Fx, Fy = _f_derivs(n, variant, x, f, fx, fy)
    vx, vy = _v_derivs(n, variant, x, f, fx, fy, vals["F"])
    return {"F": Fx, "v": vx} if axis == 0 else {"F": Fy, "v": vy}


def initial_values(kind: CompanionKind) -> dict:
    if kind is CompanionKind.Z:
        return {"z": np.array(0j)}
    if kind is CompanionKind.THETA:
        return {"Theta": np.eye(2, dtype=complex)}
    return {"F": np.array(0j), "v": np.array(0.0)}


def _sinhc(z):
    """sinh(z)/z, entire."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-4
    safe = np.where(small, 1.0, z)
    return np.where(small, 1 + z * z / 6 + z**4 / 120, np.sinh(safe) / safe)


def expm2(M, t):
    """exp(t M) for stacked 2x2 matrices M and scalars t."""
    a = 0.5 * (M[..., 0, 0] + M[..., 1, 1])
    N = M - a[..., None, None] * np.eye(2)
    s = np.sqrt(N[..., 0, 0] ** 2 + N[..., 0, 1] * N[..., 1, 0])
    c = np.cosh(t * s)
    sh = t * _sinhc(t * s)
    return np.exp(t * a)[..., None, None] * (c[..., None, None] * np.eye(2) + sh[..., None, None] * N)


def _phase_integral(k, a, b):
    """int_a^b e^{i k s} ds."""
    d = b - a
    return np.exp(1j * k * a) * d * _expm1c(1j * k * d)


def _expm1c(z):
    """(e^z - 1)/z, entire."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-5
    safe = np.where(small, 1.0, z)
    return np.where(small, 1 + z / 2 + z * z / 6, np.expm1(safe) / safe)


@dataclass
class CompanionFields:
    warp: WarpField
    kind: CompanionKind
    variant: CompanionVariant
    x0: float
    y0: float
    line: Trajectory | None = None
    splines: dict | None = None
    residuals: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.warp.n

    def evaluate(self, x, y) -> dict:
        """Companion values at points (x, y); arrays broadcast together."""
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        if self.splines is not None:
            s = np.stack([sp.ev(x, y) for sp in self.splines], axis=-1)
            return _unpack(self.kind, s)
        if self.warp.reduced_axis == "y":
            return self._evaluate_across_x(x, y)
        st = self.line(x)
        f, fx = st[..., 0], st[..., 1]
        base = _unpack(self.kind, st[..., 2:])
        dy = y - self.y0
        n = self.n
        zero = np.zeros_like(f)
        if self.kind is CompanionKind.Z:
            slope = _derivative(self.kind, self.warp.kind, n, self.variant, 1, x, f, fx, zero, base)["z"]
            return {"z": base["z"] + dy * slope}
        if self.kind is CompanionKind.THETA:
            _, B = theta_matrices(self.warp.kind, n, f, fx, zero)
            s = np.sqrt(B[..., 0, 1] * B[..., 1, 0])
            c = np.cosh(dy * s)
            sh = dy * _sinhc(dy * s)
            E = c[..., None, None] * np.eye(2) + sh[..., None, None] * B
            return {"Theta": E @ base["Theta"]}
        Fx, Fy = _f_derivs(n, self.variant, x, f, fx, zero)
        F = base["F"] + dy * Fy
        _, vy0 = _v_derivs(n, self.variant, x, f, fx, zero, base["F"])
        # v_y is real-linear in F, hence affine in y
        _, vy_lin = _v_derivs(n, self.variant, x, f, fx, zero, Fy)
        return {"F": F, "v": base["v"] + dy * vy0 + 0.5 * dy * dy * vy_lin}

    def _evaluate_across_x(self, x, y):
        """f = f(y): closed-form propagation from the base line x = x0."""
        st = self.line(y)
        f, fy = st[..., 0], st[..., 1]
        base = _unpack(self.kind, st[..., 2:])
        n, x0 = self.n, self.x0
        zero = np.zeros_like(f)
        if self.kind is CompanionKind.Z:
            return {"z": base["z"] + fy / f ** (n - 2) * _phase_integral(n - 1, x0, x)}
        if self.kind is CompanionKind.THETA:
            A, _ = theta_matrices(self.warp.kind, n, f, zero, fy)
            return {"Theta": expm2(A, x - x0) @ base["Theta"]}
        sign = -1 if self.variant is CompanionVariant.PHASE_MINUS else 1
        g = -fy / f**n

        F = base["F"] + g * _phase_integral(sign * (n - 3), x0, x)
        # v_x along the x-segment by Gauss-Legendre quadrature
        s = x0 + 0.5 * (x - x0)[..., None] * (_GL_NODES + 1.0)
        ff, ffy = f[..., None], fy[..., None]
        Fs = base["F"][..., None] + g[..., None] * _phase_integral(sign * (n - 3), x0, s)
        vx, _ = _v_derivs(n, self.variant, s, ff, 0 * ff, ffy, Fs)
        v = base["v"] + 0.5 * (x - x0) * np.sum(_GL_WEIGHTS * vx, axis=-1)
        return {"F": F, "v": v}

    def derivative_residual(self, x, y, h: float = 1e-4) -> tuple[float, float]:
        """Max mismatch of central differences against the x- and y-systems."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        f, fx, fy = self.warp.derivatives(x, y)
        vals = self.evaluate(x, y)
        out = []
        for axis in (0, 1):
            dx = h if axis == 0 else 0.0
            dy = h if axis == 1 else 0.0
            plus = _pack(self.kind, self.evaluate(x + dx, y + dy))
            minus = _pack(self.kind, self.evaluate(x - dx, y - dy))
            fd = (plus - minus) / (2 * h)
            exact = _pack(self.kind, _derivative(self.kind, self.warp.kind, self.n, self.variant, axis,
                                                 x, f, fx, fy, vals))
            out.append(float(np.max(np.abs(fd - exact))))
        return out[0], out[1]


def integrate_companions(warp: WarpField, variant=CompanionVariant.PHASE_MINUS, *,
                         x0: float | None = None, y0: float = 0.0, check_points: int = 25,
                         seed: int = 0, compat_tol: float | None = COMPAT_TOL) -> CompanionFields:
    """Propagate the companion system of ``warp``'s family from (x0, y0).

    Raises InconsistentFieldError when the propagated fields miss either
    first-order system by more than ``compat_tol`` (pass None to skip).

    Reduced1D: RK4 along y = y0 on the warp's own step, closed form in y.
    Relax2D: RK4 along the grid row nearest y0 and then along each grid column,
    with the warp spline supplying f; the result is splined on the grid.
    """
    kind = COMPANION_OF[warp.kind]
    variant = CompanionVariant(variant)
    n = warp.n
    init = initial_values(kind)
    if warp.reduced_1d:
        line0 = warp.line
        along_x = warp.reduced_axis == "x"
        start = float(warp.meta["start"])
        if along_x and x0 is not None:
            start = x0
        if not along_x:
            start = y0
        idx = int(np.argmin(np.abs(line0.t - start)))
        start = float(line0.t[idx])
        state0 = np.concatenate([line0.y[idx], _pack(kind, init)])
        warp_rhs = reduced_rhs(warp.kind, n, warp.reduced_axis)
        fixed = y0 if along_x else (0.0 if x0 is None else x0)

        def rhs(t, s):
            f, d1 = s[..., 0], s[..., 1]
            zero = np.zeros_like(f)
            if along_x:
                d = _derivative(kind, warp.kind, n, variant, 0, t, f, d1, zero, _unpack(kind, s[..., 2:]))
            else:
                d = _derivative(kind, warp.kind, n, variant, 1, fixed + 0 * f, f, zero, d1,
                                _unpack(kind, s[..., 2:]))
            return np.concatenate([warp_rhs(t, s[..., :2]), _pack(kind, d)], axis=-1)

        line = integrate_two_sided(rhs, start, state0, line0.step, line0.t[0], line0.t[-1])
        bx, by = (start, fixed) if along_x else (fixed, start)
        comp = CompanionFields(warp=warp, kind=kind, variant=variant, x0=bx, y0=by, line=line)
    else:
        comp = _grid_companions(warp, kind, variant, init, y0)
        x0 = comp.x0
    rng = np.random.default_rng(seed)
    xs, ys = _check_sample(warp, rng, check_points)
    rx, ry = comp.derivative_residual(xs, ys)
    comp.residuals = {"x_system": rx, "y_system": ry, "compatibility": max(rx, ry)}
    if compat_tol is not None and not max(rx, ry) <= compat_tol:
        raise InconsistentFieldError(
            f"{warp.kind.value} ({variant.value}): companion systems incompatible, residual {max(rx, ry):.3e}")
    return comp


def _check_sample(warp, rng, count):
    if warp.reduced_1d:
        lo, hi = warp.line.t[0], warp.line.t[-1]
        pad = 0.05 * (hi - lo)
        along = rng.uniform(lo + pad, hi - pad, count)
        across = rng.uniform(-0.4, 0.4, count)
        return (along, across) if warp.reduced_axis == "x" else (across, along)
    lo, hi = warp.x[0], warp.x[-1]
    pad = 0.05 * (hi - lo)
    xs = rng.uniform(lo + pad, hi - pad, count)
    ylo, yhi = warp.y[0], warp.y[-1]
    ys = rng.uniform(ylo + 0.05 * (yhi - ylo), yhi - 0.05 * (yhi - ylo), count)
    return xs, ys


def _grid_companions(warp, kind, variant, init, y0):
    n = warp.n
    xs, ys = warp.x, warp.y
    j0 = int(np.argmin(np.abs(ys - y0)))
    y0 = float(ys[j0])
    i0 = len(xs) // 2
    x0 = float(xs[i0])
    sub = 4

    def make_rhs(axis, fixed):
        def rhs(t, s):
            x, y = (t, fixed) if axis == 0 else (fixed, t)
            f, fx, fy = warp.derivatives(x, y)
            d = _derivative(kind, warp.kind, n, variant, axis, np.asarray(x, dtype=float), f, fx, fy,
                            _unpack(kind, s))
            return _pack(kind, d)
        return rhs

    hx = (xs[1] - xs[0]) / sub
    row = integrate_two_sided(make_rhs(0, y0), x0, _pack(kind, init), hx, xs[0], xs[-1])
    row_vals = row.y[::sub]
    hy = (ys[1] - ys[0]) / sub
    grid = np.zeros((len(xs), len(ys), row_vals.shape[-1]))
    for i, x in enumerate(xs):
        col = integrate_two_sided(make_rhs(1, x), y0, row_vals[i], hy, ys[0], ys[-1])
        grid[i] = col.y[::sub]
    splines = [RectBivariateSpline(xs, ys, grid[..., k], kx=3, ky=3) for k in range(grid.shape[-1])]
    return CompanionFields(warp=warp, kind=kind, variant=variant, x0=x0, y0=y0, splines=splines)
