"""Fixed-step classical Runge-Kutta with dense evaluation between nodes.

Dense values come from a partial RK4 step taken from the nearest node on the
left, so the interpolant is a quartic in the offset and reproduces the next
node exactly (up to rounding).  Its local error matches the integrator's, which
keeps finite differences of the interpolant consistent with the ODE.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

BLOWUP = 1e6


def rk4_step(rhs, t, y, h):
    """One classical RK4 step; ``t``, ``h`` broadcast against ``y[..., 0]``."""
    h = np.asarray(h, dtype=float)
    hh = h[..., None] if h.ndim else h
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * h, y + 0.5 * hh * k1)
    k3 = rhs(t + 0.5 * h, y + 0.5 * hh * k2)
    k4 = rhs(t + h, y + hh * k3)
    return y + hh * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0


@dataclass
class Trajectory:
    """Nodes ``t`` (increasing, uniform spacing ``step``) and states ``y``."""

    t: np.ndarray
    y: np.ndarray
    step: float
    rhs: Callable
    truncation: str | None = None

    def __call__(self, t):
        """Dense state at ``t`` (scalar or array); raises outside the node range."""
        t = np.asarray(t, dtype=float)
        flat = t.reshape(-1)
        lo, hi = self.t[0], self.t[-1]
        span = 1e-12 * max(1.0, abs(lo), abs(hi))
        if np.any(flat < lo - span) or np.any(flat > hi + span):
            raise ValueError(f"dense evaluation outside [{lo}, {hi}]")
        k = np.clip(np.floor((flat - lo) / self.step).astype(int), 0, len(self.t) - 2)
        s = flat - self.t[k]
        out = rk4_step(self.rhs, self.t[k], self.y[k], s)
        return out.reshape(t.shape + self.y.shape[1:])


def integrate(rhs, t0: float, y0, step: float, t_end: float,
              guard: Callable[[float, np.ndarray], str | None] | None = None):
    """March from ``t0`` towards ``t_end`` (either direction) with fixed ``step``.

    ``guard(t, y)`` returns a truncation reason (or None); the step that would
    violate it is discarded so every stored node satisfies the guard.
    Returns (ts, ys, reason).
    """
    direction = 1.0 if t_end >= t0 else -1.0
    h = direction * abs(step)
    n_steps = int(round(abs(t_end - t0) / abs(step)))
    ys = [np.asarray(y0, dtype=float)]
    ts = [float(t0)]
    reason = None
    y = ys[0]
    for k in range(n_steps):
        t = t0 + k * h
        y_new = rk4_step(rhs, t, y, h)
        if not np.all(np.isfinite(y_new)) or np.max(np.abs(y_new)) > BLOWUP:
            reason = "blow-up"
            break
        if guard is not None:
            reason = guard(t + h, y_new)
            if reason:
                break
        y = y_new
        ts.append(t0 + (k + 1) * h)
        ys.append(y)
    return np.array(ts), np.array(ys), reason


def integrate_two_sided(rhs, t0, y0, step, t_lo, t_hi, guard=None) -> Trajectory:
    """Integrate backwards to ``t_lo`` and forwards to ``t_hi`` from ``t0``."""
    reasons = []
    tb, yb, rb = integrate(rhs, t0, y0, step, t_lo, guard) if t_lo < t0 else (np.array([t0]), np.array([y0]), None)
    tf, yf, rf = integrate(rhs, t0, y0, step, t_hi, guard) if t_hi > t0 else (np.array([t0]), np.array([y0]), None)
    for side, r in (("lower", rb), ("upper", rf)):
        if r:
            reasons.append(f"{side}: {r}")
    t = np.concatenate([tb[::-1], tf[1:]])
    y = np.concatenate([yb[::-1], yf[1:]])
    return Trajectory(t=t, y=y, step=abs(step), rhs=rhs, truncation="; ".join(reasons) or None)
