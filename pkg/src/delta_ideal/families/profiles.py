"""Profile curves (lambda, phi, theta)(t) of the case-II families."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .ode import Trajectory, integrate_two_sided

DEFAULT_STEP = 1e-4
GUARD_MARGIN = 1e-3


class ProfileKind(str, enum.Enum):
    CN = "Cn_II"
    CPN = "CPn_II"
    CHN_A = "CHn_IIa"
    CHN_B = "CHn_IIb"
    CHN_C = "CHn_IIc"


class ProfileError(ValueError):
    pass


@dataclass
class ProfileSolution:
    kind: ProfileKind
    n: int
    t: np.ndarray
    lam: np.ndarray
    phi: np.ndarray
    theta: np.ndarray
    trajectory: Trajectory | None = None
    conserved: np.ndarray | None = None
    truncation: str | None = None
    meta: dict = field(default_factory=dict)

    def __call__(self, t):
        """Dense (lam, phi, theta) at ``t`` stacked on the last axis."""
        return self.trajectory(t)

    @property
    def span(self) -> tuple[float, float]:
        return float(self.t[0]), float(self.t[-1])

    def max_conserved_drift(self) -> float:
        """Max relative deviation of the Cn_II invariant from its initial value."""
        if self.conserved is None:
            raise ProfileError("no conserved quantity for this kind")
        return float(np.max(np.abs(self.conserved / self.conserved[0] - 1.0)))


def _rhs(kind: ProfileKind, n: int):
    # curvature sign entering phi'; theta' coefficient
    shift = {ProfileKind.CN: 0.0, ProfileKind.CPN: -1.0, ProfileKind.CHN_A: 1.0,
             ProfileKind.CHN_B: 1.0, ProfileKind.CHN_C: 1.0}[kind]
    theta_coef = n - 1.0 if kind is ProfileKind.CN else 1.0

    def rhs(t, y):
        lam, phi = y[..., 0], y[..., 1]
        return np.stack([(n - 3) * lam * phi,
                         shift - phi**2 - (n - 2) * lam**2,
                         theta_coef * lam], axis=-1)

    return rhs


def conserved_quantity(lam, phi, n: int):
    """lambda^(2/(n-3)) (lambda^2 + phi^2), constant along Cn_II profiles."""
    return np.power(lam, 2.0 / (n - 3)) * (lam**2 + phi**2)


def cn_initial_data(n: int, lam0: float, c: float = 1.0) -> tuple[float, float, float]:
    """(lambda0, phi0, theta0) on the closed-form branch with constant c."""
    phi0 = np.sqrt(1.0 / (c**2 * lam0 ** (2.0 / (n - 3))) - lam0**2)
    theta0 = (n - 1) / (n - 2) * np.arcsin(c * lam0 ** ((n - 2) / (n - 3)))
    return float(lam0), float(phi0), float(theta0)


def cn_closed_form(lam, n: int, c: float = 1.0):
    """phi and theta as functions of lambda for the Cn_II branch with phi > 0."""
    lam = np.asarray(lam, dtype=float)
    phi = np.sqrt(1.0 / (c**2 * lam ** (2.0 / (n - 3))) - lam**2)
    theta = (n - 1) / (n - 2) * np.arcsin(c * lam ** ((n - 2) / (n - 3)))
    return phi, theta


def _guard(kind: ProfileKind, margin: float):
    def guard(t, y):
        lam, phi = y[0], y[1]
        if kind is ProfileKind.CN:
            if lam <= margin:
                return "lambda reached 0"
            if phi <= margin:
                return "phi reached 0"
        rho2 = lam**2 + phi**2
        if kind is ProfileKind.CHN_A and rho2 >= 1 - margin:
            return "lambda^2 + phi^2 reached 1"
        if kind is ProfileKind.CHN_B and rho2 <= 1 + margin:
            return "lambda^2 + phi^2 reached 1"
        if kind in (ProfileKind.CPN, ProfileKind.CHN_A, ProfileKind.CHN_B) and lam <= margin:
            return "lambda reached 0"
        return None

    return guard


def _check_initial(kind, lam0, phi0):
    if lam0 <= 0:
        raise ProfileError("lambda0 must be positive")
    rho2 = lam0**2 + phi0**2
    if kind is ProfileKind.CN and phi0 <= 0:
        raise ProfileError("Cn_II branch needs phi0 > 0")
    if kind is ProfileKind.CHN_A and rho2 >= 1:
        raise ProfileError(f"CHn_IIa needs lambda0^2 + phi0^2 < 1, got {rho2}")
    if kind is ProfileKind.CHN_B and rho2 <= 1:
        raise ProfileError(f"CHn_IIb needs lambda0^2 + phi0^2 > 1, got {rho2}")
    if kind is ProfileKind.CHN_C and abs(rho2 - 1) > 1e-12:
        raise ProfileError(f"CHn_IIc needs lambda0^2 + phi0^2 = 1, got {rho2}")


def integrate_profile(kind, n: int, init, span, step: float = DEFAULT_STEP,
                      margin: float = GUARD_MARGIN, t0: float | None = None) -> ProfileSolution:
    """RK4 profile through ``init`` at ``t0`` (default ``span[0]``) over ``span``.

    The trajectory stops one step before any side condition (or the guarded
    margin around it) would be violated; the reason is kept in ``truncation``.
    """
    kind = ProfileKind(kind)
    if n < 5:
        raise ProfileError("the classification needs n >= 5")
    lam0, phi0, theta0 = (float(v) for v in init)
    _check_initial(kind, lam0, phi0)
    t_lo, t_hi = (float(v) for v in span)
    if t0 is None:
        t0 = t_lo
    traj = integrate_two_sided(_rhs(kind, n), t0, np.array([lam0, phi0, theta0]), step, t_lo, t_hi,
                               _guard(kind, margin))
    lam, phi, theta = traj.y.T
    sol = ProfileSolution(kind=kind, n=n, t=traj.t, lam=lam, phi=phi, theta=theta, trajectory=traj,
                          truncation=traj.truncation,
                          meta={"init": [lam0, phi0, theta0], "t0": t0, "step": step, "span": [t_lo, t_hi]})
    if kind is ProfileKind.CN:
        sol.conserved = conserved_quantity(lam, phi, n)
    return sol


def chc_profile(n: int, t):
    """Closed-form boundary profile lambda^2 + phi^2 = 1 of the CHn case (c).

    lambda = sech((n-3)t), phi = -tanh((n-3)t) solves the CH system, and
    theta = gd((n-3)t)/(n-3) integrates theta' = lambda.
    """
    s = (n - 3) * np.asarray(t, dtype=float)
    lam = 1.0 / np.cosh(s)
    phi = -np.tanh(s)
    theta = 2.0 * np.arctan(np.tanh(0.5 * s)) / (n - 3)
    return lam, phi, theta
