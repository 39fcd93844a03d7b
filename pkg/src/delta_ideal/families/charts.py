"""Immersion charts of the constructed delta(2, n-2)-ideal families.

Case-II charts have parameters (t, u_1..u_{n-1}): a profile curve in t times
an (n-1)-dimensional building block.  Case-III charts have parameters
(x, y, u_1..u_{n-2}): a warp field with its companions times an
(n-2)-dimensional block.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ..ambient import AmbientSpace, SpaceKind
from ..jets import ImmersionChart
from .blocks import BlockName, BuildingBlock, builtin_block
from .companions import CompanionFields, CompanionVariant, integrate_companions
from .ode import integrate_two_sided
from .profiles import ProfileKind, ProfileSolution, cn_initial_data, integrate_profile
from .warp import WarpField, WarpKind, solve_warp_field


class FamilyError(ValueError):
    pass


class ChcVariant(str, enum.Enum):
    """Scale and integral of the light-like case-II family.

    HALF_ANGLE: prefactor cosh^{2/(n-3)}((n-3)t/2), integrand e^{2i psi}/cosh^{2/(n-3)}((n-3)t/2).
    UNIT_NORM:  prefactor r = cosh^{-1/(n-3)}((n-3)t), integrand -e^{-2i psi}/r^2, so
                that r'/r = phi = -tanh((n-3)t) and <L, L> = -1 with L horizontal.
    Both use the phase psi = arctan(tanh((n-3)t/2)) and theta = 2 psi/(n-3).
    """

    HALF_ANGLE = "half_angle"
    UNIT_NORM = "unit_norm"


def _phase(n, t):
    return np.arctan(np.tanh(0.5 * (n - 3) * t))


def chc_scale_and_integral(n: int, variant, t_lo: float, t_hi: float, step: float = 1e-4):
    """(A(t), Trajectory of I(t)) with L = A (V + I N); I(0) = 0."""
    variant = ChcVariant(variant)
    if variant is ChcVariant.HALF_ANGLE:
        def scale(t):
            s = 0.5 * (n - 3) * t
            return np.cosh(s) ** (2.0 / (n - 3)) * np.exp(-2j / (n - 3) * _phase(n, t))

        def integrand(t):
            s = 0.5 * (n - 3) * t
            return np.exp(2j * _phase(n, t)) / np.cosh(s) ** (2.0 / (n - 3))
    else:
        def scale(t):
            return np.cosh((n - 3) * t) ** (-1.0 / (n - 3)) * np.exp(-2j / (n - 3) * _phase(n, t))

        def integrand(t):
            return -np.exp(-2j * _phase(n, t)) * np.cosh((n - 3) * t) ** (2.0 / (n - 3))

    def rhs(t, y):
        v = integrand(np.asarray(t, dtype=float))
        return np.stack([v.real + 0 * y[..., 0], v.imag + 0 * y[..., 1]], axis=-1)

    traj = integrate_two_sided(rhs, 0.0, np.zeros(2), step, min(t_lo, 0.0), max(t_hi, 0.0))
    return scale, traj


@dataclass
class FamilySpec:
    name: str
    case: str
    ambient: SpaceKind
    block: BlockName
    description: str


FAMILIES = {
    "Cn_II": FamilySpec("Cn_II", "CaseII", SpaceKind.FLAT, BlockName.SPHERE,
                        "profile curve times a Legendre sphere in C^n"),
    "CPn_II": FamilySpec("CPn_II", "CaseII", SpaceKind.SPHERE, BlockName.SPHERE,
                         "horizontal lift into S^{2n+1}, sphere block"),
    "CHn_IIa": FamilySpec("CHn_IIa", "CaseII", SpaceKind.ADS, BlockName.HYPERBOLIC,
                          "AdS lift, lambda^2 + phi^2 < 1, hyperbolic block"),
    "CHn_IIb": FamilySpec("CHn_IIb", "CaseII", SpaceKind.ADS, BlockName.SPHERE,
                          "AdS lift, lambda^2 + phi^2 > 1, sphere block"),
    "CHn_IIc": FamilySpec("CHn_IIc", "CaseII", SpaceKind.ADS, BlockName.FLAT,
                          "AdS lift, light-like direction, flat block"),
    "Cn_III": FamilySpec("Cn_III", "CaseIII", SpaceKind.FLAT, BlockName.SPHERE,
                         "warped surface times a Legendre sphere in C^n"),
    "CPn_III": FamilySpec("CPn_III", "CaseIII", SpaceKind.SPHERE, BlockName.SPHERE,
                          "warped lift into S^{2n+1}"),
    "CHn_IIIa": FamilySpec("CHn_IIIa", "CaseIII", SpaceKind.ADS, BlockName.SPHERE,
                           "warped AdS lift with a timelike Theta_2"),
    "CHn_IIIb": FamilySpec("CHn_IIIb", "CaseIII", SpaceKind.ADS, BlockName.HYPERBOLIC,
                           "warped AdS lift with a hyperbolic block"),
    "CHn_IIIc": FamilySpec("CHn_IIIc", "CaseIII", SpaceKind.ADS, BlockName.FLAT,
                           "warped AdS lift, light-like case, flat block"),
}

_PROFILE_OF = {"Cn_II": ProfileKind.CN, "CPn_II": ProfileKind.CPN, "CHn_IIa": ProfileKind.CHN_A,
               "CHn_IIb": ProfileKind.CHN_B, "CHn_IIc": ProfileKind.CHN_C}
_WARP_OF = {"Cn_III": WarpKind.CN, "CPn_III": WarpKind.CPN, "CHn_IIIa": WarpKind.CHN_A,
            "CHn_IIIb": WarpKind.CHN_B, "CHn_IIIc": WarpKind.CHN_C}

# Default initial data and parameter windows (t or x range, y range).
DEFAULT_PROFILE_INIT = {
    ProfileKind.CPN: (0.5, 0.5, 0.0),
    ProfileKind.CHN_A: (0.5, 0.5, 0.0),
    ProfileKind.CHN_B: (1.0, 0.5, 0.0),
}
DEFAULT_T_WINDOW = {
    ProfileKind.CN: (0.05, 0.25),
    ProfileKind.CPN: (-0.15, 0.15),
    ProfileKind.CHN_A: (-0.15, 0.15),
    ProfileKind.CHN_B: (-0.15, 0.15),
    ProfileKind.CHN_C: (-0.3, 0.3),
}
DEFAULT_WARP_INIT = {
    WarpKind.CN: (1.0, 0.0),
    WarpKind.CPN: (0.5, 0.0),
    WarpKind.CHN_A: (0.5, 0.0),
    WarpKind.CHN_B: (1.5, 0.0),
    WarpKind.CHN_C: (1.0, 0.0),
}
# With f_y = 0 the light-like family degenerates to the case-II pattern
# (gamma = (n-1) lambda, mu = 0), so it is reduced along y instead.
DEFAULT_REDUCED_AXIS = {WarpKind.CHN_C: "y"}
DEFAULT_X_WINDOW = (-0.25, 0.25)
DEFAULT_Y_WINDOW = (-0.4, 0.4)
BLOCK_SHRINK = 0.5
PAD = 0.05


def _block_box(block: BuildingBlock, shrink: float = BLOCK_SHRINK) -> np.ndarray:
    return block.chart.domain_box * shrink


def _box(first: list, block: BuildingBlock) -> np.ndarray:
    return np.vstack([np.array(first, dtype=float), _block_box(block)])


def _split(params, k):
    p = np.asarray(params, dtype=float)
    return p[..., :k], p[..., k:]


def build_case2_chart(space, profile: ProfileSolution | None, block: BuildingBlock, *,
                      variant=ChcVariant.UNIT_NORM, t_window=None) -> ImmersionChart:
    """Chart of the case-II family matching ``space``/``profile``.

    For the light-like AdS family pass ``profile=None``: its profile is the
    closed-form boundary solution and ``variant`` picks the scale/integral.
    """
    space = space if isinstance(space, AmbientSpace) else AmbientSpace(SpaceKind(space), block.dim + 1)
    n = block.dim + 1
    if space.complex_dim_n != n:
        raise FamilyError(f"block of dimension {block.dim} does not fit an n={space.complex_dim_n} family")

    if profile is None:
        variant = ChcVariant(variant)
        if block.name is not BlockName.FLAT or space.kind is not SpaceKind.ADS:
            raise FamilyError("the light-like case-II family needs AdS and a flat block")
        t_lo, t_hi = t_window or DEFAULT_T_WINDOW[ProfileKind.CHN_C]
        scale, itraj = chc_scale_and_integral(n, variant, t_lo - PAD, t_hi + PAD)

        def func(params):
            t, u = _split(params, 1)
            t = t[..., 0]
            phi = block(u)
            w = block.potential(u)
            a = w + 0.5j * np.sum(np.abs(phi) ** 2, axis=-1)
            I = itraj(t)
            I = I[..., 0] + 1j * I[..., 1]
            A = scale(t)
            first = (a + 1j + I)[..., None]
            last = (a + I)[..., None]
            return A[..., None] * np.concatenate([first, phi, last], axis=-1)

        meta = {"family": "CHn_IIc", "case": "CaseII", "n": n, "variant": variant.value,
                "block": block.name.value}
        return ImmersionChart(family_tag="CHn_IIc", param_dim=n, domain_box=_box([[t_lo, t_hi]], block),
                              func=func, space=space, metadata=meta)

    kind = profile.kind
    t_lo, t_hi = t_window or DEFAULT_T_WINDOW[kind]
    if t_lo - PAD < profile.t[0] or t_hi + PAD > profile.t[-1]:
        raise FamilyError(f"t-window [{t_lo}, {t_hi}] not inside the profile span {profile.span}")

    def pieces(params):
        t, u = _split(params, 1)
        lam, ph, th = np.moveaxis(profile(t[..., 0]), -1, 0)
        return lam, ph, th, block(u)

    if kind is ProfileKind.CN:
        def func(params):
            lam, ph, th, Phi = pieces(params)
            return (np.exp(1j * th) / (ph + 1j * lam))[..., None] * Phi
    elif kind in (ProfileKind.CPN, ProfileKind.CHN_A, ProfileKind.CHN_B):
        def func(params):
            lam, ph, th, Phi = pieces(params)
            rho2 = lam**2 + ph**2
            norm = np.sqrt({ProfileKind.CPN: 1 + rho2, ProfileKind.CHN_A: 1 - rho2,
                            ProfileKind.CHN_B: rho2 - 1}[kind])
            head = (np.exp(1j * th)[..., None] * Phi) / norm[..., None]
            tail = (np.exp(1j * (n - 2) * th) * (1j * lam - ph) / norm)[..., None]
            if kind is ProfileKind.CHN_B:
                return np.concatenate([tail, head], axis=-1)
            return np.concatenate([head, tail], axis=-1)
    else:
        raise FamilyError("use profile=None for the light-like family")
    tag = {v: k for k, v in _PROFILE_OF.items()}[kind]
    meta = {"family": tag, "case": "CaseII", "n": n, "profile_init": profile.meta["init"],
            "block": block.name.value}
    return ImmersionChart(family_tag=tag, param_dim=n, domain_box=_box([[t_lo, t_hi]], block),
                          func=func, space=space, metadata=meta, payload={"profile": profile})


def build_case3_chart(space, warp: WarpField, companions: CompanionFields, block: BuildingBlock, *,
                      x_window=None, y_window=None) -> ImmersionChart:
    """Chart of the case-III family of ``warp.kind``."""
    n = warp.n
    space = space if isinstance(space, AmbientSpace) else AmbientSpace(SpaceKind(space), n)
    if block.dim != n - 2:
        raise FamilyError(f"case-III families need an (n-2)-dimensional block, got {block.dim}")
    x_lo, x_hi = x_window or DEFAULT_X_WINDOW
    y_lo, y_hi = y_window or DEFAULT_Y_WINDOW
    if warp.reduced_1d:
        lo, hi = (x_lo, x_hi) if warp.reduced_axis == "x" else (y_lo, y_hi)
        if lo - PAD < warp.line.t[0] or hi + PAD > warp.line.t[-1]:
            raise FamilyError(f"{warp.reduced_axis}-window [{lo}, {hi}] not inside the warp span")
    kind = warp.kind
    variant = companions.variant

    def pieces(params):
        xy, u = _split(params, 2)
        x, y = xy[..., 0], xy[..., 1]
        f, _, _ = warp.derivatives(x, y)
        return x, y, f, companions.evaluate(x, y), u

    if kind is WarpKind.CN:
        def func(params):
            x, y, f, comp, u = pieces(params)
            head = (f * np.exp(1j * x))[..., None] * block(u)
            return np.concatenate([head, comp["z"][..., None]], axis=-1)
    elif kind in (WarpKind.CPN, WarpKind.CHN_A, WarpKind.CHN_B):
        def func(params):
            x, y, f, comp, u = pieces(params)
            th2 = comp["Theta"][..., 1, :]
            ex = np.exp(1j * x)[..., None]
            ex2 = np.exp(1j * (n - 1) * x)[..., None]
            Phi = block(u)
            if kind is WarpKind.CPN:
                return np.concatenate([ex * f[..., None] * Phi,
                                       ex2 * np.sqrt(1 - f * f)[..., None] * th2], axis=-1)
            if kind is WarpKind.CHN_A:
                # C^2_1 factor: Theta component 1 is timelike and goes into slot 0
                head = -ex * f[..., None] * Phi
                tail = ex2 * np.sqrt(1 + f * f)[..., None] * th2
                return np.concatenate([tail[..., 1:], head, tail[..., :1]], axis=-1)
            return np.concatenate([ex * f[..., None] * Phi,
                                   -ex2 * np.sqrt(f * f - 1)[..., None] * th2], axis=-1)
    else:
        def func(params):
            x, y, f, comp, u = pieces(params)
            G = block(u)
            F = comp["F"]
            v = comp["v"] - block.potential(u)
            uu = 0.5 * (np.sum(np.abs(G) ** 2, axis=-1) + np.abs(F) ** 2 - 1) + 0.5 / f**2
            last = np.conj(F) if variant is CompanionVariant.PHASE_MINUS else F
            w = uu + 1j * v
            body = np.concatenate([(w + 1)[..., None], w[..., None], G, last[..., None]], axis=-1)
            return (f * np.exp(1j * x))[..., None] * body
    tag = {v: k for k, v in _WARP_OF.items()}[kind]
    meta = {"family": tag, "case": "CaseIII", "n": n, "warp_mode": warp.mode.value,
            "reduced_axis": warp.reduced_axis if warp.reduced_1d else None,
            "warp_init": warp.meta.get("init"), "variant": variant.value if kind is WarpKind.CHN_C else None,
            "block": block.name.value, "warp_residual": warp.max_residual,
            "companion_residuals": companions.residuals}
    return ImmersionChart(family_tag=tag, param_dim=n, domain_box=_box([[x_lo, x_hi], [y_lo, y_hi]], block),
                          func=func, space=space, metadata=meta,
                          payload={"warp": warp, "companions": companions})


def construct_family(name: str, n: int, *, variant: str | None = None, init=None, window=None,
                     y_window=None, step: float = 1e-4, certify_block: bool = False,
                     axis: str | None = None) -> ImmersionChart:
    """Build a family chart with default (or given) initial data."""
    if name not in FAMILIES:
        raise FamilyError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}")
    spec = FAMILIES[name]
    if n < 5:
        raise FamilyError("the families exist for n >= 5")
    space = AmbientSpace(spec.ambient, n)
    if spec.case == "CaseII":
        block = builtin_block(spec.block, n - 1, certify=certify_block)
        kind = _PROFILE_OF[name]
        if kind is ProfileKind.CHN_C:
            return build_case2_chart(space, None, block, variant=variant or ChcVariant.UNIT_NORM,
                                     t_window=window)
        t_lo, t_hi = window or DEFAULT_T_WINDOW[kind]
        if init is None:
            init = cn_initial_data(n, 0.5) if kind is ProfileKind.CN else DEFAULT_PROFILE_INIT[kind]
        t0 = 0.0
        prof = integrate_profile(kind, n, init, (min(t0, t_lo - 2 * PAD), max(t0, t_hi + 2 * PAD)),
                                 step=step, t0=t0)
        return build_case2_chart(space, prof, block, t_window=(t_lo, t_hi))
    block = builtin_block(spec.block, n - 2, certify=certify_block)
    kind = _WARP_OF[name]
    axis = axis or DEFAULT_REDUCED_AXIS.get(kind, "x")
    x_lo, x_hi = window or DEFAULT_X_WINDOW
    y_lo, y_hi = y_window or DEFAULT_Y_WINDOW
    lo, hi = (x_lo, x_hi) if axis == "x" else (y_lo, y_hi)
    warp = solve_warp_field(kind, n, "Reduced1D", (lo - 2 * PAD, hi + 2 * PAD, 0.0),
                            init or DEFAULT_WARP_INIT[kind], step=step, axis=axis)
    fits = (max(lo, warp.line.t[0] + 2 * PAD), min(hi, warp.line.t[-1] - 2 * PAD))
    if fits[1] - fits[0] < 0.1:
        raise FamilyError(f"warp field truncated ({warp.truncation}); no usable window")
    if axis == "x" and window is None:
        x_lo, x_hi = fits
    elif axis == "y" and y_window is None:
        y_lo, y_hi = fits
    comp = integrate_companions(warp, variant or CompanionVariant.PHASE_MINUS)
    return build_case3_chart(space, warp, comp, block, x_window=(x_lo, x_hi), y_window=(y_lo, y_hi))
