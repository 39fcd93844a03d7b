"""Equality-case machinery for delta(2, n-2): adapted bases and case labels.

All routines work on a cubic tensor expressed in an orthonormal frame and
return rotations of that frame.  Rows of a rotation ``Q`` are the new basis
vectors written in the old frame, ``F_a = sum_b Q[a, b] E_b``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .jets import TangentFrame
from .shape import AdaptedCoefficients, CubicTensor, case2_pattern_residual, extract_adapted

GRID_ANGLES = 720
DECISION_TOL = 1e-6
MINIMAL_H2 = 1e-10
IDEAL_TOL = 1e-4
NORMAL_FORM_TOL = 1e-4


class Case(str, enum.Enum):
    MINIMAL = "MinimalI"
    CASE_II = "CaseII"
    CASE_III = "CaseIII"
    NOT_IDEAL = "NotIdeal"
    AMBIGUOUS = "Ambiguous"


class MinimalCaseError(ValueError):
    """The mean curvature vanishes, so no distinguished direction exists."""


class NormalFormError(ValueError):
    """The adapted frame does not bring the tensor into normal form."""


@dataclass(frozen=True)
class MinimalCaseMarker:
    """Returned by ``adapted_basis`` when H = 0 and h is not identically zero."""

    reason: str = "mean curvature vanishes"


@dataclass
class CaseClassification:
    case: Case
    adapted_frame: TangentFrame | None
    coeffs: AdaptedCoefficients | None
    pattern_residual: float
    K_spectrum: list
    rotation: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)


def _tensor(cubic) -> np.ndarray:
    return cubic.h if isinstance(cubic, CubicTensor) else np.asarray(cubic, dtype=float)


def _scale(h) -> float:
    return max(float(np.max(np.abs(h))), 1e-300)


def complete_basis(first_rows) -> np.ndarray:
    """Orthogonal matrix whose leading rows are ``first_rows`` (Householder QR)."""
    V = np.atleast_2d(np.asarray(first_rows, dtype=float))
    n = V.shape[1]
    Qc, _ = np.linalg.qr(V.T, mode="complete")
    Q = Qc.T.copy()
    Q[:V.shape[0]] = V
    return Q


def k_tensor(cubic, frame: TangentFrame | None = None):
    """Matrix of X -> pi_D J h(JH, X) on D = (JH)^perp and its sorted spectrum.

    The basis of D is the Householder completion of JH/|JH|, so the matrix is
    reproducible.  ``frame`` is accepted for symmetry with the other entry
    points; the computation only needs the frame components of ``cubic``.
    """
    h = _tensor(cubic)
    n = h.shape[0]
    m = np.einsum("caa->c", h) / n
    norm = np.linalg.norm(m)
    if norm <= 1e-8:
        raise MinimalCaseError(f"|JH| = {norm:.3e} too small for the K-tensor")
    basis = complete_basis(m / norm)[1:]
    K_full = np.einsum("a,cab->cb", m, h)
    K = basis @ K_full @ basis.T
    K = 0.5 * (K + K.T)
    return K, np.sort(np.linalg.eigvalsh(K))


def _phi_derivatives(h, p, q, theta):
    c, s = np.cos(theta), np.sin(theta)
    u = c * p + s * q
    du = -s * p + c * q
    f = np.einsum("abc,a,b,c->", h, u, u, u)
    f1 = 3 * np.einsum("abc,a,b,c->", h, u, u, du)
    f2 = 6 * np.einsum("abc,a,b,c->", h, u, du, du) - 3 * f
    return f, f1, f2


def maximize_on_circle(h, p, q, n_grid: int = GRID_ANGLES) -> float:
    """Angle of the global max of <h(u,u),Ju> on the circle spanned by p, q.

    A dense grid picks the basin, golden-section search narrows it, and a few
    Newton steps on the stationarity condition finish the job to full
    precision.
    """
    thetas = np.arange(n_grid) * (2 * np.pi / n_grid)
    U = np.cos(thetas)[:, None] * p + np.sin(thetas)[:, None] * q
    vals = np.einsum("abc,ta,tb,tc->t", h, U, U, U)
    k = int(np.argmax(vals))
    step = 2 * np.pi / n_grid
    lo, hi = thetas[k] - step, thetas[k] + step

    def neg(t):
        return -_phi_derivatives(h, p, q, t)[0]

    res = minimize_scalar(neg, bracket=(lo, thetas[k], hi), method="golden",
                          options={"xtol": 1e-10})
    theta = float(res.x) if lo <= res.x <= hi else float(thetas[k])
    for _ in range(8):
        _, f1, f2 = _phi_derivatives(h, p, q, theta)
        if f2 >= 0:
            break
        new = theta - f1 / f2
        if not lo <= new <= hi:
            break
        if abs(new - theta) < 1e-15:
            theta = new
            break
        theta = new
    return theta


def _distinguished_plane(h, m, K_tol: float = DECISION_TOL):
    """Orthonormal (p, q) spanning D_1 plus decision diagnostics."""
    n = h.shape[0]
    scale = _scale(h)
    mhat = m / np.linalg.norm(m)
    w = np.einsum("cab,a,b->c", h, mhat, mhat)
    w_perp = w - (w @ mhat) * mhat
    parallel_gap = float(np.linalg.norm(w_perp)) / scale
    K, spec = k_tensor(h)
    k_spread = float(spec[-1] - spec[0]) / (scale * np.linalg.norm(m))
    diag = {"parallel_gap": parallel_gap, "k_spread": k_spread, "K_spectrum": spec.tolist()}
    if parallel_gap > K_tol:
        q = w_perp / np.linalg.norm(w_perp)
        diag["plane_source"] = "h(JH,JH)"
        return mhat, q, diag
    if n - 1 < 2 or k_spread <= K_tol:
        diag["plane_source"] = None
        return mhat, None, diag
    # distinguished eigenvalue: the one separated from the (n-2)-fold cluster
    vals, vecs = np.linalg.eigh(K)
    lo_gap = vals[1] - vals[0] if vals.size > 1 else 0.0
    hi_gap = vals[-1] - vals[-2] if vals.size > 1 else 0.0
    idx = 0 if lo_gap >= hi_gap else vals.size - 1
    basis = complete_basis(mhat)[1:]
    q = vecs[:, idx] @ basis
    q = q - (q @ mhat) * mhat
    diag["plane_source"] = "K-eigenvector"
    return mhat, q / np.linalg.norm(q), diag


def adapted_rotation(cubic, K_tol: float = DECISION_TOL):
    """Rotation into an adapted basis together with the diagnostics used.

    Returns ``(Q, diagnostics)`` or ``(None, diagnostics)`` when H = 0.
    """
    h = _tensor(cubic)
    n = h.shape[0]
    if float(np.max(np.abs(h))) == 0.0:
        return np.eye(n), {"plane_source": "zero tensor"}
    m = np.einsum("caa->c", h) / n
    if float(m @ m) < MINIMAL_H2:
        return None, {"plane_source": None, "H2": float(m @ m)}
    p, q, diag = _distinguished_plane(h, m, K_tol)
    if q is None:
        # case II: e_1 along JH, completion arbitrary
        return complete_basis(p), diag
    theta = maximize_on_circle(h, p, q)
    e1 = np.cos(theta) * p + np.sin(theta) * q
    e2 = -np.sin(theta) * p + np.cos(theta) * q
    if e2 @ m < 0:
        e2 = -e2
    diag["theta"] = theta
    return complete_basis(np.vstack([e1, e2])), diag


def _rotate_frame(frame: TangentFrame | None, Q, n) -> TangentFrame:
    if frame is None:
        return TangentFrame(vectors=Q.copy(), gram=Q @ Q.T, coeffs=Q.copy())
    coeffs = Q @ frame.coeffs if frame.coeffs is not None else None
    return TangentFrame(vectors=Q @ frame.vectors, gram=Q @ frame.gram @ Q.T, coeffs=coeffs)


def adapted_basis(cubic, frame: TangentFrame | None = None, *, tol: float = NORMAL_FORM_TOL):
    """Orthonormal basis in which the cubic form has the adapted normal form.

    Returns a ``TangentFrame`` (rotated from ``frame`` or from the cubic's own
    frame), or a ``MinimalCaseMarker`` when H = 0 with a nonzero tensor.
    Raises ``NormalFormError`` when the pattern residual exceeds ``tol``.
    """
    h = _tensor(cubic)
    n = h.shape[0]
    if frame is None and isinstance(cubic, CubicTensor):
        frame = cubic.frame
    Q, diag = adapted_rotation(h)
    if Q is None:
        return MinimalCaseMarker()
    hr = np.einsum("ai,bj,ck,kij->cab", Q, Q, Q, h)
    if diag.get("plane_source") is None or diag.get("plane_source") == "zero tensor":
        res, _ = case2_pattern_residual(hr)
    else:
        res = extract_adapted(CubicTensor(hr), raise_on_violation=False).pattern_residual
    if res > tol * max(1.0, _scale(h)):
        raise NormalFormError(f"adapted-basis pattern residual {res:.3e} exceeds {tol:.1e}")
    return _rotate_frame(frame, Q, n)


def _band(value, thr):
    """'below', 'above' or 'ambiguous' with a factor-2 band around ``thr``."""
    if value < thr / 2:
        return "below"
    if value > 2 * thr:
        return "above"
    return "ambiguous"


def classify_case(cubic, frame: TangentFrame | None, H2: float | None, ideal_residual: float, *,
                  ideal_tol: float = IDEAL_TOL, decision_tol: float = DECISION_TOL,
                  minimal_h2: float = MINIMAL_H2) -> CaseClassification:
    """Case label of a point from its cubic tensor and delta(2, n-2) residual."""
    h = _tensor(cubic)
    n = h.shape[0]
    if frame is None and isinstance(cubic, CubicTensor):
        frame = cubic.frame
    m = np.einsum("caa->c", h) / n
    if H2 is None:
        H2 = float(m @ m)
    diag = {"ideal_residual": float(ideal_residual), "H2": float(H2)}
    empty = CaseClassification(Case.NOT_IDEAL, None, None, float("nan"), [], diagnostics=diag)
    if not np.isfinite(ideal_residual) or abs(ideal_residual) > ideal_tol:
        return empty
    h2_band = _band(H2, minimal_h2)
    if h2_band == "below":
        empty.case = Case.MINIMAL
        return empty
    if h2_band == "ambiguous":
        empty.case = Case.AMBIGUOUS
        return empty

    _, spec = k_tensor(h)
    p_diag = _distinguished_plane(h, m, decision_tol)[2]
    diag.update(p_diag)
    par = _band(p_diag["parallel_gap"], decision_tol)
    iso = _band(p_diag["k_spread"], decision_tol)
    if par == "ambiguous" or (par == "below" and iso == "ambiguous"):
        label = Case.AMBIGUOUS
    elif par == "below" and iso == "below":
        label = Case.CASE_II
    else:
        label = Case.CASE_III

    if label is Case.CASE_II:
        Q = complete_basis(m / np.linalg.norm(m))
        hr = np.einsum("ai,bj,ck,kij->cab", Q, Q, Q, h)
        res, lam = case2_pattern_residual(hr)
        coeffs = AdaptedCoefficients(gamma=(n - 1) * lam, lam=lam, mu=0.0,
                                     block=np.array(hr[2:, 2:, 2:]), pattern_residual=res)
    else:
        Q, _ = adapted_rotation(h, decision_tol if label is Case.CASE_III else 0.0)
        hr = np.einsum("ai,bj,ck,kij->cab", Q, Q, Q, h)
        coeffs = extract_adapted(CubicTensor(hr), raise_on_violation=False)
        res = coeffs.pattern_residual
        diag["margins"] = coeffs.margins()
    return CaseClassification(case=label, adapted_frame=_rotate_frame(frame, Q, n), coeffs=coeffs,
                              pattern_residual=float(res), K_spectrum=spec.tolist(),
                              rotation=Q, diagnostics=diag)
