"""Induced metric, cubic form and normal-form coefficients of a Lagrangian jet.

The second fundamental form of a Lagrangian immersion is stored as its cubic
form ``h[C, A, B] = <h(E_A, E_B), J E_C>`` in an orthonormal tangent frame.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .ambient import AmbientSpace, apply_J
from .jets import ImmersionDegeneracyError, Jet3, TangentFrame

LAGRANGIAN_TOL = 1e-6
OUTSIDE_SPAN_TOL = 1e-5


class LagrangianInconsistencyError(ValueError):
    """Second derivatives leave span{tangent, J tangent, position}."""


class NotInNormalFormError(ValueError):
    """A cubic tensor violates the zero pattern of the adapted normal form."""


@dataclass
class CubicTensor:
    h: np.ndarray
    frame: TangentFrame | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.h.shape[0]

    @property
    def mean_vector(self) -> np.ndarray:
        """Components of H on J E_1, ..., J E_n."""
        return np.einsum("caa->c", self.h) / self.n

    @property
    def H2(self) -> float:
        m = self.mean_vector
        return float(m @ m)

    def symmetry_residual(self) -> float:
        return cubic_symmetry_residual(self.h)

    def rotated(self, Q) -> "CubicTensor":
        """Express in the frame ``F_a = sum_b Q[a, b] E_b``."""
        Q = np.asarray(Q, dtype=float)
        h = np.einsum("ai,bj,ck,kij->cab", Q, Q, Q, self.h)
        frame = None
        if self.frame is not None:
            frame = TangentFrame(vectors=Q @ self.frame.vectors, gram=Q @ self.frame.gram @ Q.T)
        return CubicTensor(h=h, frame=frame, diagnostics=dict(self.diagnostics))


@dataclass
class AdaptedCoefficients:
    gamma: float
    lam: float
    mu: float
    block: np.ndarray
    pattern_residual: float

    def margins(self) -> dict:
        """Slack in the adapted-basis inequalities (nonnegative when they hold)."""
        n = self.block.shape[0] + 2
        return {
            "gamma": self.gamma,
            "gamma_minus_2n_over_3_lambda": self.gamma - 2 * n * self.lam / 3,
            "gamma_minus_n_over_2_lambda": self.gamma - n * self.lam / 2,
        }


def cubic_symmetry_residual(h) -> float:
    h = np.asarray(h)
    return max(float(np.max(np.abs(h - np.transpose(h, p)))) for p in itertools.permutations(range(3)))


def symmetrize(h) -> np.ndarray:
    h = np.asarray(h, dtype=float)
    return sum(np.transpose(h, p) for p in itertools.permutations(range(3))) / 6.0


def induced_metric(jet: Jet3, space: AmbientSpace, check: bool = True) -> np.ndarray:
    g = space.gram(jet.d1)
    if check:
        eig = np.linalg.eigvalsh(0.5 * (g + g.T))
        if eig[0] <= 0:
            raise ImmersionDegeneracyError(
                f"induced metric not positive definite (min eigenvalue {eig[0]:.3e})"
            )
    return g


def lagrangian_residual(jet: Jet3, space: AmbientSpace) -> float:
    """max_{i<j} |<J d_i L, d_j L>| on coordinate vectors scaled to unit length."""
    d1 = np.asarray(jet.d1, dtype=float)
    norms = np.sqrt(np.abs(np.einsum("id,d,id->i", d1, space.signature_mask, d1)))
    omega = space.gram(apply_J(d1), d1) / np.outer(norms, norms)
    iu = np.triu_indices(d1.shape[0], 1)
    return float(np.max(np.abs(omega[iu]))) if iu[0].size else 0.0


def second_fundamental_form(jet: Jet3, space: AmbientSpace, frame: TangentFrame,
                            outside_tol: float = OUTSIDE_SPAN_TOL) -> CubicTensor:
    """Cubic form of the jet in the orthonormal ``frame``.

    Each D_{d_i} d_j L is decomposed against the Gram system of
    {E_a, J E_a} (plus the position vector for lifts); the J E_c components are
    the normal part.  For lifts the position coefficient equals ``-eps g_ij``.
    """
    if jet.d2 is None:
        raise ValueError("second_fundamental_form needs an order >= 2 jet")
    n = jet.n
    E = frame.vectors
    rows = [E, apply_J(E)]
    if space.is_lift:
        rows.append(np.asarray(jet.value, dtype=float)[None, :])
    B = np.vstack(rows)
    M = space.gram(B)
    d2 = np.asarray(jet.d2, dtype=float)
    rhs = np.einsum("kd,d,ijd->ijk", B, space.signature_mask, d2)
    coef = np.linalg.solve(M, rhs.reshape(n * n, -1).T).T.reshape(n, n, -1)
    recon = np.einsum("ijk,kd->ijd", coef, B)
    scale = max(1.0, float(np.max(np.abs(d2))))
    outside = float(np.max(np.abs(d2 - recon))) / scale
    if outside > outside_tol:
        raise LagrangianInconsistencyError(
            f"second derivatives leave span(tangent, J tangent, position) by {outside:.3e}"
        )
    h_coord = coef[:, :, n:2 * n]
    C = frame.coeffs if frame.coeffs is not None else np.eye(n)
    h = np.einsum("ai,bj,ijc->cab", C, C, h_coord)
    diagnostics = {"outside_span": outside, "raw_symmetry": cubic_symmetry_residual(h)}
    if space.is_lift:
        g = space.gram(jet.d1)
        diagnostics["position_residual"] = float(np.max(np.abs(coef[:, :, 2 * n] + space.epsilon * g)))
    return CubicTensor(h=h, frame=frame, diagnostics=diagnostics)


def synthesize_case3(n, gamma, lam, mu, block=None) -> np.ndarray:
    """Cubic tensor with the adapted normal form in the first two slots."""
    h = np.zeros((n, n, n))
    h[0, 0, 0] = gamma
    for (c, a, b) in set(itertools.permutations((1, 0, 1))):
        h[c, a, b] = n * lam - gamma
    h[1, 1, 1] = n * mu
    for i in range(2, n):
        for (c, a, b) in set(itertools.permutations((0, i, i))):
            h[c, a, b] = lam
        for (c, a, b) in set(itertools.permutations((1, i, i))):
            h[c, a, b] = mu
    if block is not None:
        h[2:, 2:, 2:] = block
    return h


def synthesize_case2(n, lam, block=None) -> np.ndarray:
    """Cubic tensor with E_1 along H: h(E1,E1) = (n-1) lam JE1, h(E1,Ei) = lam JEi."""
    h = np.zeros((n, n, n))
    h[0, 0, 0] = (n - 1) * lam
    for i in range(1, n):
        for (c, a, b) in set(itertools.permutations((0, i, i))):
            h[c, a, b] = lam
    if block is not None:
        h[1:, 1:, 1:] = block
    return h


def case2_pattern_residual(h) -> tuple[float, float]:
    """(pattern residual, lambda) of ``h`` read in a frame with E_1 along H."""
    h = np.asarray(h)
    n = h.shape[0]
    lam = float(np.mean([h[0, i, i] for i in range(1, n)]))
    target = synthesize_case2(n, lam, h[1:, 1:, 1:])
    trace = np.einsum("kii->k", h[1:, 1:, 1:])
    res = max(float(np.max(np.abs(h - target))), float(np.max(np.abs(trace))) if n > 1 else 0.0)
    return res, lam


def frame_change(basis: TangentFrame, frame: TangentFrame, space: AmbientSpace | None = None) -> np.ndarray:
    """Q[a, b] = <basis_a, frame_b>, the rotation taking ``frame`` to ``basis``."""
    if space is None:
        return basis.vectors @ frame.vectors.T
    return space.gram(basis.vectors, frame.vectors)


def extract_adapted(cubic: CubicTensor, basis: TangentFrame | None = None, *,
                    space: AmbientSpace | None = None, tol: float = 1e-6,
                    raise_on_violation: bool = True) -> AdaptedCoefficients:
    """Read (gamma, lambda, mu) and the traceless block in an adapted basis.

    ``basis`` may be omitted when ``cubic`` is already expressed in it.
    """
    h = cubic.h
    if basis is not None:
        if cubic.frame is None:
            raise ValueError("cubic tensor carries no frame to rotate from")
        h = cubic.rotated(frame_change(basis, cubic.frame, space)).h
    n = h.shape[0]
    gamma, lam, mu = float(h[0, 0, 0]), float(h[0, 2, 2]), float(h[1, 2, 2])
    block = np.array(h[2:, 2:, 2:])
    target = synthesize_case3(n, gamma, lam, mu, block)
    trace = np.einsum("kii->k", block)
    res = max(float(np.max(np.abs(h - target))), float(np.max(np.abs(trace))))
    if raise_on_violation and res > tol:
        raise NotInNormalFormError(f"normal-form violation {res:.3e} exceeds {tol:.1e}")
    return AdaptedCoefficients(gamma=gamma, lam=lam, mu=mu, block=block, pattern_residual=res)
