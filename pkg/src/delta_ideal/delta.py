"""Chen delta-invariants and the right-hand sides of the sharp inequalities.

``delta(n_1, ..., n_k) = tau(p) - inf (tau(L_1) + ... + tau(L_k))`` over
mutually orthogonal subspaces with ``dim L_j = n_j``.  The infimum is found by
sampling orthonormal frames and refining with BFGS (analytic gradient) on
skew-symmetric generators mapped through the Cayley transform, which keeps
every iterate exactly orthogonal.  Nelder-Mead remains selectable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize

from .curvature import CurvatureOperator


class Theorem(str, enum.Enum):
    REAL_SPACE_FORM = "RealSpaceForm"
    LAGRANGIAN_STRICT = "LagrangianStrict"
    LAGRANGIAN_FULL = "LagrangianFull"
    DELTA2N2 = "Delta2N2"


class PartitionError(ValueError):
    pass


@dataclass(frozen=True)
class PartitionTuple:
    n: int
    parts: tuple

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        object.__setattr__(self, "parts", parts)
        if not parts:
            raise PartitionError("empty partition")
        if list(parts) != sorted(parts):
            raise PartitionError(f"parts must be non-decreasing, got {parts}")
        if parts[0] < 2 or parts[-1] > self.n - 1:
            raise PartitionError(f"parts must lie in [2, n-1] = [2, {self.n - 1}], got {parts}")
        if sum(parts) > self.n:
            raise PartitionError(f"sum of parts {sum(parts)} exceeds n = {self.n}")

    @property
    def k(self) -> int:
        return len(self.parts)

    @property
    def is_full(self) -> bool:
        return sum(self.parts) == self.n


@dataclass
class DeltaOptions:
    n_samples: int = 2000
    n_refine: int = 10
    restarts: int = 20
    xatol: float = 1e-8
    fatol: float = 1e-13
    maxiter: int = 4000
    ideal_tol: float = 1e-4
    seed: int | None = 0
    method: str = "BFGS"
    gtol: float = 1e-11


@dataclass
class DeltaResult:
    delta_value: float
    minimizing_bases: list
    tau_full: float
    inf_value: float
    rhs: float = float("nan")
    residual: float = float("nan")
    optimizer_trace: dict = field(default_factory=dict)


def b_coefficient(parts, n: int) -> Fraction:
    return Fraction(n * (n - 1), 2) - sum(Fraction(p * (p - 1), 2) for p in parts)


def h2_coefficient(n: int, parts, theorem: Theorem | str) -> Fraction:
    """Coefficient of H^2 in the selected inequality, as an exact fraction."""
    theorem = Theorem(theorem)
    parts = tuple(parts)
    k, s = len(parts), sum(parts)
    if theorem is Theorem.REAL_SPACE_FORM:
        return Fraction(n * n * (n + k - 1 - s), 2 * (n + k - s))
    if theorem is Theorem.LAGRANGIAN_STRICT:
        if s >= n:
            raise PartitionError("LagrangianStrict requires n_1 + ... + n_k < n")
        t = sum(Fraction(6, 2 + p) for p in parts)
        return n * n * (n - s + 3 * k - 1 - t) / (2 * (n - s + 3 * k + 2 - t))
    if theorem is Theorem.LAGRANGIAN_FULL:
        if s != n:
            raise PartitionError("LagrangianFull requires n_1 + ... + n_k = n")
        t = sum(Fraction(2, p + 2) for p in parts[1:])
        return n * n * (k - 1 - t) / (2 * (k - t))
    if parts != (2, n - 2) or n < 5:
        raise PartitionError("Delta2N2 requires the tuple (2, n-2) with n >= 5")
    return Fraction(n * n * (n - 2), 4 * (n - 1))


def inequality_rhs(n: int, parts, c: float, H2: float, theorem: Theorem | str) -> float:
    parts = PartitionTuple(n, tuple(parts)).parts
    return float(h2_coefficient(n, parts, theorem)) * H2 + float(b_coefficient(parts, n)) * c


def _pair_matrix(R):
    """M with tau(P) = 0.5 * vec(P) M vec(P), vec over (i, l) / (j, k)."""
    n = R.shape[0]
    return np.transpose(R, (0, 3, 1, 2)).reshape(n * n, n * n)


class _Objective:
    def __init__(self, curv: CurvatureOperator, tup: PartitionTuple):
        self.n = curv.n
        if tup.n != self.n:
            raise PartitionError(f"partition for n={tup.n} used with curvature of dimension {self.n}")
        self.M = _pair_matrix(curv.R)
        self.parts = tup.parts
        bounds = np.cumsum((0,) + tup.parts)
        self.blocks = [slice(bounds[j], bounds[j + 1]) for j in range(tup.k)]
        labels = np.full(self.n, tup.k)
        for j, sl in enumerate(self.blocks):
            labels[sl] = j
        iu = np.triu_indices(self.n, 1)
        keep = labels[iu[0]] != labels[iu[1]]
        self.free = (iu[0][keep], iu[1][keep])

    def tau_batch(self, V):
        """V: (..., n, r) orthonormal columns -> tau of their span."""
        P = V @ np.swapaxes(V, -1, -2)
        vp = P.reshape(P.shape[:-2] + (-1,))
        return 0.5 * np.einsum("...a,ab,...b->...", vp, self.M, vp)

    def value(self, Q):
        return sum(self.tau_batch(Q[..., :, sl]) for sl in self.blocks)

    def euclidean_grad(self, Q):
        """d value / d Q for a single orthogonal Q."""
        E = np.zeros_like(Q)
        Ms = 0.5 * (self.M + self.M.T)
        for sl in self.blocks:
            V = Q[:, sl]
            G = (Ms @ (V @ V.T).reshape(-1)).reshape(self.n, self.n)
            E[:, sl] = (G + G.T) @ V
        return E

    def value_and_grad(self, Q0, x):
        """Objective at Q0 @ cayley(x) and its gradient in the free coordinates."""
        A = self.skew(x)
        I = np.eye(self.n)
        inv = np.linalg.inv(I - A)
        C = inv @ (I + A)
        Q = Q0 @ C
        W = Q0.T @ self.euclidean_grad(Q)
        K = inv.T @ W @ (I + C).T
        return float(self.value(Q)), K[self.free] - K.T[self.free]

    def skew(self, x):
        A = np.zeros((self.n, self.n))
        A[self.free] = x
        return A - A.T

    def rotate(self, Q0, x):
        A = self.skew(x)
        I = np.eye(self.n)
        return Q0 @ np.linalg.solve(I - A, I + A)


def random_orthogonal(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    G = rng.standard_normal((count, n, n))
    Q, R = np.linalg.qr(G)
    return Q * np.sign(np.einsum("bii->bi", R))[:, None, :]


def delta_invariant(curv: CurvatureOperator, parts, opts: DeltaOptions | None = None, *,
                    c: float | None = None, H2: float | None = None,
                    theorem: Theorem | str | None = None) -> DeltaResult:
    """Two-stage minimization of sum_j tau(L_j).

    When ``c``, ``H2`` and ``theorem`` are all given the right-hand side and the
    signed residual ``rhs - delta`` are filled in.
    """
    opts = opts or DeltaOptions()
    tup = parts if isinstance(parts, PartitionTuple) else PartitionTuple(curv.n, tuple(parts))
    obj = _Objective(curv, tup)
    rng = np.random.default_rng(opts.seed)
    tau_full = curv.scalar()

    Qs = random_orthogonal(rng, opts.n_samples, obj.n)
    vals = obj.value(Qs)
    order = np.argsort(vals, kind="stable")
    best_sample = float(vals[order[0]])
    best_val, best_Q = best_sample, Qs[order[0]]
    n_free = obj.free[0].size
    converged = True
    nfev = 0
    if n_free:
        for idx in order[:opts.n_refine]:
            Q0 = Qs[idx]
            f0 = float(vals[idx])
            for _ in range(opts.restarts):
                if opts.method == "Nelder-Mead":
                    res = minimize(lambda x: float(obj.value(obj.rotate(Q0, x))), np.zeros(n_free),
                                   method="Nelder-Mead",
                                   options={"xatol": opts.xatol, "fatol": opts.fatol,
                                            "maxiter": opts.maxiter, "initial_simplex": _simplex(n_free, 0.1)})
                else:
                    res = minimize(lambda x, q=Q0: obj.value_and_grad(q, x), np.zeros(n_free), jac=True,
                                   method=opts.method, options={"gtol": opts.gtol, "maxiter": opts.maxiter})
                nfev += res.nfev
                Q1 = obj.rotate(Q0, res.x)
                f1 = float(obj.value(Q1))
                if f1 < f0:
                    Q0 = np.linalg.qr(Q1)[0] * np.sign(np.diag(np.linalg.qr(Q1)[1]))
                    improvement = f0 - f1
                    f0 = float(obj.value(Q0))
                    if improvement <= opts.fatol * 10:
                        break
                else:
                    break
            converged = converged and bool(res.success)
            if f0 < best_val:
                best_val, best_Q = f0, Q0

    bases = [best_Q[:, sl].T.copy() for sl in obj.blocks]
    result = DeltaResult(
        delta_value=tau_full - best_val,
        minimizing_bases=bases,
        tau_full=tau_full,
        inf_value=best_val,
        optimizer_trace={
            "n_samples": opts.n_samples,
            "best_sampled": best_sample,
            "best_refined": best_val,
            "refine_starts": min(opts.n_refine, opts.n_samples) if n_free else 0,
            "function_evaluations": int(nfev),
            "converged": converged,
        },
    )
    if c is not None and H2 is not None and theorem is not None:
        result.rhs = inequality_rhs(curv.n, tup.parts, c, H2, theorem)
        result.residual = result.rhs - result.delta_value
    return result


def _simplex(dim: int, size: float) -> np.ndarray:
    return np.vstack([np.zeros(dim), size * np.eye(dim)]) - size / (dim + 1)


def ideality_residual(curv: CurvatureOperator, parts, c: float, H2: float,
                      theorem: Theorem | str = Theorem.DELTA2N2, opts: DeltaOptions | None = None) -> float:
    """Signed ``rhs - delta``; a point is ideal when its magnitude is within ``opts.ideal_tol``."""
    return delta_invariant(curv, parts, opts, c=c, H2=H2, theorem=theorem).residual
