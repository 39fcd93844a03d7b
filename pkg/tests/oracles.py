"""Reference computations written independently of the package internals.

Nothing here imports the library; each oracle re-derives its quantity from
first principles (brute force, closed-form calculus, or a different
parametrization) so that agreement is evidence rather than tautology.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm
from scipy.optimize import minimize

# ---------------------------------------------------------------- delta on products of space forms


def _block_projectors(dims):
    n = sum(dims)
    out, start = [], 0
    for m in dims:
        P = np.zeros((n, n))
        P[start:start + m, start:start + m] = np.eye(m)
        out.append(P)
        start += m
    return out


def tau_product(V, dims, curvatures):
    """Scalar curvature of span(columns of V) in a product of space forms.

    For orthonormal e_i, K(e_i, e_j) = sum_A c_A (|a_i|^2 |a_j|^2 - (a_i . a_j)^2)
    with a_i the block-A projection of e_i, so the sum over i < j is
    sum_A c_A ((tr G_A)^2 - tr G_A^2) / 2 with G_A the Gram matrix of the
    projections.  ``V`` may carry leading batch axes.
    """
    total = 0.0
    for P, c in zip(_block_projectors(dims), curvatures):
        G = np.swapaxes(V, -1, -2) @ P @ V
        tr = np.einsum("...ii->...", G)
        tr2 = np.einsum("...ij,...ji->...", G, G)
        total = total + 0.5 * c * (tr**2 - tr2)
    return total


def _haar(rng, count, n):
    G = rng.standard_normal((count, n, n))
    Q, R = np.linalg.qr(G)
    return Q * np.sign(np.einsum("bii->bi", R))[:, None, :]


def delta_oracle(dims, curvatures, parts, samples=10**6, seed=12345, chunk=100_000):
    """Oracle A: brute-force Haar sampling, then BFGS polish on exp(skew).

    Returns (delta, best_sampled_delta).
    """
    n = sum(dims)
    rng = np.random.default_rng(seed)
    bounds = np.cumsum((0,) + tuple(parts))
    blocks = [slice(bounds[j], bounds[j + 1]) for j in range(len(parts))]
    tau_full = 0.5 * sum(c * m * (m - 1) for m, c in zip(dims, curvatures))

    def objective(Q):
        return sum(tau_product(Q[..., :, sl], dims, curvatures) for sl in blocks)

    best_val, best_Q = np.inf, None
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        Qs = _haar(rng, m, n)
        vals = objective(Qs)
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_val, best_Q = float(vals[k]), Qs[k]
        done += m
    sampled = tau_full - best_val

    iu = np.triu_indices(n, 1)

    def pulled(x):
        A = np.zeros((n, n))
        A[iu] = x
        return float(objective(best_Q @ expm(A - A.T)))

    res = minimize(pulled, np.zeros(iu[0].size), method="BFGS", options={"gtol": 1e-12})
    return tau_full - min(res.fun, best_val), sampled


# ---------------------------------------------------------------- coefficients


def delta2n2_h2_coefficient(n: int) -> Fraction:
    """n^2 (n-2) / (4(n-1)), the H^2 coefficient of the delta(2, n-2) inequality."""
    return Fraction(n * n * (n - 2), 4 * (n - 1))


def lagrangian_full_coefficient_at(n: int, parts) -> Fraction:
    """Full-partition Lagrangian coefficient written out term by term."""
    k = len(parts)
    tail = Fraction(0)
    for p in parts[1:]:
        tail += Fraction(2, p + 2)
    return Fraction(n * n) * (k - 1 - tail) / (2 * (k - tail))


def b_naive(parts, n: int) -> int:
    """Count of coordinate planes not inside a single block: C(n,2) - sum C(n_j,2)."""
    count = 0
    starts = np.cumsum((0,) + tuple(parts))
    label = np.full(n, -1)
    for j in range(len(parts)):
        label[starts[j]:starts[j + 1]] = j
    for i in range(n):
        for j in range(i + 1, n):
            if label[i] < 0 or label[i] != label[j]:
                count += 1
    return count


# ---------------------------------------------------------------- closed forms


def cos4x_quarter(x):
    return np.cos(4 * np.asarray(x, dtype=float)) ** 0.25


def cos4x_quarter_ode_residual(x):
    """4 f^4 + 3 f^2 f'^2 + f^3 f'' with f = cos(4x)^(1/4), derivatives by hand.

    f' = -sin(4x) cos(4x)^(-3/4),
    f'' = -4 cos(4x)^(1/4) - 3 sin^2(4x) cos(4x)^(-7/4).
    """
    x = np.asarray(x, dtype=float)
    c, s = np.cos(4 * x), np.sin(4 * x)
    f = c**0.25
    f1 = -s * c**-0.75
    f2 = -4 * c**0.25 - 3 * s**2 * c**-1.75
    return 4 * f**4 + 3 * f**2 * f1**2 + f**3 * f2


def cn_profile_reference(n, y0, t_end, t_eval):
    """Cn_II profile from scipy's adaptive DOP853 at tight tolerance."""

    def rhs(t, y):
        lam, phi, _ = y
        return [(n - 3) * lam * phi, -phi**2 - (n - 2) * lam**2, (n - 1) * lam]

    sol = solve_ivp(rhs, (0.0, t_end), y0, method="DOP853", rtol=1e-13, atol=1e-14, t_eval=t_eval)
    return sol.y


# ---------------------------------------------------------------- Lagrangian graphs


def sym3(a):
    return sum(np.transpose(a, p) for p in permutations(range(3))) / 6


def graph_curvature_at_origin(third):
    """Riemann tensor of x -> x + i grad F at x = 0 from metric second derivatives.

    ``third[i, j, k] = F_ijk(0)`` with F_ij(0) = 0 (no quadratic part), so
    g_ij = delta_ij + sum_k F_ik F_jk has vanishing first derivatives at 0 and
    d_a d_b g_ij = sum_k (F_ika F_jkb + F_ikb F_jka).  In such coordinates
    R[i, j, k, l] = -(g_il,jk + g_jk,il - g_jl,ik - g_ik,jl) / 2 in the
    convention where R[i, j, j, i] is the sectional curvature.
    """
    T = np.asarray(third)
    # ddg[a, b, i, j] = d_a d_b g_ij
    ddg = np.einsum("ika,jkb->abij", T, T) + np.einsum("ikb,jka->abij", T, T)
    R = 0.5 * (np.einsum("iljk->ijkl", ddg) + np.einsum("jkil->ijkl", ddg)
               - np.einsum("jlik->ijkl", ddg) - np.einsum("ikjl->ijkl", ddg))
    return -R


def graph_sectional_gauss(third, i, j):
    """K(e_i, e_j) = <h(e_i,e_i), h(e_j,e_j)> - |h(e_i,e_j)|^2 for h(e_a,e_b) = F_abk J e_k."""
    T = np.asarray(third)
    return float(T[i, i] @ T[j, j] - T[i, j] @ T[i, j])
