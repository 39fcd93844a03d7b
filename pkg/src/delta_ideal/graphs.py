"""Lagrangian graphs x -> x + i grad F(x) over R^n in C^n.

The graph of a gradient is Lagrangian for any potential F, which makes these
charts a cheap source of generic (non-ideal) Lagrangian submanifolds for
testing the inequality.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ambient import AmbientSpace
from .jets import ImmersionChart


def _symmetrized(T: np.ndarray) -> np.ndarray:
    from itertools import permutations

    axes = list(permutations(range(T.ndim)))
    return sum(np.transpose(T, p) for p in axes) / len(axes)


@dataclass
class PolynomialPotential:
    """F(x) = sum a_ijk x_i x_j x_k + sum b_ijkl x_i x_j x_k x_l with symmetric coefficients."""

    cubic: np.ndarray
    quartic: np.ndarray

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, amplitude: float = 0.3) -> "PolynomialPotential":
        a = _symmetrized(rng.standard_normal((n, n, n)))
        b = _symmetrized(rng.standard_normal((n, n, n, n)))
        return cls(cubic=amplitude * a, quartic=0.5 * amplitude * b)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        g = 3.0 * np.einsum("ijk,...j,...k->...i", self.cubic, x, x)
        return g + 4.0 * np.einsum("ijkl,...j,...k,...l->...i", self.quartic, x, x, x)


def lagrangian_graph_chart(potential: PolynomialPotential, half_width: float = 0.5) -> ImmersionChart:
    n = potential.cubic.shape[0]

    def func(params):
        x = np.asarray(params, dtype=float)
        return x + 1j * potential.gradient(x)

    return ImmersionChart(family_tag="LagrangianGraph", param_dim=n,
                          domain_box=np.tile([-half_width, half_width], (n, 1)), func=func,
                          space=AmbientSpace.flat(n), metadata={"family": "LagrangianGraph", "case": None},
                          payload={"potential": potential})


def random_graph_chart(n: int, seed: int, amplitude: float = 0.3) -> ImmersionChart:
    pot = PolynomialPotential.random(n, np.random.default_rng(seed), amplitude)
    chart = lagrangian_graph_chart(pot)
    chart.metadata.update(seed=seed, amplitude=amplitude)
    return chart
