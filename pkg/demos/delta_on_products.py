"""The invariant delta(2,3) on model curvature tensors and on generic Lagrangians.

For S^5(1) every 2-plane and 3-plane has the same curvature, so
delta(2,3) = 10 - 1 - 3 = 6.  On the product S^2(1) x S^3(1) a good choice of
planes separates the factors and the value drops to 3.  Random Lagrangian
graphs in C^5 satisfy the inequality strictly, which is what makes the
ideal families special.

    python demos/delta_on_products.py
"""

import numpy as np

from delta_ideal import DeltaOptions, analyze_point, delta_invariant, sample_points
from delta_ideal.curvature import constant_curvature, product_curvature
from delta_ideal.graphs import random_graph_chart


def main():
    opts = DeltaOptions(seed=0)
    sphere = delta_invariant(constant_curvature(5, 1.0), (2, 3), opts)
    product = delta_invariant(product_curvature((2, 3), (1.0, 1.0)), (2, 3), opts)
    print(f"delta(2,3) on S^5:       {sphere.delta_value:.12f}")
    print(f"delta(2,3) on S^2 x S^3: {product.delta_value:.12f}")

    gaps = []
    for seed in range(10):
        chart = random_graph_chart(5, seed)
        rec = analyze_point(chart, sample_points(chart, 1, seed)[0], checks=("lagrangian", "delta"))
        gaps.append(rec.rhs - rec.delta)
    print(f"\nrandom Lagrangian graphs: rhs - delta ranges over [{min(gaps):.3f}, {max(gaps):.3f}]")
    print("every gap is positive:", bool(np.all(np.array(gaps) > 0)))


if __name__ == "__main__":
    main()
