import time

import numpy as np

import base_geometry
import gauge_field
import models

print("--- Starting Model Verification ---")

for name in ("hyperbolic3", "homog:su2", "homog:so3", "homog:t2", "abelian:2"):
    start_time = time.time()
    chart, _ = models.build_model(name, strength=0.5 if name.startswith("abelian") else None)
    points = gauge_field.sample_points(chart, 16, seed=1, margin=0.05)
    residuals = np.array([gauge_field.integrability_residuals(chart, x) for x in points])
    rng = np.random.default_rng(1)
    K = [base_geometry.sectional_curvature(chart, x, *rng.standard_normal((2, chart.base_dim)))
         for x in points]
    end_time = time.time()

    print(f"\n{name}:")
    print(f"  max r1 = {residuals[:, 0].max():.3e}, max r2 = {residuals[:, 1].max():.3e}")
    print(f"  sectional curvature in [{min(K):.6f}, {max(K):.6f}]")
    print(f"  Time taken: {end_time - start_time:.4f} seconds")
