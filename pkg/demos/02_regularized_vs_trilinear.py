"""Regularized versus trilinear solves on one grid.

Solves the centred unit-charge problem both ways at N=50, compares u_RF with
u_TL = u - G along the x axis, and writes z=0 slices for external plotting.

    python demos/02_regularized_vs_trilinear.py [outdir]
"""
import sys
from pathlib import Path

import numpy as np

from diffuse_poisson import ExperimentConfig, run_regularized, run_trilinear
from diffuse_poisson.experiment import compute_norms, emit_slice, oracle_profile

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
cfg = ExperimentConfig(grid_sizes=(50,))

u_rf, u_total, rep_rf = run_regularized(cfg)
u, u_tl, rep_tl = run_trilinear(cfg)
print(f"CG iterations: regularized {rep_rf.iterations}, trilinear {rep_tl.iterations}")

g = u_rf.grid
j = g.n // 2  # node line nearest to the x axis
profile = oracle_profile(cfg)
print("\n     x      u_RF       u_TL     oracle")
for i in range(j - 8, g.n, 3):
    x = g.axis(0)[i]
    r = np.linalg.norm(g.node(i, j, j))
    print(f"{x:7.3f} {u_rf[i, j, j]:9.5f} {u_tl[i, j, j]:9.5f} {float(profile(r)):9.5f}")

l2, linf = compute_norms(u_rf, u_tl)
_, linf_far = compute_norms(u_rf, u_tl, exclusion_radius=1.0, charges=cfg.charges())
print(f"\n|u_RF - u_TL|: Linf {linf:.3e} (all nodes), {linf_far:.3e} (|r| >= 1)")

for name, f in (("u_rf", u_rf), ("u_tl", u_tl), ("u_total", u_total)):
    print("wrote", emit_slice(f, out / f"slice_{name}.csv"))
