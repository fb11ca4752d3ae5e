"""Grid convergence against the radial reference and the trilinear baseline.

The regularized solution converges to the 1D reference at second order,
while the trilinear solution's error at the charge grows like 1/h.

    python demos/03_convergence_study.py [N ...]      (default: 40 50 80 100)
"""
import sys

from diffuse_poisson import ExperimentConfig, convergence_study
from diffuse_poisson.experiment import format_table

sizes = tuple(int(a) for a in sys.argv[1:]) or (40, 50, 80, 100)
rows = convergence_study(ExperimentConfig(grid_sizes=sizes))
print(format_table(sorted(rows, key=lambda r: (r.pair, r.norm_name, r.n))))
