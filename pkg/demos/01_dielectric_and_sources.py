"""Diffuse dielectric and the smooth reaction-field source.

Prints the level set and dielectric across the transition band, then shows
that the source grad(eps).grad(G) is bounded and supported only in the band,
whereas a trilinearly spread point charge grows like 1/h^3.

    python demos/01_dielectric_and_sources.py
"""
import numpy as np

from diffuse_poisson import ChargeSet, TanhSphericalDielectric, benchmark_grid
from diffuse_poisson.charges import regularized_source, trilinear_source

raw = TanhSphericalDielectric()
smooth = TanhSphericalDielectric(normalized=True)

print(" |r|    s(raw)   s(cont)   eps(raw)  eps(cont)")
for rad in (0.0, 1.9, 2.0, 2.01, 2.5, 3.5, 4.5, 4.99, 5.0, 6.0):
    print(f"{rad:5.2f}  {raw.level_set_radial(rad):.5f}  {smooth.level_set_radial(rad):.5f}"
          f"  {raw.epsilon_radial(rad):8.4f}  {smooth.epsilon_radial(rad):8.4f}")

# The raw tanh stops short of its plateaus by (1 - tanh(k/2))/2 at both edges.
print("\nedge jump of the raw level set:", (1 - np.tanh(3.0)) / 2)

charge = ChargeSet.single(1.0)
for n in (50, 100):
    g = benchmark_grid(n)
    f = regularized_source(charge, smooth, g).values
    t = trilinear_source(charge, g).values
    rad = g.radius()
    band = (rad > 2) & (rad < 5)
    print(f"\nN={n}: regularized source min {f.min():.4f}, nonzero only in band: {np.all(f[~band] == 0)}")
    print(f"       trilinear source max {t.max():.1f}  (4*pi/(8 h^3) = {4 * np.pi / 8 / g.spacing**3:.1f})")
