"""A short tour of the spectral toolbox.

Builds a couple of fields on the 2*pi cube, applies the calculus operators,
and prints the identities that make the decomposition work: projector sums,
Parseval, the exponential tail bound, and the reverse Poincare inequality.

Run:  python3 demos/01_spectral_playground.py
"""

import math

import numpy as np

from qgbal import Grid, SpectralField, gevrey_norm, l2_norm, ops, sobolev_norm
from qgbal.initial import random_field
from qgbal.norms import physical_l2_integral

grid = Grid(32, 32, 32)
x, y, z = grid.meshgrid()

print("== single-mode calculus ==")
f = SpectralField.from_physical(grid, np.cos(x) * np.cos(y) * np.cos(z), "even")
lap = ops.laplacian3(f)
print("laplacian of cos x cos y cos z at (1,1,1):", lap.at((1, 1, 1)), "(expect -3/8)")

print("\n== projections are complementary ==")
g = random_field(grid, decay=0.5, seed=1)
recon = ops.xy_average(g) + ops.pz_project(g)
print("max |xy_average + pz_project - id|:", np.max(np.abs(recon.coeffs - g.coeffs)))

print("\n== Parseval ==")
print("physical integral:", physical_l2_integral(g))
print("coefficient sum * volume:", l2_norm(g) ** 2 * grid.volume)

print("\n== exponential tail bound ==")
sigma, kappa = 0.5, 5.0
hi = g - ops.low_pass(g, kappa)
print("|high|_0:", l2_norm(hi))
print("exp(-sigma kappa) ||g||_sigma:", math.exp(-sigma * kappa) * gevrey_norm(g, sigma))

print("\n== reverse Poincare on the low modes ==")
lo = ops.low_pass(g, kappa)
gx, gy, gz = ops.grad3(lo)
lhs = math.sqrt(sum(sobolev_norm(h, 2.0) ** 2 for h in (gx, gy, gz)))
print("|grad3 f|_2:", lhs, "<= kappa |f|_2 =", kappa * sobolev_norm(lo, 2.0))
