"""Gevrey norms of the constructed correction.

The largest lambda for which the Gevrey norm of psi_eps stays below
150 (1 + gamma^2 + beta^2)^2 gives a lower bound on the analyticity radius;
it barely moves with eps.
"""

import numpy as np

from eulersphere.norms import GevreySpec, analyticity_profile, gevrey_norm, norm_table, sobolev_norm
from eulersphere.steady import RHParams, construct

p = RHParams(1.0, 1.0)
bound = 150.0 * p.size**2
lam_grid = np.arange(0.01, 10.0, 0.01)
for eps in (0.01, 0.05, 0.2):
    psi = construct(p, eps, nmax=24).psi
    lam = analyticity_profile(psi, bound, lam_grid)
    print(f"eps={eps:4.2f}  H^2 {sobolev_norm(psi):.3e}  G(0.5) {gevrey_norm(psi, GevreySpec(0.5)):.3e}  lambda_max {lam:.2f}")

print()
for kind, par, val in norm_table(construct(p, 0.05, nmax=24).psi):
    print(f"{kind}  {par:4.1f}  {val:.6e}")
