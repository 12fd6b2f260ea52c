"""Leading-order behaviour in eps and spectral convergence in N.

A small eps sweep extrapolates the slopes of the Y_6^2 and Y_4^2
coefficients.  The display of the Y_4^2 slope needs a factor sqrt(3) in its
second term to match; with beta = gamma = 1 the difference is visible.
"""

from eulersphere.acceptance import reference_slopes
from eulersphere.steady import RHParams, construct, epsilon_sweep, leading_coefficients

for b, g in ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0)):
    p = RHParams(b, g)
    sweep = epsilon_sweep(p, [4e-3, 2e-3, 1e-3], nmax=20)
    lead = leading_coefficients(p)
    shown = reference_slopes(b, g)
    print(f"beta={b}, gamma={g}")
    for key in ((6, 2), (4, 2)):
        print(
            f"  Y_{key[0]}^{key[1]}: sweep {sweep.slopes[key]: .6e} +- {sweep.slope_errors[key]:.1e}"
            f"   from f1 {lead[key]: .6e}   display {shown[key]: .6e}"
        )

print("\nresidual versus truncation (eps = 1, beta = gamma = 1)")
p = RHParams(1.0, 1.0)
for N in (8, 12, 16, 20):
    print(f"  N={N:2d}: {construct(p, 1.0, nmax=N, tol=1e-14).residual_l2:.2e}")
print("at eps = 0.05 the residual is already at round-off by N = 16:")
for N in (12, 16, 24):
    print(f"  N={N:2d}: {construct(p, 0.05, nmax=N).residual_l2:.2e}")
