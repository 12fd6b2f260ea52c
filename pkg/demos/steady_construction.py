"""Build one non-zonal steady state near beta Y_2^0 + gamma Y_1^0.

The contraction map is iterated from zero; each step fixes the cubic
coefficients (A, B) so that the forcing has no kernel content, then inverts
Delta + 6.  The result is audited against the full steady equation.
"""

from eulersphere.steady import RHParams, assemble_solution, construct, leading_coefficients, limit_coefficients

p = RHParams(beta=1.0, gamma=1.0)
eps = 0.05
r = construct(p, eps, nmax=16)

print(f"converged in {r.iterations} iterations")
for k, (inc, rho) in enumerate(zip(r.increments[1:], r.contraction_estimates), start=2):
    print(f"  step {k}: H^2 increment {inc:.2e}, ratio {rho:.2e}")
a0, b0 = limit_coefficients(p)
print(f"A = {r.nonlinearity.A:.6f}   (eps -> 0 limit {a0:.6f})")
print(f"B = {r.nonlinearity.B:.6f}   (eps -> 0 limit {b0:.6f})")
print("iteration space bounds hold:", r.x_membership.ok, "| A,B bounds hold:", r.ab_bounds_ok)
print(f"steady residual ||Delta Psi - 4 gamma Y_1^0 - F(Psi)|| = {r.residual_l2:.2e}")

Psi, F = assemble_solution(r)
print("F(s) =", F)
lead = leading_coefficients(p)
print(f"<psi, Y_6^2> / eps = {r.psi[6, 2] / eps:.6e}, leading order {lead[(6, 2)]:.6e}")
print(f"<psi, Y_4^2> / eps = {r.psi[4, 2] / eps:.6e}, leading order {lead[(4, 2)]:.6e}")
