"""Run the constructed state through the time-dependent equation.

The state is steady in the rotating frame, so the vorticity should not
move; energy and enstrophy are conserved to round-off.  Without rotation
the same profile turns rigidly at the sphere's angular velocity.
"""

from eulersphere.dynamics import EvolutionConfig, evolve, travelling_wave_check
from eulersphere.harmonics import laplacian
from eulersphere.steady import RHParams, assemble_solution, construct

p = RHParams(1.0, 1.0)
Psi, _ = assemble_solution(construct(p, 0.05, nmax=16))
omega0 = laplacian(Psi)

cfg = EvolutionConfig(dt=2e-3, T=2.0, gamma=p.gamma, nmax=16, sample_every=100)
omega_T, diag = evolve(omega0, cfg)
print(f"{cfg.n_steps} RK4 steps")
print(" time      energy              enstrophy           drift")
for t, e, z, _, d in diag.rows():
    print(f"{t:5.2f}  {e:.15f}  {z:.15f}  {d:.1e}")
print(f"relative energy change    {diag.relative_change('energy'):.1e}")
print(f"relative enstrophy change {diag.relative_change('enstrophy'):.1e}")

err = travelling_wave_check(RHParams(0.0, 1.0), 0.02, T=0.5, nmax=16, dt=1e-3)
print(f"non-rotating travelling wave, relative mismatch {err:.1e}")
