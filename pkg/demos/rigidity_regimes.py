"""Which rigid rotations alpha Y_1^0 admit nearby non-zonal steady states.

For each parameter set the spectral condition is scanned over degrees and
the coercivity constant C1 of the linearized operator is computed.
"""

from eulersphere.rigidity import A_CONST, RigidityParams, rigidity_report

cases = {
    "alpha = gamma, c = 0": RigidityParams(1.0, 0.0, 1.0),
    "gamma = 0, travelling": RigidityParams(1.0, 2 * A_CONST / 3, 0.0),
    "gamma = c = 0": RigidityParams(1.0),
    "generic": RigidityParams(1.0, 0.1, 0.3),
    "a alpha = c": RigidityParams(1.0, A_CONST, 0.5),
}
for label, p in cases.items():
    rep = rigidity_report(p, N=60)
    print(f"{label:24s} {rep['regime']:12s} {rep['verdict']}")
    if "degree1_excluded" in rep:
        c3 = rep["degree1_excluded"]
        print(f"{'':24s} C1 off degree 1 = {c3['computed']:.6f} (the printed constant would be {c3['printed']:.6f})")
