"""RK4 on a' = X a: the skew matrix keeps the norm nearly constant.

    python3 demos/advection.py
"""

from trispectral import apply_x, build_factors
from trispectral.approx import ex3_sine, expand
from trispectral.evolve import evolve, norm_drift

M, p = 20, (2, 2, 2)
fac = build_factors(M, p)
a0 = expand(ex3_sine, M, p).coeffs.data
prev = None
for dt in (1e-2, 5e-3, 2.5e-3, 1.25e-3):
    _, norms, _ = evolve(lambda a: apply_x(fac, a), a0, dt, 1.0)
    d = norm_drift(norms)
    print(f"dt={dt:.2e}  drift={d:.3e}" + (f"  ratio={prev / d:.1f}" if prev else ""))
    prev = d
