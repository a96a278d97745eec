"""Split a field into a boundary lift plus a part vanishing on the boundary.

    python3 demos/boundary_lift.py
"""

import numpy as np

from trispectral import BoundaryTrace, lift_mu, zero_bc_reduction
from trispectral.approx import convergence_table, cosine_grid

g = lambda x, y: np.exp(x) * np.cos(2 * y)
f = lambda x, y: g(x, y) + x * y * (1 - x - y) * np.sin(x + y)
tr = BoundaryTrace.from_function(g)

x, y = cosine_grid(4)
mu = lift_mu(tr, x, y)
for xi, yi, m in zip(x, y, mu):
    print(f"({xi:.3f}, {yi:.3f})  lift {m: .6f}  trace-free part {f(xi, yi) - m: .2e}")

table, _ = convergence_table(zero_bc_reduction(f, tr), (1, 1, 1), 8)
print("e_2 of the reduced field at N=1, 15, 45:", *(f"{table[i, 3]:.2e}" for i in (0, 14, 44)))
