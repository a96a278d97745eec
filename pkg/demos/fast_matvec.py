"""Fast versus dense application of the x-derivative matrix.

    python3 demos/fast_matvec.py
"""

import time

import numpy as np

from trispectral import OpCounter, apply_x, assemble_x, build_factors

rng = np.random.default_rng(0)
p = (2, 2, 2)
print(" M      D   mults   dense(s)   fast(s)   rel err")
for M in (10, 20, 40, 80):
    fac = build_factors(M, p)
    X = assemble_x(M, p).dense
    v = rng.standard_normal(fac.D)
    t0 = time.perf_counter()
    ref = X @ v
    td = time.perf_counter() - t0
    c = OpCounter()
    t0 = time.perf_counter()
    out = apply_x(fac, v, c)
    tf = time.perf_counter() - t0
    err = np.abs(out - ref).max() / np.abs(ref).max()
    print(f"{M:2d} {fac.D:6d} {c.mul:7d} {td:10.2e} {tf:9.2e} {err:9.1e}")
