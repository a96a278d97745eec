"""Coefficient decay and grid errors for the three test setups.

    python3 demos/convergence_study.py
"""

from trispectral.approx import convergence_table, ex1_sqrt, ex3_sine, tail_decay_rate

SETUPS = [
    ("sqrt-weighted exponential, p=(1,1,1)", ex1_sqrt, (1, 1, 1), "w"),
    ("same function, p=(2,2,2)", ex1_sqrt, (2, 2, 2), "w"),
    ("sine example, W-functions", ex3_sine, (2, 2, 2), "w"),
    ("sine example, plain polynomials", ex3_sine, (2, 2, 2), "poly"),
]

for label, f, p, basis in SETUPS:
    table, _ = convergence_table(f, p, 8, basis=basis)
    print(f"{label}")
    print(f"  tail decay ratio {tail_decay_rate(table[:, 1]):.3f}")
    for N in (1, 10, 21, 36, 45):
        _, c, einf, e2 = table[N - 1]
        print(f"  N={N:2d}  |f_N|={c:.2e}  e_inf={einf:.2e}  e_2={e2:.2e}")
