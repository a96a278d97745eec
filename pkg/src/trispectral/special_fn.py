"""Gamma-family helpers and Jacobi polynomial machinery.

All Jacobi polynomials use the classical normalisation on [-1, 1]; the
"shifted" helpers refer to the same polynomials composed with ``2x - 1``
and integrated over [0, 1].
"""

from dataclasses import dataclass

import numpy as np
from scipy import special


def _check_positive(*values):
    for v in values:
        if not np.all(np.asarray(v) > 0):
            raise ValueError(f"argument must be positive, got {v!r}")


def log_gamma(x):
    """Natural log of the Gamma function for positive real ``x``."""
    _check_positive(x)
    return special.gammaln(x)


def beta(x, y):
    _check_positive(x, y)
    return np.exp(special.gammaln(x) + special.gammaln(y) - special.gammaln(x + y))


def pochhammer(x, n):
    """Rising factorial (x)_n.

    Small integer ``n`` uses the direct product so that integer-valued
    results stay exact; otherwise the log-gamma ratio is used (needs x > 0).
    """
    n = int(n)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n <= 64:
        out = 1.0
        for j in range(n):
            out *= x + j
        return out
    _check_positive(x)
    return float(np.exp(special.gammaln(x + n) - special.gammaln(x)))


@dataclass(frozen=True)
class JacobiParams:
    a: float
    b: float

    def __post_init__(self):
        if not (self.a > -1 and self.b > -1):
            raise ValueError(f"Jacobi parameters must exceed -1, got ({self.a}, {self.b})")


@dataclass(frozen=True)
class RecurrenceCoeffs:
    a: float
    b: float
    c: float
    d: float


def _params(p):
    if isinstance(p, JacobiParams):
        return p.a, p.b
    a, b = p
    JacobiParams(a, b)
    return float(a), float(b)


def jacobi_table(nmax, a, b, u):
    """Values of P_0..P_nmax with parameters (a, b) at ``u``.

    Returns an array of shape ``(nmax + 1,) + u.shape``.
    """
    u = np.asarray(u, dtype=float)
    out = np.empty((nmax + 1,) + u.shape)
    out[0] = 1.0
    if nmax == 0:
        return out
    out[1] = 0.5 * (a + b + 2) * u + 0.5 * (a - b)
    for n in range(1, nmax):
        s = 2 * n + a + b
        c1 = 2 * (n + 1) * (n + a + b + 1) * s
        c2 = (s + 1) * (s + 2) * s
        c3 = (s + 1) * (a * a - b * b)
        c4 = 2 * (n + a) * (n + b) * (s + 2)
        out[n + 1] = ((c2 * u + c3) * out[n] - c4 * out[n - 1]) / c1
    return out


def jacobi_eval(n, p, u):
    """P_n^{(a,b)}(u) by the ascending three-term recurrence."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    a, b = _params(p)
    vals = jacobi_table(n, a, b, u)[n]
    return vals if vals.ndim else float(vals)


def homogeneous_jacobi_table(nmax, a, b, v, s):
    """Values of s^n P_n^{(a,b)}(v / s) for n = 0..nmax.

    The recurrence is run on the homogenised polynomials, so ``s = 0`` is
    allowed and gives the leading-coefficient limit.
    """
    v = np.asarray(v, dtype=float)
    s = np.asarray(s, dtype=float)
    v, s = np.broadcast_arrays(v, s)
    out = np.empty((nmax + 1,) + v.shape)
    out[0] = 1.0
    if nmax == 0:
        return out
    out[1] = 0.5 * (a + b + 2) * v + 0.5 * (a - b) * s
    s2 = s * s
    for n in range(1, nmax):
        t = 2 * n + a + b
        c1 = 2 * (n + 1) * (n + a + b + 1) * t
        c2 = (t + 1) * (t + 2) * t
        c3 = (t + 1) * (a * a - b * b)
        c4 = 2 * (n + a) * (n + b) * (t + 2)
        out[n + 1] = ((c2 * v + c3 * s) * out[n] - c4 * s2 * out[n - 1]) / c1
    return out


def jacobi_deriv_table(nmax, a, b, u):
    """Derivatives d/du P_n^{(a,b)} for n = 0..nmax."""
    u = np.asarray(u, dtype=float)
    out = np.zeros((nmax + 1,) + u.shape)
    if nmax == 0:
        return out
    lower = jacobi_table(nmax - 1, a + 1, b + 1, u)
    for n in range(1, nmax + 1):
        out[n] = 0.5 * (n + a + b + 1) * lower[n - 1]
    return out


def jacobi_norm_h(m, p):
    """Squared norm of P_m^{(a,b)} on [-1, 1] under (1-u)^a (1+u)^b."""
    a, b = _params(p)
    logh = ((1 + a + b) * np.log(2.0) + special.gammaln(1 + a + m)
            + special.gammaln(1 + b + m) - special.gammaln(m + 1)
            - np.log(1 + a + b + 2 * m) - special.gammaln(1 + a + b + m))
    return float(np.exp(logh))


def shifted_norm_h(m, a, b):
    """int_0^1 (1-x)^a x^b P_m^{(a,b)}(2x-1)^2 dx."""
    return jacobi_norm_h(m, (a, b)) / 2.0 ** (1 + a + b)


def shift_coeffs(n, p):
    """Coefficients of the parameter-shift identities used by the Itilde recursion.

    (1-u) P_n^{(a+1,b)} = a_n P_n^{(a,b)} - b_n P_{n+1}^{(a,b)}
    P_n^{(a+2,b)} = c_n P_{n-1}^{(a+2,b)} + d_n P_n^{(a+1,b)}
    """
    a, b = _params(p)
    s = 2 * n + a + b + 2
    return RecurrenceCoeffs(
        a=2 * (n + a + 1) / s,
        b=2 * (n + 1) / s,
        c=(n + b) / (n + a + b + 2),
        d=s / (n + a + b + 2),
    )


def gauss_jacobi01(n, a, b):
    """Gauss rule for int_0^1 (1-x)^a x^b g(x) dx with ``n`` nodes."""
    u, w = special.roots_jacobi(n, a, b)
    return 0.5 * (1 + u), w / 2.0 ** (1 + a + b)


def shifted_jacobi_moment(N, a, b, c):
    """int_0^1 x^b (1-x)^c P_N^{(a,b)}(2x-1) dx in closed form.

    The hypergeometric sum is balanced, so Pfaff-Saalschutz gives
    B(b+1, c+1) (b+1)_N (a-c)_N / (N! (b+c+2)_N); the product is
    accumulated term by term to stay in range.
    """
    val = beta(b + 1, c + 1)
    for j in range(N):
        val *= (b + 1 + j) * (a - c + j) / ((j + 1) * (b + c + 2 + j))
    return val
