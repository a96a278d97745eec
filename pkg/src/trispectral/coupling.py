"""One-dimensional coupling integrals S, S~, I and I~ between Jacobi factors.

Conventions: ``S[l, k]`` is S^{gamma,beta}_{l,k}; ``I[m, n, k]`` is
I_{(m-k,k),(n-k,k)} indexed by the two total degrees; the I~ table is
indexed by level-major basis positions, row (m, l) and column (n, k).
"""

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import special

from .basis import ParamTriple, as_params, dimension, level_arrays
from .special_fn import beta as beta_fn
from .special_fn import gauss_jacobi01, jacobi_table, shift_coeffs, shifted_jacobi_moment

TABLE_VERSION = 1
_HEADER = struct.Struct("<4dB")


class QuadratureError(RuntimeError):
    def __init__(self, msg, estimate):
        super().__init__(f"{msg} (estimated error {estimate:.3e})")
        self.estimate = estimate


def _lg(x):
    return special.gammaln(x)


def _require_positive(*vals):
    for v in vals:
        if not v > 0:
            raise ValueError(f"parameter must be positive, got {v}")


def s_value(l, k, gamma, beta):
    """S^{gamma,beta}_{l,k}; symmetric in (l, k)."""
    _require_positive(gamma, beta)
    if l < k:
        l, k = k, l
    return float(np.exp(_lg(gamma + k + 1) - np.log(gamma) - _lg(k + 1)
                        + _lg(beta + l + 1) - _lg(beta + gamma + l + 1)))


def s_tilde_value(l, k, gamma, beta):
    """S~^{gamma,beta}_{l,k} = (-1)^{l+k} S^{beta,gamma}_{l,k}."""
    return (-1) ** (l + k) * s_value(l, k, beta, gamma)


def i_diag_value(m, n, k, p):
    """I_{(m-k,k),(n-k,k)} for k <= min(m, n)."""
    p = as_params(p)
    if not (0 <= k <= min(m, n)):
        raise ValueError(f"need 0 <= k <= min(m, n), got m={m}, n={n}, k={k}")
    if m < n:
        m, n = n, m
    a, bg = p.alpha, p.beta + p.gamma
    val = np.exp(_lg(a + n - k + 1) - _lg(n - k + 1) - np.log(a)
                 + _lg(bg + m + k + 2) - _lg(a + bg + m + k + 2))
    return float((-1) ** (n + m) * val)


def itilde_diag_value(m, k, p):
    """I~_{(m-k,k),(m-k,k)}."""
    p = as_params(p)
    a1 = p.beta + p.gamma + 2 * k + 1
    N = m - k
    # P_N(1) times the moment against the remaining (1-x)^{a1-1} x^alpha weight
    logv = (_lg(a1 + 1 + N) - _lg(a1 + 1) - _lg(N + 1)
            + _lg(a1) + _lg(p.alpha + N + 1) - _lg(a1 + p.alpha + N + 1))
    return float(np.exp(logv))


def itilde_row0_values(m, n, p):
    """I~_{(m,0),(n,0)} for m >= n (vectorised over n)."""
    p = as_params(p)
    n = np.asarray(n, dtype=float)
    bg = p.beta + p.gamma
    logv = (_lg(bg + n + 2) - _lg(bg + 2) - _lg(n + 1) + _lg(bg + 1)
            + _lg(p.alpha + m + 1) - _lg(p.alpha + bg + m + 2))
    return np.exp(logv)


def itilde_edge_value(m, n, k, p):
    """I~_{(0,m),(n-k,k)}: one Jacobi factor against a pure power of (1-x)."""
    p = as_params(p)
    a1 = p.beta + p.gamma + 2 * k + 1
    return shifted_jacobi_moment(n - k, a1, p.alpha, k + m + p.beta + p.gamma)


def itilde_recursion_coeffs(m, l, p):
    """(q, d1, d2) with I~(m,l) = q I~(m-1,l) + d1 I~(m-1,l-1) - d2 I~(m,l-1)."""
    p = as_params(p)
    rc = shift_coeffs(m - l, (p.beta + p.gamma + 2 * (l - 1) + 1, p.alpha))
    return rc.c, 0.5 * rc.d * rc.a, 0.5 * rc.d * rc.b


@dataclass
class SCache:
    params: ParamTriple
    M: int
    S: np.ndarray
    St: np.ndarray
    I: np.ndarray


def recurrence_ladders(M, p):
    """S, S~ and I tables filled from their Beta-function seeds by ladders only."""
    p = as_params(p)
    al, be, ga = p.astuple()
    S = np.zeros((M + 1, M + 1))
    St = np.zeros((M + 1, M + 1))
    S[0, 0] = beta_fn(be + 1, ga)
    St[0, 0] = beta_fn(be, ga + 1)
    for l in range(1, M + 1):
        S[l, 0] = (be + l) / (be + ga + l) * S[l - 1, 0]
        St[l, 0] = -(ga + l) / (be + ga + l) * St[l - 1, 0]
    for l in range(M + 1):
        for k in range(1, l + 1):
            S[l, k] = (ga + k) / k * S[l, k - 1]
            St[l, k] = -(be + k) / k * St[l, k - 1]
    iu = np.triu_indices(M + 1, 1)
    S[iu] = S.T[iu]
    St[iu] = St.T[iu]

    bg = be + ga
    I = np.zeros((M + 1, M + 1, M + 1))
    I[0, 0, 0] = beta_fn(al, bg + 2)
    for m in range(1, M + 1):
        I[m, 0, 0] = -(bg + m + 1) / (al + bg + m + 1) * I[m - 1, 0, 0]
    for m in range(M + 1):
        for n in range(1, m + 1):
            I[m, n, 0] = -(al + n) / n * I[m, n - 1, 0]
        for n in range(m + 1):
            for k in range(1, n + 1):
                I[m, n, k] = ((n - k + 1) * (bg + m + k + 1)
                              / ((al + n - k + 1) * (al + bg + m + k + 1))) * I[m, n, k - 1]
    for m in range(M + 1):
        for n in range(m + 1, M + 1):
            I[m, n] = I[n, m]
    return SCache(p, M, S, St, I)


@dataclass
class ItildeTable:
    """I~ values for all basis pairs up to level M.

    ``values`` holds the lower block triangle (row level >= column level);
    the upper part is implied by symmetry.
    """

    params: ParamTriple
    M: int
    values: np.ndarray

    def __getitem__(self, key):
        (m, l), (n, k) = key
        i = m * (m + 1) // 2 + l
        j = n * (n + 1) // 2 + k
        if m < n:
            i, j = j, i
        return float(self.values[i, j])

    def full(self):
        n, _ = level_arrays(self.M)
        lower = n[:, None] >= n[None, :]
        strict = n[:, None] > n[None, :]
        out = np.where(lower, self.values, 0.0)
        return out + np.where(strict, self.values, 0.0).T

    def dump(self, path):
        path = Path(path)
        al, be, ga = self.params.astuple()
        n, _ = level_arrays(self.M)
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(float(self.M), al, be, ga, TABLE_VERSION))
            for j in range(dimension(self.M)):
                start = n[j] * (n[j] + 1) // 2
                fh.write(np.ascontiguousarray(self.values[start:, j], dtype="<f8").tobytes())

    @classmethod
    def load(cls, path):
        data = Path(path).read_bytes()
        if len(data) < _HEADER.size:
            raise ValueError(f"{path}: truncated table header")
        M, al, be, ga, version = _HEADER.unpack_from(data)
        if version != TABLE_VERSION:
            raise ValueError(f"{path}: table version {version}, expected {TABLE_VERSION}")
        M = int(M)
        D = dimension(M)
        n, _ = level_arrays(M)
        vals = np.zeros((D, D))
        offset = _HEADER.size
        for j in range(D):
            start = n[j] * (n[j] + 1) // 2
            cnt = D - start
            vals[start:, j] = np.frombuffer(data, dtype="<f8", count=cnt, offset=offset)
            offset += 8 * cnt
        if offset != len(data):
            raise ValueError(f"{path}: payload size mismatch")
        return cls(ParamTriple(al, be, ga), M, vals)


def build_itilde(M, p):
    """Fill the I~ table with the level recursion.

    Each level m >= 1 is seeded by the l = 0 row and the l = m edge row
    (closed forms); interior rows use the three-term recursion, vectorised
    over all columns of lower levels. Diagonal blocks are diagonal.
    """
    p = as_params(p)
    D = dimension(M)
    T = np.zeros((D, D))
    ncol, kcol = level_arrays(M)
    for m in range(M + 1):
        base = m * (m + 1) // 2
        for k in range(m + 1):
            T[base + k, base + k] = itilde_diag_value(m, k, p)
        if m == 0:
            continue
        cols = slice(0, base)
        prev = (m - 1) * m // 2
        nc, kc = ncol[:base], kcol[:base]
        T[base, cols] = np.where(kc == 0, itilde_row0_values(m, nc, p), 0.0)
        for l in range(1, m):
            q, d1, d2 = itilde_recursion_coeffs(m, l, p)
            T[base + l, cols] = (q * T[prev + l, cols] + d1 * T[prev + l - 1, cols]
                                 - d2 * T[base + l - 1, cols])
        T[base + m, cols] = [itilde_edge_value(m, n, k, p) for n, k in zip(nc, kc)]
    return ItildeTable(p, M, T)


_FAMILIES = {"S", "St", "I", "It"}


def oracle_integral(family, indices, p, nodes=None, tol=1e-11, return_error=False):
    """Gauss-Jacobi evaluation of one coupling integral.

    ``family`` is one of "S", "St", "I", "It". For S/St ``indices`` is
    (l, k); for I/It it is ((m, l), (n, k)) with m, n total degrees.
    The endpoint powers are absorbed in the Jacobi weight, so polynomial
    integrands are integrated exactly.
    """
    if family not in _FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    p = as_params(p)
    al, be, ga = p.astuple()
    if family in ("S", "St"):
        l, k = indices
        wa, wb = (ga - 1, be) if family == "S" else (ga, be - 1)
        deg = l + k

        def integrand(x):
            P = jacobi_table(max(l, k), ga, be, 2 * x - 1)
            return P[l] * P[k]
    else:
        (m, l), (n, k) = indices
        if not (0 <= l <= m and 0 <= k <= n):
            raise ValueError(f"invalid indices {indices}")
        base = k + l + be + ga
        wa, wb = (base + 1, al - 1) if family == "I" else (base, al)
        deg = (m - l) + (n - k)

        def integrand(x):
            u = 2 * x - 1
            A = jacobi_table(m - l, be + ga + 2 * l + 1, al, u)[m - l]
            B = jacobi_table(n - k, be + ga + 2 * k + 1, al, u)[n - k]
            return A * B

    npts = nodes or deg // 2 + 4
    x1, w1 = gauss_jacobi01(npts, wa, wb)
    x2, w2 = gauss_jacobi01(npts + 8, wa, wb)
    v1 = float(np.sum(w1 * integrand(x1)))
    v2 = float(np.sum(w2 * integrand(x2)))
    est = abs(v2 - v1)
    scale = max(abs(v2), float(np.sum(np.abs(w2 * integrand(x2)))))
    if est > tol * max(scale, 1e-300):
        raise QuadratureError(f"{family}{indices} did not converge", est)
    return (v2, est) if return_error else v2
