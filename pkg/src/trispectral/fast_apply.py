"""Structured matrix-vector products with X = F - E and Y.

F is block-diagonal in k with a separable (rank-one per k) lower part, so
it is applied with two running sums. E and the first part of Y share the
I~ recursion: each level's rows follow from the previous level through a
bidiagonal pair (V_m, U_m), which gives a forward sweep for the lower block
triangle and an adjoint sweep for the upper one.

Every operator K here is held as lower part K_L, diagonal blocks K_D, and is
extended as K_L + K_D - K_L^T, matching the skew layout of X and Y.

Counters tally scalar multiplications and additions per input vector;
``flops`` is the multiplication count (a fused multiply-add counts once).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .basis import ParamTriple, as_params, dimension, level_arrays, r_table
from .coupling import build_itilde, itilde_diag_value, itilde_recursion_coeffs
from .special_fn import shifted_norm_h


@dataclass
class CoeffVector:
    M: int
    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.data.shape[0] != dimension(self.M):
            raise ValueError(f"length {self.data.shape[0]} does not match level {self.M}")

    @classmethod
    def zeros(cls, M):
        return cls(M, np.zeros(dimension(M)))

    @classmethod
    def from_blocks(cls, blocks):
        M = len(blocks) - 1
        for m, b in enumerate(blocks):
            if len(b) != m + 1:
                raise ValueError(f"block {m} has length {len(b)}, expected {m + 1}")
        return cls(M, np.concatenate([np.asarray(b, float) for b in blocks]))

    @property
    def blocks(self):
        return [self.data[m * (m + 1) // 2:(m + 1) * (m + 2) // 2] for m in range(self.M + 1)]

    def __len__(self):
        return self.data.shape[0]


@dataclass
class OpCounter:
    mul: int = 0
    add: int = 0

    @property
    def flops(self):
        return self.mul

    def tally(self, mul=0, add=0):
        self.mul += mul
        self.add += add

    def reset(self):
        self.mul = self.add = 0


@dataclass
class RecursiveOperator:
    """Lower part u_{m,l} I~ v_{n,k} applied through the scaled I~ recursion.

    ``q[m]``, ``d1[m]``, ``d2[m]`` (length m, m >= 1) are the level-m
    recursion coefficients with the row scaling u folded in; ``diag[m]`` is
    u I~ v on the diagonal block of level m.
    """

    M: int
    q: list
    d1: list
    d2: list
    diag: list

    def _forward(self, blocks, ctr):
        # L_m = V_m^{-1} U_m (L_{m-1} + D_{m-1} f_{m-1})
        L = [np.zeros_like(blocks[0])]
        Df = [self.diag[0][:, None] * blocks[0]]
        ctr.tally(mul=1)
        for m in range(1, self.M + 1):
            w = L[m - 1] + Df[m - 1]
            ctr.tally(add=m)
            y = np.empty((m + 1,) + w.shape[1:])
            y[:m] = self.q[m][:, None] * w
            y[m] = 0.0
            y[1:] += self.d1[m][:, None] * w
            ctr.tally(mul=2 * m, add=m - 1)
            d2 = self.d2[m]
            for l in range(1, m + 1):
                y[l] -= d2[l - 1] * y[l - 1]
            ctr.tally(mul=m, add=m)
            L.append(y)
            Df.append(self.diag[m][:, None] * blocks[m])
            ctr.tally(mul=m + 1)
        return L, Df

    def _backward(self, blocks, ctr):
        # Z_{m-1} = U_m^T V_m^{-T} (f_m + Z_m), Z_M = 0
        Z = [None] * (self.M + 1)
        Z[self.M] = np.zeros_like(blocks[self.M])
        for m in range(self.M, 0, -1):
            s = blocks[m] + Z[m]
            if m < self.M:
                ctr.tally(add=m + 1)
            d2 = self.d2[m]
            for l in range(m - 1, -1, -1):
                s[l] -= d2[l] * s[l + 1]
            ctr.tally(mul=m, add=m)
            z = self.q[m][:, None] * s[:m] + self.d1[m][:, None] * s[1:]
            ctr.tally(mul=2 * m, add=m)
            Z[m - 1] = z
        return Z

    def apply(self, blocks, ctr, diagonal=True):
        """K_L f + K_D f - K_L^T f by levels; drop K_D when ``diagonal`` is False."""
        L, Df = self._forward(blocks, ctr)
        Z = self._backward(blocks, ctr)
        out = []
        for m in range(self.M + 1):
            h = L[m] - self.diag[m][:, None] * Z[m]
            ctr.tally(mul=m + 1, add=m + 1 if m > 0 else 0)
            if diagonal:
                h = h + Df[m]
                ctr.tally(add=m + 1)
            out.append(h)
        return out

    def lower_dense(self):
        """Reconstruct K_L + K_D by probing with unit vectors (testing aid)."""
        D = dimension(self.M)
        E = np.eye(D)
        blocks = [E[m * (m + 1) // 2:(m + 1) * (m + 2) // 2] for m in range(self.M + 1)]
        L, Df = self._forward(blocks, OpCounter())
        return np.vstack(L) + np.vstack(Df)


def _recursive_operator(M, p, u, v):
    n, k = level_arrays(M)
    q, d1, d2, diag = [None], [None], [None], []
    for m in range(M + 1):
        base = m * (m + 1) // 2
        um = u[base:base + m + 1]
        diag.append(np.array([um[l] * itilde_diag_value(m, l, p) * v[base + l]
                              for l in range(m + 1)]))
        if m == 0:
            continue
        up = u[base - m:base]
        cq = np.empty(m)
        c1 = np.empty(m)
        c2 = np.empty(m)
        for l in range(m + 1):
            qq, a1, a2 = itilde_recursion_coeffs(m, l, p)
            if l < m:
                cq[l] = qq * um[l] / up[l]
            if l >= 1:
                c1[l - 1] = a1 * um[l] / up[l - 1]
                c2[l - 1] = a2 * um[l] / um[l - 1]
        q.append(cq)
        d1.append(c1)
        d2.append(c2)
    return RecursiveOperator(M, q, d1, d2, diag)


@dataclass
class FEFactors:
    """Structured form of X and Y for one truncation level.

    ``a``, ``b``: separated factors of F (lower entry a_{m,k} b_{n,k});
    ``e``: recursive form of E; ``k1``: recursive form of the first Y term,
    so that Y = K1 - E off the diagonal blocks.
    """

    M: int
    params: ParamTriple
    a: np.ndarray
    b: np.ndarray
    e: RecursiveOperator
    k1: RecursiveOperator
    _dense: dict = field(default_factory=dict, repr=False)

    @property
    def D(self):
        return dimension(self.M)

    def dense_f(self):
        n, k = level_arrays(self.M)
        same = k[:, None] == k[None, :]
        L = np.where(same & (n[:, None] > n[None, :]), np.outer(self.a, self.b), 0.0)
        Dg = np.diag(self.a * self.b)
        return L + Dg - L.T

    def _dense_recursive(self, which):
        if which not in self._dense:
            op = self.e if which == "e" else self.k1
            n, _ = level_arrays(self.M)
            LD = op.lower_dense()
            L = np.where(n[:, None] > n[None, :], LD, 0.0)
            self._dense[which] = LD - L.T
        return self._dense[which]

    def dense_e(self):
        return self._dense_recursive("e")

    def dense_k1(self):
        return self._dense_recursive("k1")


def build_factors(M, p):
    p = as_params(p)
    al, be, ga = p.astuple()
    bg = be + ga
    n, k = level_arrays(M)
    r = r_table(M, p)
    lg = special.gammaln
    hk = np.array([shifted_norm_h(kk, ga, be) for kk in k])
    sgn_n = np.where(n % 2 == 0, 1.0, -1.0)
    sgn_k = np.where(k % 2 == 0, 1.0, -1.0)
    a = r * sgn_n * np.exp(lg(bg + n + k + 2) - lg(al + bg + n + k + 2)) * hk / 2
    b = r * sgn_n * np.exp(lg(al + n - k + 1) - lg(n - k + 1))
    # S_{l,k} = A_k B_l for l >= k; likewise for the swapped pair
    A = np.exp(lg(ga + k + 1) - np.log(ga) - lg(k + 1))
    B = np.exp(lg(be + k + 1) - lg(bg + k + 1))
    At = np.exp(lg(be + k + 1) - np.log(be) - lg(k + 1))
    Bt = np.exp(lg(ga + k + 1) - lg(bg + k + 1))
    e = _recursive_operator(M, p, r * B, ga * r * A / 2)
    k1 = _recursive_operator(M, p, r * sgn_k * Bt, be * r * At * sgn_k / 2)
    return FEFactors(M, p, a, b, e, k1)


def _unpack(fac, v):
    vec = v.data if isinstance(v, CoeffVector) else np.asarray(v, dtype=float)
    if isinstance(v, CoeffVector) and v.M != fac.M:
        raise ValueError(f"vector level {v.M} does not match operator level {fac.M}")
    if vec.shape[0] != fac.D:
        raise ValueError(f"vector length {vec.shape[0]} does not match dimension {fac.D}")
    if not np.all(np.isfinite(vec)):
        raise ValueError("input vector has non-finite entries")
    flat = vec.ndim == 1
    mat = vec[:, None] if flat else vec
    blocks = [mat[m * (m + 1) // 2:(m + 1) * (m + 2) // 2] for m in range(fac.M + 1)]
    return blocks, flat, isinstance(v, CoeffVector)


def _zero_result(fac, v):
    """Zero output for an all-zero input, so no work is tallied."""
    blocks, flat, wrap = _unpack(fac, v)
    if any(b.any() for b in blocks):
        return None
    return _pack(fac, np.zeros_like(np.vstack(blocks)), flat, wrap)


def _pack(fac, out, flat, wrap):
    res = out[:, 0] if flat else out
    return CoeffVector(fac.M, res) if wrap else res


def _f_blocks(fac, blocks, ctr, diagonal=True):
    # sigma_m = sum_{n<=m} b f, rho_m = sum_{n>=m} a f, per k
    M = fac.M
    f = np.vstack(blocks)
    nb = f.shape[1]
    ab = fac.a[:, None]
    bb = fac.b[:, None]
    bf = bb * f
    af = ab * f
    ctr.tally(mul=2 * fac.D)
    sig = np.zeros((M + 2, M + 1, nb))
    rho = np.zeros((M + 2, M + 1, nb))
    for m in range(M + 1):
        s = slice(m * (m + 1) // 2, (m + 1) * (m + 2) // 2)
        sig[m + 1] = sig[m]
        sig[m + 1, :m + 1] += bf[s]
        ctr.tally(add=m)
    for m in range(M, -1, -1):
        s = slice(m * (m + 1) // 2, (m + 1) * (m + 2) // 2)
        rho[m] = rho[m + 1]
        rho[m, :m + 1] += af[s]
        ctr.tally(add=m + 1 if m < M else 0)
    out = []
    for m in range(M + 1):
        s = slice(m * (m + 1) // 2, (m + 1) * (m + 2) // 2)
        low = sig[m + 1 if diagonal else m, :m + 1]
        up = rho[m + 1, :m + 1]
        out.append(ab[s] * low - bb[s] * up)
        ctr.tally(mul=2 * (m + 1), add=m + 1)
    return out


def apply_f(fac, v, ctr=None):
    ctr = ctr if ctr is not None else OpCounter()
    zero = _zero_result(fac, v)
    if zero is not None:
        return zero
    blocks, flat, wrap = _unpack(fac, v)
    return _pack(fac, np.vstack(_f_blocks(fac, blocks, ctr)), flat, wrap)


def apply_e(fac, v, ctr=None):
    ctr = ctr if ctr is not None else OpCounter()
    zero = _zero_result(fac, v)
    if zero is not None:
        return zero
    blocks, flat, wrap = _unpack(fac, v)
    return _pack(fac, np.vstack(fac.e.apply(blocks, ctr)), flat, wrap)


def apply_x(fac, v, ctr=None):
    """X v = (F - E) v with the diagonal blocks (which cancel) left out."""
    ctr = ctr if ctr is not None else OpCounter()
    zero = _zero_result(fac, v)
    if zero is not None:
        return zero
    blocks, flat, wrap = _unpack(fac, v)
    if fac.M == 0:
        return _pack(fac, np.zeros_like(np.vstack(blocks)), flat, wrap)
    F = np.vstack(_f_blocks(fac, blocks, ctr, diagonal=False))
    E = np.vstack(fac.e.apply(blocks, ctr, diagonal=False))
    ctr.tally(add=fac.D)
    return _pack(fac, F - E, flat, wrap)


def apply_y(fac, v, ctr=None):
    """Y v = (K1 - E) v with the diagonal blocks left out."""
    ctr = ctr if ctr is not None else OpCounter()
    zero = _zero_result(fac, v)
    if zero is not None:
        return zero
    blocks, flat, wrap = _unpack(fac, v)
    if fac.M == 0:
        return _pack(fac, np.zeros_like(np.vstack(blocks)), flat, wrap)
    K = np.vstack(fac.k1.apply(blocks, ctr, diagonal=False))
    E = np.vstack(fac.e.apply(blocks, ctr, diagonal=False))
    ctr.tally(add=fac.D)
    return _pack(fac, K - E, flat, wrap)
