"""Reference triangle, Koornwinder polynomials and the associated W-functions."""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .special_fn import homogeneous_jacobi_table, jacobi_deriv_table, jacobi_table, shifted_norm_h

SNAP_TOL = 1e-12


@dataclass(frozen=True)
class ParamTriple:
    """Weight exponents of w(x, y) = x^alpha y^beta (1-x-y)^gamma."""

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive for a W-system, got {v}")

    def astuple(self):
        return (self.alpha, self.beta, self.gamma)


def as_params(p):
    return p if isinstance(p, ParamTriple) else ParamTriple(*map(float, p))


def dimension(M):
    """Number of basis functions with total degree <= M."""
    return (M + 1) * (M + 2) // 2


class LevelIndex(NamedTuple):
    n: int
    k: int

    @property
    def linear(self):
        return self.n * (self.n + 1) // 2 + self.k

    @classmethod
    def from_linear(cls, i):
        n = int((np.sqrt(8 * i + 1) - 1) // 2)
        # guard the float estimate at block boundaries
        while n * (n + 1) // 2 > i:
            n -= 1
        while (n + 1) * (n + 2) // 2 <= i:
            n += 1
        return cls(n, i - n * (n + 1) // 2)

    def check(self):
        if not (0 <= self.k <= self.n):
            raise ValueError(f"invalid level index {tuple(self)}")
        return self


def level_arrays(M):
    """Arrays (n, k) of length dimension(M) in level-major order."""
    n = np.repeat(np.arange(M + 1), np.arange(1, M + 2))
    k = np.concatenate([np.arange(m + 1) for m in range(M + 1)])
    return n, k


class TrianglePoint(NamedTuple):
    x: float
    y: float

    def inside(self, tol=SNAP_TOL):
        return in_triangle(self.x, self.y, tol=tol)

    def interior(self):
        return bool(self.x > 0 and self.y > 0 and self.x + self.y < 1)


def in_triangle(x, y, tol=SNAP_TOL):
    x, y = np.asarray(x, float), np.asarray(y, float)
    return (x >= -tol) & (y >= -tol) & (x + y <= 1 + tol)


def snap_to_triangle(x, y):
    """Clip points within SNAP_TOL of the boundary onto it; reject the rest."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    if not np.all(in_triangle(x, y)):
        bad = np.argwhere(~np.atleast_1d(in_triangle(x, y)))[0]
        raise ValueError(f"point outside the reference triangle at index {bad.tolist()}")
    x = np.clip(x, 0.0, 1.0)
    y = np.clip(y, 0.0, 1.0)
    excess = np.maximum(x + y - 1.0, 0.0)
    return x - 0.5 * excess, y - 0.5 * excess


def weight(p, x, y):
    p = as_params(p)
    x, y = snap_to_triangle(x, y)
    z = np.maximum(1.0 - x - y, 0.0)
    return x ** p.alpha * y ** p.beta * z ** p.gamma


def r_norm(n, k, p):
    """Normalising constant making p_{n,k} orthonormal under w on the triangle.

    Built from the [0, 1] norms of the two Jacobi factors.
    """
    p = as_params(p)
    LevelIndex(n, k).check()
    h1 = shifted_norm_h(n - k, p.beta + p.gamma + 2 * k + 1, p.alpha)
    h2 = shifted_norm_h(k, p.gamma, p.beta)
    return 1.0 / np.sqrt(h1 * h2)


def r_table(M, p):
    n, k = level_arrays(M)
    return np.array([r_norm(a, b, p) for a, b in zip(n, k)])


def _factor_tables(M, p, x, y):
    """Per-k Jacobi factors needed to evaluate every p_{n,k} with n <= M."""
    s = 1.0 - x
    v = 2.0 * y - s
    inner = homogeneous_jacobi_table(M, p.gamma, p.beta, v, s)  # (1-x)^k P_k(2y/(1-x)-1)
    outer = [jacobi_table(M - k, p.beta + p.gamma + 2 * k + 1, p.alpha, 2.0 * x - 1.0)
             for k in range(M + 1)]
    return inner, outer


def koornwinder_vandermonde(M, p, x, y):
    """Matrix of p_{n,k}(x_i, y_i), shape (npts, dimension(M))."""
    p = as_params(p)
    x, y = snap_to_triangle(np.atleast_1d(x), np.atleast_1d(y))
    inner, outer = _factor_tables(M, p, x, y)
    r = r_table(M, p)
    out = np.empty(x.shape + (dimension(M),))
    for n in range(M + 1):
        for k in range(n + 1):
            i = n * (n + 1) // 2 + k
            out[..., i] = r[i] * outer[k][n - k] * inner[k]
    return out


def wfun_vandermonde(M, p, x, y):
    p = as_params(p)
    x, y = snap_to_triangle(np.atleast_1d(x), np.atleast_1d(y))
    return np.sqrt(weight(p, x, y))[..., None] * koornwinder_vandermonde(M, p, x, y)


def koornwinder_eval(n, k, p, x, y):
    p = as_params(p)
    LevelIndex(n, k).check()
    x, y = snap_to_triangle(x, y)
    s = 1.0 - x
    inner = homogeneous_jacobi_table(k, p.gamma, p.beta, 2.0 * y - s, s)[k]
    outer = jacobi_table(n - k, p.beta + p.gamma + 2 * k + 1, p.alpha, 2.0 * x - 1.0)[n - k]
    val = r_norm(n, k, p) * outer * inner
    return val if np.ndim(val) else float(val)


def wfun_eval(n, k, p, x, y):
    val = np.sqrt(weight(p, x, y)) * koornwinder_eval(n, k, p, x, y)
    return val if np.ndim(val) else float(val)


def koornwinder_grad_vandermonde(M, p, x, y):
    """Partial derivatives (d/dx, d/dy) of every p_{n,k} at interior points."""
    p = as_params(p)
    x, y = np.atleast_1d(np.asarray(x, float)), np.atleast_1d(np.asarray(y, float))
    s = 1.0 - x
    t = y / s
    u = 2.0 * x - 1.0
    r = r_table(M, p)
    inner = jacobi_table(M, p.gamma, p.beta, 2.0 * t - 1.0)
    dinner = jacobi_deriv_table(M, p.gamma, p.beta, 2.0 * t - 1.0)
    gx = np.empty(x.shape + (dimension(M),))
    gy = np.empty_like(gx)
    for k in range(M + 1):
        a1 = p.beta + p.gamma + 2 * k + 1
        outer = jacobi_table(M - k, a1, p.alpha, u)
        douter = jacobi_deriv_table(M - k, a1, p.alpha, u)
        sk = s ** k
        skm1 = s ** (k - 1) if k >= 1 else np.zeros_like(s)
        for n in range(k, M + 1):
            i = n * (n + 1) // 2 + k
            A, dA = outer[n - k], douter[n - k]
            Bk, dBk = inner[k], dinner[k]
            gx[..., i] = r[i] * (2.0 * sk * dA * Bk + skm1 * A * (2.0 * t * dBk - k * Bk))
            gy[..., i] = r[i] * 2.0 * skm1 * A * dBk
    return gx, gy


def wfun_grad_vandermonde(M, p, x, y):
    """Partial derivatives of every phi_{n,k} at interior points."""
    p = as_params(p)
    x, y = np.atleast_1d(np.asarray(x, float)), np.atleast_1d(np.asarray(y, float))
    z = 1.0 - x - y
    sw = np.sqrt(x ** p.alpha * y ** p.beta * z ** p.gamma)[..., None]
    V = koornwinder_vandermonde(M, p, x, y)
    gx, gy = koornwinder_grad_vandermonde(M, p, x, y)
    # d sqrt(w) = sqrt(w) d(log w) / 2
    lx = (0.5 * (p.alpha / x - p.gamma / z))[..., None]
    ly = (0.5 * (p.beta / y - p.gamma / z))[..., None]
    return sw * (gx + lx * V), sw * (gy + ly * V)


class GeneralTriangle:
    """Non-degenerate triangle with the affine map onto the reference one.

    v0, v1, v2 go to (0,0), (1,0), (0,1) respectively.
    """

    def __init__(self, v0, v1, v2):
        self.v0, self.v1, self.v2 = (np.asarray(v, float) for v in (v0, v1, v2))
        self.jac = np.column_stack([self.v1 - self.v0, self.v2 - self.v0])
        det = np.linalg.det(self.jac)
        scale = max(np.abs(self.jac).max(), 1.0) ** 2
        if abs(det) <= 1e-14 * scale:
            raise ValueError("triangle vertices are collinear")
        self.det = det
        self._inv = np.linalg.inv(self.jac)

    def to_reference(self, q):
        q = np.asarray(q, float)
        return (q - self.v0) @ self._inv.T

    def from_reference(self, pt):
        pt = np.asarray(pt, float)
        return self.v0 + pt @ self.jac.T


def affine_to_reference(tri, q):
    return TrianglePoint(*tri.to_reference(q))
