"""Truncated differentiation matrices of the W-system and a quadrature oracle."""

from dataclasses import dataclass, field

import numpy as np

from .basis import ParamTriple, as_params, dimension, koornwinder_grad_vandermonde, \
    koornwinder_vandermonde, level_arrays, r_table
from .coupling import ItildeTable, build_itilde, i_diag_value, s_tilde_value, s_value
from .special_fn import gauss_jacobi01, shifted_norm_h


@dataclass
class DiffOperator:
    which: str
    M: int
    params: ParamTriple
    dense: np.ndarray
    _structured: object = field(default=None, repr=False)

    @property
    def D(self):
        return dimension(self.M)

    @property
    def structured(self):
        if self._structured is None:
            from .fast_apply import build_factors
            self._structured = build_factors(self.M, self.params)
        return self._structured

    def skew_residual(self):
        return float(np.abs(self.dense + self.dense.T).max()) if self.D else 0.0

    def apply(self, v, counter=None):
        from .fast_apply import apply_x, apply_y
        fn = apply_x if self.which == "X" else apply_y
        return fn(self.structured, v, counter)


def _pairs(M):
    n, k = level_arrays(M)
    lower = n[:, None] > n[None, :]
    return n, k, lower


def _coefficient_matrices(M, p):
    al, be, ga = p.astuple()
    S = np.array([[s_value(l, k, ga, be) for k in range(M + 1)] for l in range(M + 1)])
    St = np.array([[s_tilde_value(l, k, ga, be) for k in range(M + 1)] for l in range(M + 1)])
    return S, St


def _mirror(L):
    return L - L.T


def assemble_x(M, p, table=None):
    """Dense truncated X: strict lower blocks from the coupling integrals, mirrored."""
    p = as_params(p)
    table = table if table is not None else build_itilde(M, p)
    n, k, lower = _pairs(M)
    r = r_table(M, p)
    S, _ = _coefficient_matrices(M, p)
    It = table.values
    L = -p.gamma * S[k[:, None], k[None, :]] * It
    same_k = lower & (k[:, None] == k[None, :])
    rows, cols = np.nonzero(same_k)
    for i, j in zip(rows, cols):
        kk = k[i]
        L[i, j] += p.alpha * shifted_norm_h(kk, p.gamma, p.beta) * i_diag_value(n[i], n[j], kk, p)
    L = np.where(lower, 0.5 * r[:, None] * r[None, :] * L, 0.0)
    return DiffOperator("X", M, p, _mirror(L))


def assemble_y(M, p, table=None):
    p = as_params(p)
    table = table if table is not None else build_itilde(M, p)
    n, k, lower = _pairs(M)
    r = r_table(M, p)
    S, St = _coefficient_matrices(M, p)
    coef = p.beta * St - p.gamma * S
    if p.beta == p.gamma:
        # exact parity zeros
        par = (np.add.outer(np.arange(M + 1), np.arange(M + 1)) % 2) == 0
        coef[par] = 0.0
    L = coef[k[:, None], k[None, :]] * table.values
    L = np.where(lower, 0.5 * r[:, None] * r[None, :] * L, 0.0)
    return DiffOperator("Y", M, p, _mirror(L))


def oracle_assemble(which, M, p, nodes=None, mode="half_weight"):
    """Independent dense assembly by triangle quadrature.

    ``mode="half_weight"`` integrates (1/2) dw/dx p_{n,k} p_{m,l} for the
    strict lower blocks and mirrors; ``mode="galerkin"`` computes every
    entry <d phi_{n,k}/dx, phi_{m,l}> directly, which is skew only because
    the weight vanishes on the boundary.
    """
    if which not in ("X", "Y"):
        raise ValueError("which must be 'X' or 'Y'")
    p = as_params(p)
    al, be, ga = p.astuple()
    D = dimension(M)
    if M == 0 and mode == "half_weight":
        return np.zeros((1, 1))
    npts = nodes or M + 6
    if mode == "half_weight":
        if which == "X":
            xs, wx = gauss_jacobi01(npts, be + ga, al - 1)
            ts, wt = gauss_jacobi01(npts, ga - 1, be)
        else:
            xs, wx = gauss_jacobi01(npts, be + ga, al)
            ts, wt = gauss_jacobi01(npts, ga - 1, be - 1)
        X, T = np.meshgrid(xs, ts, indexing="ij")
        W = np.outer(wx, wt)
        if which == "X":
            W = W * (al * (1 - X) * (1 - T) - ga * X)
        else:
            W = W * (be * (1 - T) - ga * T)
        x, y, w = X.ravel(), ((1 - X) * T).ravel(), W.ravel()
        V = koornwinder_vandermonde(M, p, x, y)
        G = 0.5 * (V.T * w) @ V
        n, _ = level_arrays(M)
        L = np.where(n[:, None] > n[None, :], G, 0.0)
        return _mirror(L)
    if mode != "galerkin":
        raise ValueError(f"unknown mode {mode!r}")
    # one rule with every endpoint power lowered by one; the leftover
    # factors x(1-x) t(1-t) keep all three integrands polynomial
    xs, wx = gauss_jacobi01(npts + 2, be + ga, al - 1)
    ts, wt = gauss_jacobi01(npts + 2, ga - 1, be - 1)
    X, T = np.meshgrid(xs, ts, indexing="ij")
    x, t = X.ravel(), T.ravel()
    y = (1 - x) * t
    w0 = np.outer(wx, wt).ravel()
    full = w0 * x * (1 - x) * t * (1 - t)
    V = koornwinder_vandermonde(M, p, x, y)
    gx, gy = koornwinder_grad_vandermonde(M, p, x, y)
    if which == "X":
        G = gx
        half = 0.5 * w0 * (al * (1 - x) * t * (1 - t) - ga * x * t)
    else:
        G = gy
        half = 0.5 * w0 * (be * x * (1 - t) - ga * x * t)
    # entry [i, j] = <phi_i, d phi_j>
    return (V.T * half) @ V + (V.T * full) @ G


def write_coo(path, A, tol=0.0):
    """Plain-text coordinate export, one ``row col value`` line per nonzero."""
    A = np.asarray(A)
    rows, cols = np.nonzero(np.abs(A) > tol)
    with open(path, "w") as fh:
        for i, j in zip(rows, cols):
            fh.write(f"{i} {j} {A[i, j]:.17g}\n")


def read_coo(path, D):
    A = np.zeros((D, D))
    with open(path) as fh:
        for line in fh:
            if line.strip():
                i, j, v = line.split()
                A[int(i), int(j)] = float(v)
    return A
