"""Triangle quadrature, W-system expansions and discrete error diagnostics."""

import csv
from dataclasses import dataclass

import numpy as np

from .basis import ParamTriple, as_params, dimension, koornwinder_vandermonde, \
    snap_to_triangle, weight, wfun_vandermonde
from .fast_apply import CoeffVector

BASES = ("w", "poly")


@dataclass
class TriangleQuadrature:
    x: np.ndarray
    y: np.ndarray
    weights: np.ndarray
    order: int

    @property
    def nodes(self):
        return np.column_stack([self.x, self.y])

    def integrate(self, values):
        return float(np.sum(self.weights * values))


def duffy_quadrature(n1, n2=None):
    """Tensor Gauss-Legendre on the (x, t) square, mapped by y = (1-x) t."""
    n2 = n1 if n2 is None else n2
    if n1 < 1 or n2 < 1:
        raise ValueError("node counts must be positive")
    u1, w1 = np.polynomial.legendre.leggauss(n1)
    u2, w2 = np.polynomial.legendre.leggauss(n2)
    xs, wx = 0.5 * (u1 + 1), 0.5 * w1
    ts, wt = 0.5 * (u2 + 1), 0.5 * w2
    X, T = np.meshgrid(xs, ts, indexing="ij")
    W = np.outer(wx * (1 - xs), wt)
    return TriangleQuadrature(X.ravel(), ((1 - X) * T).ravel(), W.ravel(),
                              min(2 * n1 - 2, 2 * n2 - 1))


@dataclass
class ExpansionResult:
    coeffs: CoeffVector
    params: ParamTriple
    nmax: int
    basis: str = "w"

    def __post_init__(self):
        if len(self.coeffs) != dimension(self.nmax):
            raise ValueError("coefficient length does not match nmax")


def _basis_matrix(basis, nmax, p, x, y):
    if basis == "w":
        return wfun_vandermonde(nmax, p, x, y)
    if basis == "poly":
        return koornwinder_vandermonde(nmax, p, x, y)
    raise ValueError(f"unknown basis {basis!r}")


def _eval_field(f, x, y):
    vals = np.broadcast_to(np.asarray(f(x, y), dtype=float), x.shape)
    bad = ~np.isfinite(vals)
    if bad.any():
        i = int(np.argmax(bad))
        raise ValueError(f"non-finite value {vals[i]} at node {i} ({x[i]!r}, {y[i]!r})")
    return vals


def expand(f, nmax, p, quad=None, basis="w"):
    """Coefficients <f, phi_{n,k}> (or <f, p_{n,k}>_w for ``basis="poly"``).

    ``f`` takes coordinate arrays. Sums over nodes use numpy's pairwise
    reduction along a contiguous axis, so results do not depend on threading.
    """
    p = as_params(p)
    quad = quad if quad is not None else duffy_quadrature(64, 64)
    vals = _eval_field(f, quad.x, quad.y)
    wts = quad.weights * vals
    if basis == "poly":
        wts = wts * weight(p, quad.x, quad.y)
    B = _basis_matrix(basis, nmax, p, quad.x, quad.y)
    c = np.ascontiguousarray(B.T * wts).sum(axis=1)
    return ExpansionResult(CoeffVector(nmax, c), p, nmax, basis)


def evaluate_series(res, x, y, count=None):
    """Partial sum over the first ``count`` coefficients (all by default)."""
    xs, ys = snap_to_triangle(np.atleast_1d(x), np.atleast_1d(y))
    B = _basis_matrix(res.basis, res.nmax, res.params, xs, ys)
    c = res.coeffs.data[:count] if count is not None else res.coeffs.data
    out = B[:, :len(c)] @ c
    return out if np.ndim(x) else float(out[0])


def cosine_grid(M):
    """Points (x_i, y_j), x_i = (1 - cos(i pi / M)) / 2, with j <= M - i."""
    if M < 1:
        raise ValueError("grid parameter must be at least 1")
    c = 0.5 * (1 - np.cos(np.arange(M + 1) * np.pi / M))
    pts = [(c[i], c[j]) for i in range(M + 1) for j in range(M + 1 - i)]
    x, y = np.array(pts).T
    return snap_to_triangle(x, y)


@dataclass
class ErrorReport:
    e_inf: float
    e_2: float
    M_grid: int
    table: np.ndarray  # columns x, y, error


def error_report(f, res, M_grid=4, count=None):
    x, y = cosine_grid(M_grid)
    err = np.asarray(f(x, y), float) - evaluate_series(res, x, y, count)
    return ErrorReport(float(np.max(np.abs(err))), float(np.sqrt(np.sum(err ** 2))),
                       M_grid, np.column_stack([x, y, err]))


def convergence_table(f, p, nmax, M_grid=4, quad=None, basis="w"):
    """Rows (N, |f_N|, e_inf(N), e_2(N)) for every prefix length N.

    Returns the table and the expansion it was built from.
    """
    res = expand(f, nmax, p, quad, basis)
    x, y = cosine_grid(M_grid)
    B = _basis_matrix(basis, nmax, res.params, x, y)
    c = res.coeffs.data
    partial = np.cumsum(B * c, axis=1)
    err = np.asarray(f(x, y), float)[:, None] - partial
    N = np.arange(1, len(c) + 1)
    table = np.column_stack([N, np.abs(c), np.abs(err).max(axis=0), np.sqrt((err ** 2).sum(axis=0))])
    return table, res


def write_convergence_csv(path_or_file, table):
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["N", "coef_abs", "e_inf", "e_2"])
        for row in table:
            w.writerow([int(row[0])] + [f"{v:.17g}" for v in row[1:]])
    finally:
        if own:
            fh.close()


def tail_decay_rate(coef_abs, tail=15):
    """Per-index geometric ratio fitted to the tail envelope of |f_N|.

    The envelope is the running maximum taken from the end, which removes
    the within-level oscillation; the ratio is exp(slope) of a least-squares
    line through log(envelope) over the last ``tail`` indices. Values near 1
    mean algebraic (non-spectral) decay.
    """
    a = np.asarray(coef_abs, float)
    env = np.maximum.accumulate(a[::-1])[::-1][-tail:]
    env = np.maximum(env, np.finfo(float).tiny)
    slope = np.polyfit(np.arange(len(env)), np.log(env), 1)[0]
    return float(np.exp(slope))


def ex1_sqrt(x, y):
    z = np.maximum(1 - x - y, 0.0)
    return np.exp(x - 2 * y) * np.sqrt(np.maximum(x, 0) * np.maximum(y, 0) * z)


def ex3_sine(x, y):
    return x * (1 - np.exp(y)) * np.sin(np.pi * (1 - x - y))


TEST_FUNCTIONS = {"ex1_sqrt": ex1_sqrt, "ex3_sine": ex3_sine}
