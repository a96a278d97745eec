"""Transfinite lift of Dirichlet data on the reference triangle.

The lift averages three chordwise linear interpolants (one per edge
direction) and removes the doubly counted linear part, so it matches the
trace on every edge and reproduces affine functions.
"""

from dataclasses import dataclass, field

import numpy as np

from .basis import snap_to_triangle

EPS = 1e-10
VERTEX_TOL = 1e-12


@dataclass
class BoundaryTrace:
    """Dirichlet data as three edge callables of the fraction s in [0, 1].

    bottom(s) = mu(s, 0), hyp(s) = mu(1-s, s), left(s) = mu(0, 1-s); the
    edges are traversed counter-clockwise so that consecutive edges share
    their end/start vertex.
    """

    bottom: callable
    hyp: callable
    left: callable
    vertices: tuple = field(init=False)

    def __post_init__(self):
        pairs = [(self.bottom(0.0), self.left(1.0)),
                 (self.bottom(1.0), self.hyp(0.0)),
                 (self.hyp(1.0), self.left(0.0))]
        for name, (a, b) in zip(("(0,0)", "(1,0)", "(0,1)"), pairs):
            a, b = float(a), float(b)
            if abs(a - b) > VERTEX_TOL * max(1.0, abs(a), abs(b)):
                raise ValueError(f"trace is inconsistent at vertex {name}: {a!r} vs {b!r}")
        self.vertices = tuple(float(a) for a, _ in pairs)

    @classmethod
    def from_function(cls, g):
        return cls(lambda s: g(s, 0.0 * s), lambda s: g(1.0 - s, s), lambda s: g(0.0 * s, 1.0 - s))

    def _call(self, fn, s):
        return np.broadcast_to(np.asarray(fn(s), dtype=float), np.shape(s)).astype(float)

    def at_boundary(self, x, y):
        """Trace value at boundary points, choosing the nearest edge."""
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        d = np.stack([np.abs(y), np.abs(1 - x - y) / np.sqrt(2), np.abs(x)])
        edge = np.argmin(d, axis=0)
        out = np.empty(x.shape)
        for e, fn, s in ((0, self.bottom, x), (1, self.hyp, y), (2, self.left, 1 - y)):
            sel = edge == e
            if np.any(sel):
                out[sel] = self._call(fn, np.clip(s[sel], 0.0, 1.0))
        return out


def edge_interpolants(tr, x, y):
    """(qA, qB, qC) at strictly interior points."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    z = 1 - x - y
    s = x + y
    qA = z / (1 - y) * tr._call(tr.left, 1 - y) + x / (1 - y) * tr._call(tr.hyp, y)
    qB = z / (1 - x) * tr._call(tr.bottom, x) + y / (1 - x) * tr._call(tr.hyp, 1 - x)
    qC = x / s * tr._call(tr.bottom, s) + y / s * tr._call(tr.left, 1 - s)
    return qA, qB, qC


def lift_mu(tr, x, y):
    """Transfinite interpolant of ``tr`` at points of the triangle."""
    scalar = np.ndim(x) == 0 and np.ndim(y) == 0
    x, y = snap_to_triangle(np.atleast_1d(x), np.atleast_1d(y))
    x, y = np.broadcast_arrays(x, y)
    m00, m10, m01 = tr.vertices
    out = np.empty(x.shape)
    vdist = np.stack([np.hypot(x, y), np.hypot(x - 1, y), np.hypot(x, y - 1)])
    near_v = vdist.min(axis=0) < EPS
    near_e = ~near_v & (np.minimum(np.minimum(x, y), (1 - x - y) / np.sqrt(2)) < EPS)
    inner = ~(near_v | near_e)
    if near_v.any():
        out[near_v] = np.array([m00, m10, m01])[np.argmin(vdist[:, near_v], axis=0)]
    if near_e.any():
        xe, ye = x[near_e], y[near_e]
        # orthogonal projection onto the nearest edge
        d = np.stack([ye, (1 - xe - ye) / np.sqrt(2), xe])
        edge = np.argmin(d, axis=0)
        px = np.where(edge == 0, xe, np.where(edge == 2, 0.0, xe + 0.5 * (1 - xe - ye)))
        py = np.where(edge == 0, 0.0, np.where(edge == 2, ye, ye + 0.5 * (1 - xe - ye)))
        out[near_e] = tr.at_boundary(px, py)
    if inner.any():
        xi, yi = x[inner], y[inner]
        qA, qB, qC = edge_interpolants(tr, xi, yi)
        lin = (1 - xi - yi) * m00 + xi * m10 + yi * m01
        out[inner] = 0.5 * (qA + qB + qC) - 0.5 * lin
    return float(out[0]) if scalar else out


def zero_bc_reduction(f, tr):
    """The field f - lift_mu(tr, .), which vanishes on the boundary when f has trace tr."""
    def g(x, y):
        return np.asarray(f(x, y), float) - lift_mu(tr, x, y)
    return g
