import numpy as np
import pytest

from trispectral.approx import convergence_table, tail_decay_rate
from trispectral.boundary_lift import BoundaryTrace, edge_interpolants, lift_mu, zero_bc_reduction


def boundary_samples(n, rng):
    s = rng.uniform(0, 1, n)
    e = rng.integers(0, 3, n)
    x = np.where(e == 0, s, np.where(e == 1, 1 - s, 0.0))
    y = np.where(e == 0, 0.0, np.where(e == 1, s, 1 - s))
    return x, y


def random_trace(rng):
    a, b, c, d, e = rng.uniform(-2, 2, 5)
    return lambda x, y: a * np.sin(b * x + c * y) + d * np.exp(e * x * y) + x ** 3


def test_trace_vertex_check():
    with pytest.raises(ValueError, match="vertex"):
        BoundaryTrace(lambda s: s, lambda s: 0 * s, lambda s: 1 - s)
    tr = BoundaryTrace.from_function(lambda x, y: 1 + x + 2 * y)
    assert tr.vertices == (1.0, 2.0, 3.0)


def test_interpolants_constant_and_linear():
    pts = np.array([[0.2, 0.3], [0.6, 0.1], [0.1, 0.1]])
    one = BoundaryTrace.from_function(lambda x, y: 1.0 + 0 * x)
    for q in edge_interpolants(one, pts[:, 0], pts[:, 1]):
        np.testing.assert_allclose(q, 1.0, rtol=0, atol=1e-15)
    g = lambda x, y: 0.5 - 2 * x + 3 * y
    lin = BoundaryTrace.from_function(g)
    for q in edge_interpolants(lin, pts[:, 0], pts[:, 1]):
        np.testing.assert_allclose(q, g(pts[:, 0], pts[:, 1]), rtol=0, atol=1e-14)


def test_interpolant_example():
    tr = BoundaryTrace.from_function(lambda x, y: x ** 2)
    _, _, qC = edge_interpolants(tr, 0.25, 0.25)
    assert qC == pytest.approx(1 / 8, abs=1e-16)


@pytest.mark.parametrize("c", [0.0, -3.5, 7.25])
def test_constant_lift(c, rng):
    tr = BoundaryTrace.from_function(lambda x, y: c + 0 * x)
    pts = rng.dirichlet([1, 1, 1], 200)[:, :2]
    np.testing.assert_allclose(lift_mu(tr, pts[:, 0], pts[:, 1]), c, rtol=0, atol=1e-14)


def test_affine_exactness(rng):
    for _ in range(5):
        a, b, c = rng.uniform(-3, 3, 3)
        g = lambda x, y: a + b * x + c * y
        tr = BoundaryTrace.from_function(g)
        pts = rng.dirichlet([1, 1, 1], 500)[:, :2]
        x, y = pts[:, 0], pts[:, 1]
        assert np.abs(lift_mu(tr, x, y) - g(x, y)).max() <= 1e-14 * max(1, abs(a) + abs(b) + abs(c))


def test_boundary_reproduction(rng):
    for _ in range(5):
        g = random_trace(rng)
        tr = BoundaryTrace.from_function(g)
        x, y = boundary_samples(1000, rng)
        assert np.abs(lift_mu(tr, x, y) - g(x, y)).max() <= 1e-12


def test_near_boundary_and_vertices():
    g = lambda x, y: np.cos(x) + y ** 2
    tr = BoundaryTrace.from_function(g)
    assert lift_mu(tr, 1e-12, 1e-12) == g(0, 0)
    assert lift_mu(tr, 0.4, 1e-13) == pytest.approx(g(0.4, 0.0), abs=1e-12)
    assert lift_mu(tr, 1 - 1e-11, 0.0) == g(1, 0)


def test_sin_trace_interior():
    # trace sin(pi x) on the bottom edge, zero elsewhere (consistent at vertices)
    tr = BoundaryTrace(lambda s: np.sin(np.pi * s), lambda s: 0 * s, lambda s: 0 * s)
    s = np.linspace(0, 1, 100)
    assert np.abs(lift_mu(tr, s, 0 * s) - np.sin(np.pi * s)).max() <= 1e-12
    assert np.abs(lift_mu(tr, 1 - s, s)).max() <= 1e-12
    x, y = 0.3, 0.3
    ref = (0.5 * (1 - x - y) / (1 - x) * np.sin(np.pi * x) + 0.5 * x / (x + y) * np.sin(np.pi * (x + y)))
    assert lift_mu(tr, x, y) == pytest.approx(ref, rel=1e-14)


def test_vertex_continuity():
    g = lambda x, y: np.sin(3 * x) * np.cos(2 * y) + x * y ** 2
    tr = BoundaryTrace.from_function(g)
    th = np.linspace(0.01, np.pi / 2 - 0.01, 10)
    errs = []
    for r in (1e-4, 1e-6, 1e-9):
        errs.append(np.abs(lift_mu(tr, r * np.cos(th), r * np.sin(th)) - g(0, 0)).max())
    # the lift is Lipschitz, so the gap shrinks linearly with the distance
    assert errs[2] <= 1e-8
    assert errs[1] <= 10 * 1e-6 and errs[0] <= 10 * 1e-4


def test_zero_bc_reduction(rng):
    g = random_trace(rng)
    tr = BoundaryTrace.from_function(g)
    h = zero_bc_reduction(lambda x, y: lift_mu(tr, x, y), tr)
    pts = rng.dirichlet([1, 1, 1], 100)[:, :2]
    assert np.abs(h(pts[:, 0], pts[:, 1])).max() <= 1e-15
    f = lambda x, y: g(x, y) + x * y * (1 - x - y) * np.exp(x)
    v = zero_bc_reduction(f, tr)
    x, y = boundary_samples(300, rng)
    assert np.abs(v(x, y)).max() <= 1e-12


def test_reduced_field_expands():
    g = lambda x, y: np.exp(x) * np.cos(2 * y)
    tr = BoundaryTrace.from_function(g)
    f = lambda x, y: g(x, y) + x * y * (1 - x - y) * np.sin(x + y)
    table, _ = convergence_table(zero_bc_reduction(f, tr), (1, 1, 1), 8)
    # the lift is only Lipschitz, so decay is algebraic; frozen from our own run
    assert table[-1, 3] < table[0, 3] / 10
    assert tail_decay_rate(table[:, 1]) < 1.0
