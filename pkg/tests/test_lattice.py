import numpy as np
import pytest

from leblond import lattice as lt
from leblond.lattice import Grid


def test_second_order_weights():
    assert lt.central_weights(2) == {1: 0.5, -1: -0.5}


@pytest.mark.parametrize("order", [2, 4, 8, 24])
def test_weights_differentiate_polynomials_exactly(order):
    # a central stencil of order p is exact for x^q with q <= p
    w = lt.central_weights(order)
    for q in range(1, order + 1):
        terms = [wm * float(m) ** q for m, wm in w.items()]
        scale = sum(abs(t) for t in terms)
        assert sum(terms) == pytest.approx(1.0 if q == 1 else 0.0, abs=1e-13 * scale)


@pytest.mark.parametrize("kwargs", [dict(dims=2, n=8, half_width=1.0), dict(dims=1, n=1, half_width=1.0),
                                    dict(dims=1, n=8, half_width=-1.0), dict(dims=1, n=8, half_width=1.0,
                                                                             order=3),
                                    dict(dims=3, n=7, half_width=1.0), dict(dims=1, n=8, half_width=1.0,
                                                                            boundary="open"),
                                    dict(dims=1, n=8, half_width=1.0, order=8)])
def test_grid_validation(kwargs):
    with pytest.raises(ValueError):
        Grid(**kwargs)


def test_grid_coordinates():
    g = Grid(3, 4, 1.0)
    assert g.offset and not g.has_origin_node()
    assert np.allclose(g.coords(), [-0.75, -0.25, 0.25, 0.75])
    assert Grid(1, 4, 1.0).has_origin_node()


@pytest.mark.parametrize("grid", [Grid(1, 16, 2.0), Grid(1, 16, 2.0, boundary="periodic", order=4),
                                  Grid(3, 6, 1.0)])
def test_momentum_hermitian_and_sparse_matches_apply(grid):
    rng = np.random.default_rng(0)
    for axis in range(grid.dims):
        p = lt.momentum_op(grid, axis)
        assert lt.hermiticity_deviation(p) <= 1e-14
        v = rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)
        assert np.allclose(p.to_sparse() @ v.ravel(), p.apply(v).ravel())


def test_adjoint_of_product_reverses_order():
    g = Grid(1, 12, 1.0)
    x, p = lt.position_op(g, 0), lt.momentum_op(g, 0)
    op = lt.compose(x, p) + lt.Scaled(2j, x)
    assert np.allclose(op.adjoint().to_sparse().toarray(), op.to_sparse().toarray().conj().T)


def test_fd_symbol():
    g = Grid(1, 32, 4.0, boundary="periodic")
    p = lt.momentum_op(g, 0)
    k = 2 * np.pi * 3 / (2 * g.half_width)
    assert p.fd_symbol(k) == pytest.approx(np.sin(k * g.spacing) / g.spacing)
    wave = np.exp(1j * k * g.coords())
    assert np.allclose(p.apply(wave), p.fd_symbol(k) * wave)


def test_canonical_commutator_on_smooth_field():
    g = Grid(1, 400, 10.0, order=8)
    x = g.coords()
    f = np.exp(-x ** 2)
    c = lt.commutator(lt.position_op(g, 0), lt.momentum_op(g, 0))
    assert np.max(np.abs(c.apply(f) - 1j * f)) < 1e-8


def test_angular_momentum_algebra_on_smooth_field():
    g = Grid(3, 40, 6.0, order=8)
    x, y, z = g.mesh()
    f = (x + 2j * y - z ** 2) * np.exp(-(x ** 2 + y ** 2 + z ** 2) / 2)
    lx, ly, lz = (lt.angular_momentum_op(g, a) for a in range(3))
    lhs = lt.commutator(lx, ly).apply(f)
    rhs = 1j * lz.apply(f)
    # truncation error only; a wrong sign or index would be O(1)
    assert np.max(np.abs(lhs - rhs)) < 1e-3 * np.max(np.abs(rhs))


def test_angular_momentum_needs_3d():
    with pytest.raises(ValueError):
        lt.angular_momentum_op(Grid(1, 8, 1.0), 0)


def test_grid_mismatch():
    with pytest.raises(lt.GridMismatchError):
        lt.compose(lt.momentum_op(Grid(1, 8, 1.0), 0), lt.momentum_op(Grid(1, 10, 1.0), 0))


def test_singular_profile_needs_offset_grid():
    with pytest.raises(ValueError, match="origin"):
        lt.radial_function_op(Grid(3, 8, 1.0, offset=False), "1/r")
    d = lt.radial_function_op(Grid(3, 8, 1.0), "1/r")
    assert np.all(np.isfinite(d.values))


def test_unknown_profile():
    with pytest.raises(ValueError):
        lt.radial_profile("exp")


def test_spin_kron_acts_on_components():
    g = Grid(1, 8, 1.0)
    sx = np.array([[0, 1], [1, 0]])
    op = lt.SpinKron(sx, lt.Identity(g))
    v = np.stack([np.ones(8), np.zeros(8)])
    assert np.allclose(op.apply(v), v[::-1])


def test_spinor_field():
    g = Grid(1, 8, 1.0)
    f = lt.SpinorField.zeros(g)
    f.components[0, 3] = 1.0
    assert f.norm() == pytest.approx(np.sqrt(g.spacing))
    out = lt.apply(lt.SpinKron(np.eye(2), lt.momentum_op(g, 0)), f)
    assert isinstance(out, lt.SpinorField)
    with pytest.raises(ValueError):
        lt.SpinorField(g, np.zeros((3, 8)))
    with pytest.raises(lt.GridMismatchError):
        lt.apply(lt.SpinKron(np.eye(2), lt.momentum_op(Grid(1, 10, 1.0), 0)), f)
