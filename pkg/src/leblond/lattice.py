"""Finite-difference operators on 1D and 3D lattices.

Operators are small expression trees (sums, products, scalings of stencils,
diagonals and spin-matrix tensor factors). They apply matrix-free, take exact
discrete adjoints, and assemble to ``scipy.sparse`` when a matrix is needed.

Fields are ndarrays whose trailing ``grid.dims`` axes are the lattice; scalar
lattice operators act componentwise on any leading axes, spin operators mix
the leading component axis.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import factorial
from typing import Callable

import numpy as np
import scipy.sparse as sp
from scipy.ndimage import correlate1d

from .clifford import levi_civita

BOUNDARIES = ("dirichlet", "periodic")
RADIAL_PROFILES = ("1/r", "1/r^2", "r", "r^2")
SINGULAR_PROFILES = ("1/r", "1/r^2")


class GridMismatchError(ValueError):
    pass


class SpatiallyVaryingError(ValueError):
    """Raised when a momentum-space symbol is requested for a non-constant coefficient."""


@dataclass(frozen=True)
class Grid:
    """Uniform lattice on [-L, L]^dims with spacing 2L/n.

    Offset grids put nodes at -L + (j + 1/2)h (no node at the origin for even n);
    plain grids at -L + j h. ``order`` is the accuracy order of the central
    first-derivative stencil (2 = nearest neighbours).
    """

    dims: int
    n: int
    half_width: float
    offset: bool | None = None
    boundary: str = "dirichlet"
    order: int = 2

    def __post_init__(self):
        if self.dims not in (1, 3):
            raise ValueError(f"dims must be 1 or 3, got {self.dims}")
        if self.offset is None:
            object.__setattr__(self, "offset", self.dims == 3)
        if self.n < 2 or self.half_width <= 0:
            raise ValueError("need n >= 2 and half_width > 0")
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"boundary must be one of {BOUNDARIES}")
        if self.order < 2 or self.order % 2:
            raise ValueError("stencil order must be a positive even integer")
        if self.n <= self.order:
            raise ValueError(f"n={self.n} too small for a stencil of order {self.order}")
        if self.offset and self.n % 2:
            raise ValueError("offset grids need an even number of points per axis")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.n

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.dims

    @property
    def size(self) -> int:
        return self.n ** self.dims

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.dims

    def coords(self) -> np.ndarray:
        shift = 0.5 if self.offset else 0.0
        return -self.half_width + (np.arange(self.n) + shift) * self.spacing

    def mesh(self) -> list:
        """Broadcastable coordinate arrays, one per axis."""
        x = self.coords()
        return np.meshgrid(*([x] * self.dims), indexing="ij", sparse=True)

    def radius(self) -> np.ndarray:
        return np.sqrt(sum(c ** 2 for c in self.mesh())) * np.ones(self.shape)

    def has_origin_node(self) -> bool:
        return bool(np.any(np.isclose(self.coords(), 0.0, atol=1e-12 * self.spacing)))


def central_weights(order: int) -> dict:
    """Weights w_m of f'(x) ~ sum_m w_m f(x + m h) / h for the central stencil of given order."""
    m_max = order // 2
    out = {}
    for m in range(1, m_max + 1):
        w = Fraction((-1) ** (m + 1) * factorial(m_max) ** 2,
                     m * factorial(m_max - m) * factorial(m_max + m))
        out[m] = float(w)
        out[-m] = -float(w)
    return out


def _ncomp(*ops) -> int | None:
    found = {op.ncomp for op in ops if op.ncomp is not None}
    if len(found) > 1:
        raise ValueError(f"component-count mismatch: {sorted(found)}")
    return found.pop() if found else None


def _same_grid(*ops) -> Grid:
    grids = {op.grid for op in ops}
    if len(grids) != 1:
        raise GridMismatchError("operators live on different grids")
    return grids.pop()


def _as_symbol_matrix(s, size: int) -> np.ndarray:
    return s if isinstance(s, np.ndarray) else s * np.eye(size, dtype=complex)


class Operator:
    """Base class; subclasses implement ``apply``, ``adjoint``, ``to_sparse`` and ``symbol``."""

    grid: Grid
    ncomp: int | None = None
    hermitian_hint: bool = False

    def apply(self, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def adjoint(self) -> "Operator":
        raise NotImplementedError

    def _lattice_sparse(self) -> sp.spmatrix:
        raise NotImplementedError

    def to_sparse(self, ncomp: int | None = None) -> sp.csr_matrix:
        nc = self.ncomp or ncomp or 1
        lat = self._lattice_sparse()
        if nc == 1:
            return sp.csr_matrix(lat)
        return sp.csr_matrix(sp.kron(sp.identity(nc), lat))

    def symbol(self, k):
        raise SpatiallyVaryingError(f"{type(self).__name__} has no constant-coefficient symbol")

    @property
    def H(self) -> "Operator":
        return self.adjoint()

    def __matmul__(self, other):
        if isinstance(other, Operator):
            return compose(self, other)
        return self.apply(np.asarray(other))

    def __add__(self, other):
        return Sum([self, other])

    def __sub__(self, other):
        return Sum([self, Scaled(-1.0, other)])

    def __neg__(self):
        return Scaled(-1.0, self)

    def __mul__(self, c):
        return Scaled(c, self)

    __rmul__ = __mul__


class Identity(Operator):
    hermitian_hint = True

    def __init__(self, grid: Grid):
        self.grid = grid

    def apply(self, v):
        return np.array(v, dtype=complex, copy=True)

    def adjoint(self):
        return self

    def _lattice_sparse(self):
        return sp.identity(self.grid.size, dtype=complex, format="csr")

    def symbol(self, k):
        return 1.0 + 0j


class Diagonal(Operator):
    """Multiplication by a lattice function."""

    def __init__(self, grid: Grid, values, hermitian: bool | None = None):
        self.grid = grid
        values = np.broadcast_to(np.asarray(values), grid.shape)
        self.values = np.array(values, dtype=complex)
        self.hermitian_hint = bool(np.all(self.values.imag == 0)) if hermitian is None else hermitian

    def apply(self, v):
        return self.values * v

    def adjoint(self):
        return Diagonal(self.grid, self.values.conj())

    def _lattice_sparse(self):
        return sp.diags(self.values.ravel(), format="csr")

    def symbol(self, k):
        flat = self.values.ravel()
        if np.any(flat != flat[0]):
            raise SpatiallyVaryingError("coefficient varies in space")
        return complex(flat[0])


class Stencil(Operator):
    """Translation-invariant difference operator along one axis: (S f)_j = sum_o w_o f_{j+o}."""

    def __init__(self, grid: Grid, axis: int, weights: dict):
        if not 0 <= axis < grid.dims:
            raise ValueError(f"axis {axis} out of range for a {grid.dims}D grid")
        self.grid = grid
        self.axis = axis
        self.weights = {int(o): complex(w) for o, w in weights.items() if w != 0}
        self.reach = max((abs(o) for o in self.weights), default=0)
        if grid.boundary == "periodic" and 2 * self.reach >= grid.n:
            raise ValueError("periodic stencil wider than the lattice")

    def _kernel(self):
        ker = np.zeros(2 * self.reach + 1, dtype=complex)
        for o, w in self.weights.items():
            ker[self.reach + o] = w
        return ker

    def apply(self, v):
        v = np.asarray(v)
        ax = v.ndim - self.grid.dims + self.axis
        mode = "wrap" if self.grid.boundary == "periodic" else "constant"
        ker = self._kernel()
        kr, ki = ker.real, ker.imag

        def corr(x, w):
            return correlate1d(x, w, axis=ax, mode=mode, cval=0.0)

        out = np.zeros(v.shape, dtype=complex)
        if np.any(kr):
            out += corr(v.real, kr) + 1j * corr(v.imag, kr)
        if np.any(ki):
            out += 1j * corr(v.real, ki) - corr(v.imag, ki)
        return out

    def adjoint(self):
        return Stencil(self.grid, self.axis, {-o: np.conj(w) for o, w in self.weights.items()})

    def _matrix_1d(self):
        n = self.grid.n
        rows, cols, vals = [], [], []
        idx = np.arange(n)
        for o, w in self.weights.items():
            j = idx + o
            if self.grid.boundary == "periodic":
                rows.append(idx)
                cols.append(j % n)
            else:
                keep = (j >= 0) & (j < n)
                rows.append(idx[keep])
                cols.append(j[keep])
            vals.append(np.full(len(rows[-1]), w))
        return sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                             shape=(n, n)).tocsr()

    def _lattice_sparse(self):
        n, d, a = self.grid.n, self.grid.dims, self.axis
        mats = [sp.identity(n ** a), self._matrix_1d(), sp.identity(n ** (d - a - 1))]
        return reduce(sp.kron, mats).tocsr()


class Momentum(Stencil):
    """P_axis = -i d/dx_axis by the grid's central difference; Hermitian by construction."""

    hermitian_hint = True

    def __init__(self, grid: Grid, axis: int):
        h = grid.spacing
        super().__init__(grid, axis, {o: -1j * w / h for o, w in central_weights(grid.order).items()})

    def adjoint(self):
        return self

    def symbol(self, k):
        return complex(np.asarray(k, dtype=float).reshape(-1)[self.axis])

    def fd_symbol(self, k: float) -> float:
        """Eigenvalue on the plane wave exp(i k x) of an unbounded/periodic lattice."""
        h = self.grid.spacing
        return float(sum((w * np.exp(1j * o * k * h)).real for o, w in self.weights.items()))


class Scaled(Operator):
    def __init__(self, c, op: Operator):
        self.c = complex(c)
        self.op = op
        self.grid = op.grid
        self.ncomp = op.ncomp
        self.hermitian_hint = op.hermitian_hint and self.c.imag == 0

    def apply(self, v):
        return self.c * self.op.apply(v)

    def adjoint(self):
        return Scaled(np.conj(self.c), self.op.adjoint())

    def to_sparse(self, ncomp=None):
        return self.c * self.op.to_sparse(self.ncomp or ncomp)

    def _lattice_sparse(self):
        return self.c * self.op._lattice_sparse()

    def symbol(self, k):
        return self.c * self.op.symbol(k)


class Sum(Operator):
    def __init__(self, terms):
        flat = []
        for t in terms:
            flat.extend(t.terms if isinstance(t, Sum) else [t])
        if not flat:
            raise ValueError("empty sum")
        self.terms = flat
        self.grid = _same_grid(*flat)
        self.ncomp = _ncomp(*flat)
        self.hermitian_hint = all(t.hermitian_hint for t in flat)

    def apply(self, v):
        return sum(t.apply(v) for t in self.terms)

    def adjoint(self):
        return Sum([t.adjoint() for t in self.terms])

    def to_sparse(self, ncomp=None):
        nc = self.ncomp or ncomp
        return sp.csr_matrix(sum(t.to_sparse(nc) for t in self.terms))

    def _lattice_sparse(self):
        return sum(t._lattice_sparse() for t in self.terms)

    def symbol(self, k):
        parts = [t.symbol(k) for t in self.terms]
        size = next((p.shape[0] for p in parts if isinstance(p, np.ndarray)), None)
        if size is None:
            return sum(parts)
        return sum(_as_symbol_matrix(p, size) for p in parts)


class Product(Operator):
    """Composition; ``factors[0]`` is applied last."""

    def __init__(self, factors):
        flat = []
        for f in factors:
            flat.extend(f.factors if isinstance(f, Product) else [f])
        self.factors = flat
        self.grid = _same_grid(*flat)
        self.ncomp = _ncomp(*flat)

    def apply(self, v):
        for f in reversed(self.factors):
            v = f.apply(v)
        return v

    def adjoint(self):
        return Product([f.adjoint() for f in reversed(self.factors)])

    def to_sparse(self, ncomp=None):
        nc = self.ncomp or ncomp
        return sp.csr_matrix(reduce(lambda a, b: a @ b, [f.to_sparse(nc) for f in self.factors]))

    def _lattice_sparse(self):
        return reduce(lambda a, b: a @ b, [f._lattice_sparse() for f in self.factors])

    def symbol(self, k):
        parts = [f.symbol(k) for f in self.factors]
        size = next((p.shape[0] for p in parts if isinstance(p, np.ndarray)), None)
        if size is None:
            return reduce(lambda a, b: a * b, parts)
        return reduce(lambda a, b: a @ b, [_as_symbol_matrix(p, size) for p in parts])


class SpinKron(Operator):
    """Spin matrix (ncomp x ncomp) tensored with a scalar lattice operator."""

    def __init__(self, matrix, op: Operator):
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("spin factor must be a square matrix")
        if op.ncomp is not None:
            raise ValueError("lattice factor must be a scalar lattice operator")
        self.matrix = m
        self.op = op
        self.grid = op.grid
        self.ncomp = m.shape[0]
        self.hermitian_hint = op.hermitian_hint and np.allclose(m, m.conj().T, atol=0)

    def apply(self, v):
        v = np.asarray(v)
        if v.shape[0] != self.ncomp:
            raise ValueError(f"expected {self.ncomp} components, got {v.shape[0]}")
        w = self.op.apply(v)
        return np.tensordot(self.matrix, w, axes=(1, 0))

    def adjoint(self):
        return SpinKron(self.matrix.conj().T, self.op.adjoint())

    def to_sparse(self, ncomp=None):
        return sp.csr_matrix(sp.kron(sp.csr_matrix(self.matrix), self.op._lattice_sparse()))

    def symbol(self, k):
        s = self.op.symbol(k)
        if isinstance(s, np.ndarray):
            raise ValueError("lattice factor of a spin term must have a scalar symbol")
        return self.matrix * s


class BlockDiagonal(Operator):
    """diag(op_1, op_2, ...) acting on the stacked component axis."""

    def __init__(self, ops):
        self.ops = list(ops)
        self.grid = _same_grid(*self.ops)
        if any(op.ncomp is None for op in self.ops):
            raise ValueError("block entries must declare their component count")
        self.sizes = [op.ncomp for op in self.ops]
        self.ncomp = sum(self.sizes)
        self.hermitian_hint = all(op.hermitian_hint for op in self.ops)

    def apply(self, v):
        v = np.asarray(v)
        out, start = [], 0
        for op, size in zip(self.ops, self.sizes):
            out.append(op.apply(v[start:start + size]))
            start += size
        return np.concatenate(out, axis=0)

    def adjoint(self):
        return BlockDiagonal([op.adjoint() for op in self.ops])

    def to_sparse(self, ncomp=None):
        return sp.csr_matrix(sp.block_diag([op.to_sparse(op.ncomp) for op in self.ops]))

    def symbol(self, k):
        from scipy.linalg import block_diag
        return block_diag(*[_as_symbol_matrix(op.symbol(k), op.ncomp) for op in self.ops])


# -- module-level API ---------------------------------------------------------

def momentum_op(grid: Grid, axis: int) -> Momentum:
    return Momentum(grid, axis)


def position_op(grid: Grid, axis: int) -> Diagonal:
    if not 0 <= axis < grid.dims:
        raise ValueError(f"axis {axis} out of range for a {grid.dims}D grid")
    return Diagonal(grid, grid.mesh()[axis])


def radial_profile(name: str) -> tuple[Callable, Callable]:
    """(f, f') for a named radial profile."""
    table = {
        "1/r": (lambda r: 1.0 / r, lambda r: -1.0 / r ** 2),
        "1/r^2": (lambda r: 1.0 / r ** 2, lambda r: -2.0 / r ** 3),
        "r": (lambda r: r, lambda r: np.ones_like(r)),
        "r^2": (lambda r: r ** 2, lambda r: 2.0 * r),
    }
    if name not in table:
        raise ValueError(f"unknown radial profile {name!r}; expected one of {RADIAL_PROFILES}")
    return table[name]


def check_radial_grid(grid: Grid, singular: bool) -> None:
    if singular and grid.has_origin_node():
        raise ValueError("a profile singular at r = 0 needs a grid without an origin node (offset grid)")


def radial_function_op(grid: Grid, f: str | Callable, singular: bool | None = None) -> Diagonal:
    """Multiplication by f(r) sampled at the nodes; ``f`` is a profile tag or a callable."""
    if isinstance(f, str):
        singular = f in SINGULAR_PROFILES if singular is None else singular
        f = radial_profile(f)[0]
    check_radial_grid(grid, bool(singular))
    r = grid.radius()
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = f(r)
    if not np.all(np.isfinite(vals)):
        raise ValueError("radial function is not finite on this grid")
    return Diagonal(grid, vals)


def angular_momentum_op(grid: Grid, axis: int) -> Operator:
    """L_axis = eps_{axis m n} X_m P_n."""
    if grid.dims != 3:
        raise ValueError("angular momentum needs a 3D grid")
    terms = []
    for m in range(3):
        for n in range(3):
            e = levi_civita(axis, m, n)
            if e:
                terms.append(Scaled(e, compose(position_op(grid, m), momentum_op(grid, n))))
    op = Sum(terms)
    op.hermitian_hint = True
    return op


def laplacian_momentum_squared(grid: Grid) -> Operator:
    """P.P built from the momentum stencils (wide stencil, not the 3-point Laplacian)."""
    return Sum([compose(momentum_op(grid, j), momentum_op(grid, j)) for j in range(grid.dims)])


def neighbour_average(grid: Grid, axis: int) -> Stencil:
    return Stencil(grid, axis, {1: 0.5, -1: 0.5})


def adjoint(op: Operator) -> Operator:
    return op.adjoint()


def compose(a: Operator, b: Operator) -> Operator:
    _same_grid(a, b)
    return Product([a, b])


def commutator(a: Operator, b: Operator) -> Operator:
    return compose(a, b) - compose(b, a)


def apply(op: Operator, field):
    if isinstance(field, SpinorField):
        if field.grid != op.grid:
            raise GridMismatchError("field and operator live on different grids")
        return SpinorField(field.grid, op.apply(field.components))
    return op.apply(field)


def hermiticity_deviation(op: Operator, ncomp: int | None = None) -> float:
    """max |A - A^dagger| over assembled matrix entries."""
    m = op.to_sparse(ncomp)
    d = (m - m.conj().T).tocoo()
    return float(np.max(np.abs(d.data))) if d.nnz else 0.0


@dataclass
class SpinorField:
    """Two- or four-component lattice function; norm uses the cell volume."""

    grid: Grid
    components: np.ndarray

    def __post_init__(self):
        self.components = np.asarray(self.components, dtype=complex)
        if self.components.shape[0] not in (2, 4) or self.components.shape[1:] != self.grid.shape:
            raise ValueError(f"expected (2|4, *{self.grid.shape}) components, got {self.components.shape}")

    @property
    def ncomp(self) -> int:
        return self.components.shape[0]

    def inner(self, other: "SpinorField") -> complex:
        return complex(np.vdot(self.components, other.components) * self.grid.cell_volume)

    def norm(self) -> float:
        return float(np.sqrt(self.inner(self).real))

    @classmethod
    def zeros(cls, grid: Grid, ncomp: int = 2) -> "SpinorField":
        return cls(grid, np.zeros((ncomp,) + grid.shape, dtype=complex))
