"""Gauge fields and the generalized Clifford momenta  e_j (P_j + A_j)."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .clifford import CliffordRep, max_abs, pauli_basis
from .lattice import (Diagonal, Grid, Identity, Operator, SpinKron, Sum, check_radial_grid,
                      momentum_op, radial_profile, SINGULAR_PROFILES, RADIAL_PROFILES)


def _check_sign(sign):
    if sign not in (-1, 1):
        raise ValueError(f"sign flag must be +1 or -1, got {sign}")


@dataclass(frozen=True)
class ZeroGauge:
    pass


@dataclass(frozen=True)
class ConstantImaginary:
    """A_j = sign * i * alpha_j with a constant real vector alpha."""

    alpha: tuple
    sign: int = -1

    def __post_init__(self):
        alpha = tuple(float(a) for a in self.alpha)
        if len(alpha) != 3:
            raise ValueError("alpha must be a 3-vector")
        object.__setattr__(self, "alpha", alpha)
        _check_sign(self.sign)


@dataclass(frozen=True, eq=False)
class SpinMatrixConstant:
    """A_j = M_j, constant 2x2 matrices multiplying e_j from the right."""

    matrices: tuple

    def __post_init__(self):
        mats = [np.array(m, dtype=complex) for m in self.matrices]
        if len(mats) > 3 or any(m.shape != (2, 2) for m in mats):
            raise ValueError("need up to three 2x2 matrices")
        mats += [np.zeros((2, 2), dtype=complex)] * (3 - len(mats))
        object.__setattr__(self, "matrices", tuple(mats))

    def __eq__(self, other):
        return (isinstance(other, SpinMatrixConstant)
                and all(np.array_equal(a, b) for a, b in zip(self.matrices, other.matrices)))

    def __hash__(self):
        return hash(tuple(m.tobytes() for m in self.matrices))


@dataclass(frozen=True)
class RadialScalar:
    """A_j = sign * i * alpha * f(r) x_j / r."""

    alpha: float
    profile: str = "r"
    sign: int = 1

    def __post_init__(self):
        if self.profile not in RADIAL_PROFILES:
            raise ValueError(f"unsupported radial profile {self.profile!r}")
        _check_sign(self.sign)


@dataclass(frozen=True)
class SusyLinear:
    """One-dimensional A_1 = sign * i * omega * X."""

    omega: float
    sign: int = 1

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        _check_sign(self.sign)


GaugeSpec = Union[ZeroGauge, ConstantImaginary, SpinMatrixConstant, RadialScalar, SusyLinear]
SCALAR_GAUGES = (ZeroGauge, ConstantImaginary, RadialScalar, SusyLinear)


def is_scalar(g: GaugeSpec) -> bool:
    return isinstance(g, SCALAR_GAUGES)


def conjugate_gauge(g: GaugeSpec) -> GaugeSpec:
    """Entrywise complex conjugate of the gauge field."""
    if isinstance(g, ZeroGauge):
        return g
    if isinstance(g, ConstantImaginary):
        return ConstantImaginary(g.alpha, -g.sign)
    if isinstance(g, RadialScalar):
        return RadialScalar(g.alpha, g.profile, -g.sign)
    if isinstance(g, SusyLinear):
        return SusyLinear(g.omega, -g.sign)
    if isinstance(g, SpinMatrixConstant):
        return SpinMatrixConstant(tuple(m.conj() for m in g.matrices))
    raise TypeError(f"not a gauge spec: {g!r}")


def check_compatible(g: GaugeSpec, grid: Grid) -> None:
    if isinstance(g, SusyLinear) and grid.dims != 1:
        raise ValueError("the linear SUSY gauge needs a 1D grid")
    if isinstance(g, RadialScalar):
        if grid.dims != 3:
            raise ValueError("radial gauges need a 3D grid")
        check_radial_grid(grid, g.profile in SINGULAR_PROFILES)
    if isinstance(g, ConstantImaginary) and any(g.alpha[grid.dims:]):
        raise ValueError("gauge has components along axes the grid does not have")
    if isinstance(g, SpinMatrixConstant) and any(np.any(m) for m in g.matrices[grid.dims:]):
        raise ValueError("gauge has components along axes the grid does not have")


def scalar_gauge_values(g: GaugeSpec, grid: Grid) -> list:
    """A_j sampled on the lattice (None where the component vanishes identically)."""
    check_compatible(g, grid)
    if isinstance(g, ZeroGauge):
        return [None] * grid.dims
    if isinstance(g, ConstantImaginary):
        return [g.sign * 1j * a if a else None for a in g.alpha[:grid.dims]]
    if isinstance(g, SusyLinear):
        return [g.sign * 1j * g.omega * grid.mesh()[0]]
    if isinstance(g, RadialScalar):
        f = radial_profile(g.profile)[0]
        r = grid.radius()
        weight = g.sign * 1j * g.alpha * f(r) / r
        return [weight * x for x in grid.mesh()]
    raise TypeError("matrix-valued gauges have no scalar values")


def gauge_spin_sum(g: SpinMatrixConstant, rep: CliffordRep | None = None) -> np.ndarray:
    """sum_j e_j M_j: the constant part a matrix-valued gauge adds to the momentum."""
    rep = rep or pauli_basis()
    return sum(e @ m for e, m in zip(rep.basis, g.matrices))


@dataclass
class CliffordMomentum:
    grid: Grid
    operator: Operator
    gauge: GaugeSpec | None
    rep: CliffordRep
    label: str = ""
    notes: list = field(default_factory=list)

    def apply(self, v):
        return self.operator.apply(v)

    def to_sparse(self):
        return self.operator.to_sparse()


def build_momentum(g: GaugeSpec, grid: Grid, rep: CliffordRep | None = None) -> CliffordMomentum:
    """e_j (P_j + A_j), summed over the grid's axes, with e_j multiplying on the left."""
    rep = rep or pauli_basis()
    check_compatible(g, grid)
    terms = [SpinKron(rep.basis[j], momentum_op(grid, j)) for j in range(grid.dims)]
    notes = []
    if isinstance(g, SpinMatrixConstant):
        for j in range(grid.dims):
            if np.any(g.matrices[j]):
                terms.append(SpinKron(rep.basis[j] @ g.matrices[j], Identity(grid)))
        if np.any(np.stack(g.matrices)) and max_abs(gauge_spin_sum(g, rep)) == 0.0:
            notes.append("spin-gauge-cancellation: sum_j e_j A_j = 0, so the literal product "
                         "e_j (P_j + A_j) reduces to the free Clifford momentum")
    else:
        for j, a in enumerate(scalar_gauge_values(g, grid)):
            if a is not None:
                terms.append(SpinKron(rep.basis[j], Diagonal(grid, a)))
    return CliffordMomentum(grid=grid, operator=Sum(terms), gauge=g, rep=rep,
                            label=type(g).__name__, notes=notes)


def momentum_adjoint(m: CliffordMomentum) -> CliffordMomentum:
    gauge = conjugate_gauge(m.gauge) if m.gauge is not None and is_scalar(m.gauge) else None
    return CliffordMomentum(grid=m.grid, operator=m.operator.adjoint(), gauge=gauge, rep=m.rep,
                            label=f"adjoint({m.label})", notes=list(m.notes))


def momentum_pair(gauge_a: GaugeSpec, gauge_b: GaugeSpec, grid: Grid,
                  rep: CliffordRep | None = None) -> tuple:
    """Build both momenta; when B = A* the second is the exact adjoint of the first."""
    pa = build_momentum(gauge_a, grid, rep)
    if is_scalar(gauge_a) and gauge_b == conjugate_gauge(gauge_a):
        pb = momentum_adjoint(pa)
        pb.gauge = gauge_b
        pb.notes = []
    else:
        pb = build_momentum(gauge_b, grid, rep)
    return pa, pb
