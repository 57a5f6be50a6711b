"""Paired Hamiltonians from two Clifford momenta, the closed-form model catalog,
and a probe-based equivalence audit between the two."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .clifford import PAULI, SIGMA_0, levi_civita
from .gauge import (ConstantImaginary, GaugeSpec, RadialScalar, SpinMatrixConstant, SusyLinear,
                    ZeroGauge, CliffordMomentum, conjugate_gauge, is_scalar, momentum_pair,
                    scalar_gauge_values)
from .lattice import (BlockDiagonal, Diagonal, Grid, GridMismatchError, Identity, Operator, Scaled, SpinKron,
                      Sum, angular_momentum_op, compose, laplacian_momentum_squared, momentum_op,
                      position_op, radial_profile, check_radial_grid, SINGULAR_PROFILES)

# -- model catalog ------------------------------------------------------------


@dataclass(frozen=True)
class FreeParticle:
    dims = None


@dataclass(frozen=True)
class Rashba:
    alpha: tuple = (0.0, 0.0, 1.0)
    dims = 3

    def __post_init__(self):
        alpha = tuple(float(a) for a in self.alpha)
        if len(alpha) != 3:
            raise ValueError("Rashba alpha must be a 3-vector")
        object.__setattr__(self, "alpha", alpha)


@dataclass(frozen=True)
class Dresselhaus:
    alpha: float = 1.0
    dims = 3


@dataclass(frozen=True)
class RadialInverse:
    alpha: float = 1.0
    dims = 3
    profile = "1/r"

    def __post_init__(self):
        if self.alpha == 0:
            raise ValueError("RadialInverse needs alpha != 0")


@dataclass(frozen=True)
class RadialOscillator:
    alpha: float = 1.0
    dims = 3
    profile = "r"

    def __post_init__(self):
        if self.alpha == 0:
            raise ValueError("RadialOscillator needs alpha != 0")


@dataclass(frozen=True)
class Susy1D:
    omega: float = 1.0
    dims = 1

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be positive")


@dataclass(frozen=True)
class CustomPair:
    gauge_a: GaugeSpec
    gauge_b: GaugeSpec
    dims = None


ModelSpec = Union[FreeParticle, Rashba, Dresselhaus, RadialInverse, RadialOscillator, Susy1D, CustomPair]
CONSTANT_COEFFICIENT_MODELS = (FreeParticle, Rashba, Dresselhaus)


def _dresselhaus_gauge(alpha: float) -> SpinMatrixConstant:
    return SpinMatrixConstant((0.5 * alpha * PAULI[0], -0.5 * alpha * PAULI[1]))


def model_gauges(m: ModelSpec) -> tuple:
    """(A, B) gauge fields of a catalog model."""
    if isinstance(m, FreeParticle):
        return ZeroGauge(), ZeroGauge()
    if isinstance(m, Rashba):
        a = ConstantImaginary(m.alpha, -1)
        return a, conjugate_gauge(a)
    if isinstance(m, Dresselhaus):
        # literal reading: the same Hermitian spin-matrix field on both sides
        g = _dresselhaus_gauge(m.alpha)
        return g, g
    if isinstance(m, (RadialInverse, RadialOscillator)):
        a = RadialScalar(m.alpha, m.profile, 1)
        return a, conjugate_gauge(a)
    if isinstance(m, Susy1D):
        a = SusyLinear(m.omega, 1)
        return a, conjugate_gauge(a)
    if isinstance(m, CustomPair):
        return m.gauge_a, m.gauge_b
    raise TypeError(f"not a model spec: {m!r}")


def check_model_grid(m: ModelSpec, grid: Grid) -> None:
    if m.dims is not None and m.dims != grid.dims:
        raise ValueError(f"{type(m).__name__} needs a {m.dims}D grid, got {grid.dims}D")
    if isinstance(m, (RadialInverse, RadialOscillator)):
        check_radial_grid(grid, m.profile in SINGULAR_PROFILES)


def singular_origin(m: ModelSpec) -> bool:
    if isinstance(m, (RadialInverse, RadialOscillator)):
        return m.profile in SINGULAR_PROFILES
    if isinstance(m, CustomPair):
        return any(isinstance(g, RadialScalar) and g.profile in SINGULAR_PROFILES
                   for g in (m.gauge_a, m.gauge_b))
    return False


# -- pairs --------------------------------------------------------------------


@dataclass
class HamiltonianPair:
    h_psi: Operator
    h_eta: Operator
    provenance: str
    grid: Grid
    notes: list = field(default_factory=list)
    findings: dict = field(default_factory=dict)
    momenta: tuple | None = None
    singular_origin: bool = False

    def blocks(self) -> dict:
        return {"psi": self.h_psi, "eta": self.h_eta}


def compose_pair(pa: CliffordMomentum, pb: CliffordMomentum) -> HamiltonianPair:
    """psi-block 1/2 p^B p^A, eta-block 1/2 p^A p^B."""
    if pa.grid != pb.grid:
        raise GridMismatchError("momenta live on different grids")
    h_psi = Scaled(0.5, compose(pb.operator, pa.operator))
    h_eta = Scaled(0.5, compose(pa.operator, pb.operator))
    notes = list(dict.fromkeys(pa.notes + pb.notes))
    return HamiltonianPair(h_psi, h_eta, "constructed", pa.grid, notes=notes, momenta=(pa, pb))


def constructed_pair(m: ModelSpec, grid: Grid) -> HamiltonianPair:
    check_model_grid(m, grid)
    pair = compose_pair(*momentum_pair(*model_gauges(m), grid))
    pair.singular_origin = singular_origin(m)
    return pair


def general_scalar_expansion(gauge_a: GaugeSpec, gauge_b: GaugeSpec, grid: Grid) -> HamiltonianPair:
    """Term-by-term expansion with sigma_j sigma_k = delta_jk + i eps_jkl sigma_l:

        1/2 [P^2 + P_j A_j + B_j P_j + B_j A_j + i eps_ijk sigma_i (P_j A_k + B_j P_k + B_j A_k)]

    for the psi-block, and A <-> B for the eta-block.
    """
    if not (is_scalar(gauge_a) and is_scalar(gauge_b)):
        raise ValueError("the scalar expansion needs scalar-valued gauges")
    P = [momentum_op(grid, j) for j in range(grid.dims)]
    a = [None if v is None else Diagonal(grid, v) for v in scalar_gauge_values(gauge_a, grid)]
    b = [None if v is None else Diagonal(grid, v) for v in scalar_gauge_values(gauge_b, grid)]

    def cross(j, k, right, left):
        terms = []
        if right[k] is not None:
            terms.append(compose(P[j], right[k]))
        if left[j] is not None:
            terms.append(compose(left[j], P[k]))
            if right[k] is not None:
                terms.append(compose(left[j], right[k]))
        return terms

    def block(right, left):
        scalar = [compose(P[j], P[j]) for j in range(grid.dims)]
        for j in range(grid.dims):
            scalar += cross(j, j, right, left)
        terms = [SpinKron(SIGMA_0, Sum(scalar))]
        if grid.dims == 3:
            for i in range(3):
                for j in range(3):
                    for k in range(3):
                        e = levi_civita(i, j, k)
                        if e and (parts := cross(j, k, right, left)):
                            terms.append(SpinKron(1j * e * PAULI[i], Sum(parts)))
        return Scaled(0.5, Sum(terms))

    return HamiltonianPair(block(a, b), block(b, a), "literal-expansion", grid)


def sigma_dot_l(grid: Grid, weight: Operator | None = None) -> Operator:
    """sum_l sigma_l (w L_l), with an optional scalar weight applied after L."""
    terms = []
    for l in range(3):
        op = angular_momentum_op(grid, l)
        if weight is not None:
            op = compose(weight, op)
        terms.append(SpinKron(PAULI[l], op))
    return Sum(terms)


def _spin_scalar(op: Operator) -> SpinKron:
    return SpinKron(SIGMA_0, op)


def rashba_coupling(grid: Grid, alpha) -> Operator:
    """H_alpha = eps_ijk sigma_i alpha_j P_k."""
    terms = []
    for i in range(3):
        for j in range(3):
            for k in range(3):
                e = levi_civita(i, j, k)
                if e and alpha[j]:
                    terms.append(SpinKron(e * alpha[j] * PAULI[i], momentum_op(grid, k)))
    if not terms:
        return Scaled(0.0, _spin_scalar(Identity(grid)))
    return Sum(terms)


def radial_closed_form(grid: Grid, alpha: float, profile: str) -> tuple:
    """H0 + H1 and H0 + H2 with
    H_{1,2} = 1/2 [+-2 alpha (f/r) sigma.L + alpha^2 f^2 +- alpha (f' + 2 f/r)]."""
    f, fp = radial_profile(profile)
    check_radial_grid(grid, profile in SINGULAR_PROFILES)
    r = grid.radius()
    kinetic = _spin_scalar(Scaled(0.5, laplacian_momentum_squared(grid)))
    so = sigma_dot_l(grid, Diagonal(grid, f(r) / r))
    even = alpha ** 2 * f(r) ** 2
    odd = alpha * (fp(r) + 2 * f(r) / r)
    h1 = Sum([kinetic, Scaled(alpha, so), _spin_scalar(Diagonal(grid, 0.5 * (even + odd)))])
    h2 = Sum([kinetic, Scaled(-alpha, so), _spin_scalar(Diagonal(grid, 0.5 * (even - odd)))])
    return h1, h2


def rashba_reduction_sign(grid: Grid, beta: float, seed: int = 0) -> int:
    """Sign s with H_alpha = s * beta (sigma_1 P_2 - sigma_2 P_1) for alpha = (0, 0, beta); 0 if neither."""
    h_alpha = rashba_coupling(grid, (0.0, 0.0, beta))
    ref = Scaled(beta, Sum([SpinKron(PAULI[0], momentum_op(grid, 1)),
                            Scaled(-1.0, SpinKron(PAULI[1], momentum_op(grid, 0)))]))
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(2,) + grid.shape) + 1j * rng.normal(size=(2,) + grid.shape)
    hv, rv = h_alpha.apply(v), ref.apply(v)
    scale = np.linalg.norm(rv)
    for s in (1, -1):
        if np.linalg.norm(hv - s * rv) <= 1e-12 * scale:
            return s
    return 0


def closed_form(m: ModelSpec, grid: Grid) -> HamiltonianPair:
    check_model_grid(m, grid)
    kinetic = _spin_scalar(Scaled(0.5, laplacian_momentum_squared(grid)))
    notes, findings = [], {}
    if isinstance(m, FreeParticle):
        h_psi = h_eta = kinetic
    elif isinstance(m, Rashba):
        h0 = Sum([kinetic, _spin_scalar(Diagonal(grid, 0.5 * float(np.dot(m.alpha, m.alpha))))])
        h_alpha = rashba_coupling(grid, m.alpha)
        h_psi, h_eta = h0 - h_alpha, h0 + h_alpha
        if m.alpha[0] == m.alpha[1] == 0 and m.alpha[2]:
            findings["rashba_reduction_sign"] = rashba_reduction_sign(grid, m.alpha[2])
            notes.append("H_alpha = eps_ijk sigma_i alpha_j P_k equals "
                         f"{findings['rashba_reduction_sign']:+d} * beta (sigma_1 P_2 - sigma_2 P_1)")
    elif isinstance(m, Dresselhaus):
        h_d = Scaled(0.5 * m.alpha, Sum([SpinKron(PAULI[0], momentum_op(grid, 0)),
                                         Scaled(-1.0, SpinKron(PAULI[1], momentum_op(grid, 1)))]))
        h_psi, h_eta = kinetic + h_d, kinetic - h_d
    elif isinstance(m, (RadialInverse, RadialOscillator)):
        h_psi, h_eta = radial_closed_form(grid, m.alpha, m.profile)
    elif isinstance(m, Susy1D):
        h0 = Sum([kinetic, _spin_scalar(Diagonal(grid, 0.5 * m.omega ** 2 * grid.mesh()[0] ** 2))])
        shift = _spin_scalar(Diagonal(grid, np.full(grid.shape, 0.5 * m.omega)))
        h_psi, h_eta = h0 + shift, h0 - shift
    else:
        raise ValueError(f"no closed form for {type(m).__name__}")
    return HamiltonianPair(h_psi, h_eta, "closed-form", grid, notes=notes, findings=findings,
                           singular_origin=singular_origin(m))


def block_hamiltonian(pair: HamiltonianPair) -> BlockDiagonal:
    """diag(h_psi, h_eta) on four-component fields."""
    return BlockDiagonal([pair.h_psi, pair.h_eta])


# -- equivalence audit --------------------------------------------------------


def interior_probes(grid: Grid, count: int, seed: int = 0, width: float | None = None,
                    avoid_origin: bool = False, margin: float = 7.6, ncomp: int = 2) -> list:
    """Seeded Gaussian wave packets with random spinor and wavevector, negligible
    (below exp(-margin^2/2)) at the boundary and, optionally, at the origin."""
    L = grid.half_width
    if width is None:
        width = L / 14 if avoid_origin else L / 8
    reach = L - margin * width
    if reach < 0 or (avoid_origin and margin * width > np.sqrt(grid.dims) * reach):
        raise ValueError("grid too small for the requested probe width")
    rng = np.random.default_rng(seed)
    mesh = grid.mesh()
    out, tries = [], 0
    while len(out) < count:
        tries += 1
        if tries > 1000 * count:
            raise ValueError("could not place probes away from the origin; use a narrower width")
        centre = rng.uniform(-reach, reach, size=grid.dims)
        if avoid_origin and np.linalg.norm(centre) < margin * width:
            continue
        # gentle phase gradient: wide wavevectors would only measure FD truncation error
        k = rng.normal(scale=0.25 / width, size=grid.dims)
        spin = rng.normal(size=ncomp) + 1j * rng.normal(size=ncomp)
        envelope = np.exp(sum(-(x - c) ** 2 / (2 * width ** 2) + 1j * kk * x
                              for x, c, kk in zip(mesh, centre, k)))
        out.append(np.multiply.outer(spin, envelope * np.ones(grid.shape)))
    return out


@dataclass
class EquivalenceReport:
    probe_count: int
    residuals: list  # per probe, max over blocks, for the chosen pairing
    block_residuals: dict  # pairing -> {"psi": max, "eta": max}
    pairing: str  # "direct", "swapped" or "none"
    tol: float
    notes: list = field(default_factory=list)
    findings: dict = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        return max(self.residuals) if self.residuals else 0.0

    @property
    def verdict(self) -> str:
        return "match" if self.max_residual <= self.tol else "mismatch"


def _rel(a, b) -> float:
    den = np.linalg.norm(a)
    return float(np.linalg.norm(a - b) / den) if den else float(np.linalg.norm(b))


def equivalence_report(constructed: HamiltonianPair, closed: HamiltonianPair, probes: int = 8,
                       tol: float = 1e-10, seed: int = 0, width: float | None = None) -> EquivalenceReport:
    """Apply both pairs to interior probes; try psi<->psi and psi<->eta pairings."""
    if constructed.grid != closed.grid:
        raise GridMismatchError("pairs live on different grids")
    if probes < 1:
        raise ValueError("need at least one probe")
    avoid = constructed.singular_origin or closed.singular_origin
    vs = interior_probes(constructed.grid, probes, seed, width, avoid_origin=avoid)
    per = {"direct": [], "swapped": []}
    blocks = {"direct": {"psi": 0.0, "eta": 0.0}, "swapped": {"psi": 0.0, "eta": 0.0}}
    for v in vs:
        c_psi, c_eta = constructed.h_psi.apply(v), constructed.h_eta.apply(v)
        f_psi, f_eta = closed.h_psi.apply(v), closed.h_eta.apply(v)
        for name, (x, y) in {"direct": (f_psi, f_eta), "swapped": (f_eta, f_psi)}.items():
            rp, re = _rel(c_psi, x), _rel(c_eta, y)
            blocks[name]["psi"] = max(blocks[name]["psi"], rp)
            blocks[name]["eta"] = max(blocks[name]["eta"], re)
            per[name].append(max(rp, re))
    best = min(("direct", "swapped"), key=lambda p: max(per[p]))
    pairing = best if max(per[best]) <= tol else "none"
    notes = list(dict.fromkeys(constructed.notes + closed.notes))
    findings = {**constructed.findings, **closed.findings, "pairing": pairing}
    if pairing == "swapped":
        notes.append("blocks match only after swapping psi and eta (overall sign of the odd terms differs)")
    return EquivalenceReport(probe_count=probes, residuals=per["direct" if pairing == "none" else best],
                             block_residuals=blocks, pairing=pairing, tol=tol, notes=notes,
                             findings=findings)


def factorized_positivity(pair: HamiltonianPair, count: int = 50, seed: int = 0) -> dict:
    """<v, h_psi v> against 1/2 |p^A v|^2 for random v (needs the momenta)."""
    if pair.momenta is None:
        raise ValueError("pair carries no momenta")
    pa = pair.momenta[0]
    rng = np.random.default_rng(seed)
    worst_rel, lowest = 0.0, np.inf
    for _ in range(count):
        v = rng.normal(size=(2,) + pair.grid.shape) + 1j * rng.normal(size=(2,) + pair.grid.shape)
        v /= np.linalg.norm(v)
        quad = np.vdot(v, pair.h_psi.apply(v))
        ref = 0.5 * np.linalg.norm(pa.apply(v)) ** 2
        worst_rel = max(worst_rel, abs(quad - ref) / ref)
        lowest = min(lowest, quad.real)
    return {"max_relative_deviation": float(worst_rel), "min_expectation": float(lowest)}
