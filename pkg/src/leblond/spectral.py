"""Eigensolvers and the spectral verification suite: dispersion, sigma.L channels,
radial channel spectra, SUSY/AB-BA pairing and linearized-pair consistency."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .clifford import PAULI
from .gauge import CliffordMomentum
from .hamiltonians import (CONSTANT_COEFFICIENT_MODELS, HamiltonianPair, ModelSpec, RadialInverse,
                           RadialOscillator, closed_form)
from .lattice import Grid, Operator, SpatiallyVaryingError, neighbour_average, radial_profile


class NonHermitianError(ValueError):
    pass


class FallToCenterError(ValueError):
    """Inverse-square coefficient below -1/8: the channel is unbounded below."""


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, spectrum: "Spectrum"):
        super().__init__(message)
        self.spectrum = spectrum


@dataclass
class Spectrum:
    eigenvalues: np.ndarray
    vectors: np.ndarray | None = None  # columns, component-major ordering
    residuals: np.ndarray | None = None
    method: str = "dense"
    iterations: int = 0
    converged: bool = True
    distinct: bool = False  # True when degenerate levels appear once (Krylov)

    def fields(self, grid: Grid, ncomp: int) -> np.ndarray:
        """Eigenvectors reshaped to (count, ncomp, *grid.shape)."""
        if self.vectors is None:
            raise ValueError("spectrum has no eigenvectors")
        return self.vectors.T.reshape((-1, ncomp) + grid.shape)


def _assemble(op, ncomp):
    if isinstance(op, Operator):
        return op.to_sparse(ncomp), (op.ncomp or ncomp or 1)
    if sp.issparse(op):
        return sp.csr_matrix(op), ncomp or 1
    return np.asarray(op), ncomp or 1


def _hermiticity(m) -> float:
    d = m - m.conj().T
    scale = abs(m).max() if sp.issparse(m) else np.abs(m).max()
    dev = abs(d).max() if sp.issparse(d) else np.abs(d).max()
    return float(dev / max(1.0, scale))


def _to_banded(m: sp.csr_matrix, bw: int) -> np.ndarray:
    """Upper banded storage ab[bw + i - j, j] = m[i, j] for i <= j."""
    coo = sp.triu(m).tocoo()
    ab = np.zeros((bw + 1, m.shape[0]), dtype=m.dtype)
    ab[bw + coo.row - coo.col, coo.col] = coo.data
    return ab


def _cluster_vectors(m: sp.csc_matrix, vals: np.ndarray, seed: int, sweeps: int = 3) -> np.ndarray:
    """Eigenvectors for known eigenvalues of a banded matrix.

    The band solver builds the full reduction matrix when asked for vectors
    (cubic cost); shift-and-invert subspace iteration on a sparse LU is linear
    per cluster. Clusters are eigenvalues closer than 1e-10 ||m||; a
    Rayleigh-Ritz step inside each cluster spans its eigenspace.
    """
    n = m.shape[0]
    norm = float(abs(m).sum(axis=1).max())
    rng = np.random.default_rng(seed)
    out = np.zeros((n, len(vals)), dtype=complex)
    start = 0
    while start < len(vals):
        stop = start + 1
        while stop < len(vals) and vals[stop] - vals[stop - 1] <= 1e-10 * norm:
            stop += 1
        k = stop - start
        shift = vals[start] - 1e-9 * max(1.0, norm)
        lu = spla.splu(sp.csc_matrix(m - shift * sp.identity(n, format="csc")))
        x = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
        prev = out[:, :start]
        for _ in range(sweeps):
            x = lu.solve(x)
            x -= prev @ (prev.conj().T @ x)
            x, _ = np.linalg.qr(x)
        _, s = np.linalg.eigh(x.conj().T @ (m @ x))
        out[:, start:stop] = x @ s
        start = stop
    return out


def dense_spectrum(op, want_vectors: bool = False, count: int | None = None, ncomp: int | None = None,
                   cap: int = 8192, herm_tol: float = 1e-10) -> Spectrum:
    """Full (or lowest ``count``) Hermitian eigendecomposition.

    Spin components are interleaved per site before solving, which makes 1D
    stencil operators banded; those go through the LAPACK band solver.
    """
    m, nc = _assemble(op, ncomp)
    n = m.shape[0]
    if n > cap:
        raise ValueError(f"operator size {n} exceeds the dense cap {cap}")
    if _hermiticity(m) > herm_tol:
        raise NonHermitianError("operator is not Hermitian within tolerance")
    count = n if count is None else min(count, n)
    m = sp.csr_matrix(m)
    perm = np.arange(n).reshape(nc, n // nc).T.ravel()
    mp = m[perm][:, perm].tocoo()
    bw = int(np.max(np.abs(mp.row - mp.col))) if mp.nnz else 0
    select = dict(select="i", select_range=(0, count - 1)) if count < n else {}
    if bw < n // 8:
        ab = _to_banded(mp.tocsr(), bw)
        vals = sla.eig_banded(ab, lower=False, eigvals_only=True, **select)
        vp = _cluster_vectors(mp.tocsc(), vals, seed=0) if want_vectors else None
    else:
        dense = mp.toarray()
        subset = dict(subset_by_index=(0, count - 1)) if count < n else {}
        if want_vectors:
            vals, vp = sla.eigh(dense, **subset)
        else:
            vals, vp = sla.eigh(dense, eigvals_only=True, **subset), None
    vecs = res = None
    if vp is not None:
        vecs = np.empty_like(vp)
        vecs[perm] = vp
        res = np.linalg.norm(m @ vecs - vecs * vals, axis=0) / np.linalg.norm(vecs, axis=0)
    return Spectrum(np.asarray(vals, dtype=float), vecs, res, method="dense")


def _matvec(op, ncomp):
    if isinstance(op, Operator):
        nc = op.ncomp or ncomp or 1
        shape = (nc,) + op.grid.shape if nc > 1 else op.grid.shape
        n = int(np.prod(shape))
        return (lambda x: op.apply(x.reshape(shape)).ravel()), n
    m = sp.csr_matrix(op) if sp.issparse(op) else np.asarray(op)
    return (lambda x: m @ x), m.shape[0]


def lowest_eigenpairs(op, m: int, tol: float = 1e-10, maxiter: int | None = None, seed: int = 0,
                      ncomp: int | None = None, herm_tol: float = 1e-10, check_every: int = 10,
                      shift: float | None = None) -> Spectrum:
    """The m lowest distinct eigenvalues by Lanczos with full reorthogonalization.

    A single Krylov sequence sees one direction per degenerate eigenspace, so
    degenerate levels appear once. Converged means ||Hv - lv|| <= tol ||v||.
    With ``shift`` (below the spectrum) the iteration runs on -(H - shift)^-1
    through a sparse LU, which separates clustered low levels quickly.
    """
    matvec, n = _matvec(op, ncomp)
    rng = np.random.default_rng(seed)

    def rand():
        return rng.normal(size=n) + 1j * rng.normal(size=n)

    u, v = rand(), rand()
    au, av = matvec(u), matvec(v)
    if abs(np.vdot(u, av) - np.vdot(au, v)) > herm_tol * np.linalg.norm(au) * np.linalg.norm(v):
        raise NonHermitianError("operator is not Hermitian within tolerance")
    maxiter = min(n, 800) if maxiter is None else min(maxiter, n)
    m = min(m, n)

    if shift is None:
        krylov_matvec = matvec

        def to_eigenvalue(theta):
            return theta
    else:
        a_mat, _ = _assemble(op, ncomp)
        lu = spla.splu(sp.csc_matrix(a_mat - shift * sp.identity(n, format="csc"), dtype=complex))

        def krylov_matvec(x):
            return -lu.solve(x)

        def to_eigenvalue(theta):
            return shift - 1.0 / theta

    Q = np.zeros((maxiter + 1, n), dtype=complex)
    alphas, betas = [], []
    Q[0] = rand()
    Q[0] /= np.linalg.norm(Q[0])
    scale, best = 0.0, None
    for j in range(maxiter):
        w = krylov_matvec(Q[j])
        a = float(np.vdot(Q[j], w).real)
        w = w - a * Q[j] - (betas[-1] * Q[j - 1] if j else 0)
        for _ in range(2):
            w -= Q[:j + 1].T @ (Q[:j + 1].conj() @ w)
        b = float(np.linalg.norm(w))
        alphas.append(a)
        scale = max(scale, abs(a) + b)
        breakdown = b <= 1e-13 * scale
        if breakdown:
            # invariant subspace; continue from a fresh orthogonal direction
            w = rand()
            for _ in range(2):
                w -= Q[:j + 1].T @ (Q[:j + 1].conj() @ w)
            Q[j + 1] = w / np.linalg.norm(w)
            betas.append(0.0)
        else:
            Q[j + 1] = w / b
            betas.append(b)
        k = j + 1
        if k < m or (k % check_every and not breakdown and k != maxiter):
            continue
        theta, S = _tridiag_eigh(alphas, betas[:-1])
        est = np.abs(betas[-1] * S[-1, :])
        ctol = tol if shift is None else tol * theta ** 2
        keep = _settled_levels(theta, est, est <= ctol, m)
        if keep is None:
            continue
        best = (theta, S, keep, k)
        spec = _ritz(matvec, Q[:k], to_eigenvalue(theta), S, keep, k)
        if np.all(spec.residuals <= tol):
            return spec
    if best is None:
        theta, S = _tridiag_eigh(alphas, betas[:-1])
        best = (theta, S, _first_distinct(theta, m), len(alphas))
    theta, S, keep, k = best
    spec = _ritz(matvec, Q[:k], to_eigenvalue(theta), S, keep, k)
    spec.converged = False
    raise ConvergenceError(f"Lanczos did not reach tol={tol} in {k} iterations "
                           f"(worst residual {spec.residuals.max():.2e})", spec)


def _tridiag_eigh(alphas, betas):
    # stemr occasionally fails on Lanczos matrices with tiny couplings; stev is QL and robust
    return sla.eigh_tridiagonal(np.array(alphas), np.array(betas), lapack_driver="stev")


def _settled_levels(theta, est, conv, m, rtol=1e-9):
    """Indices of the m lowest distinct converged Ritz values, or None.

    An unconverged Ritz value whose error interval (|theta - lambda| <= est)
    holds a converged one is an emerging copy of a degenerate level and is
    skipped; any other unconverged value below means a level may be missing.
    """
    keep = []
    settled = theta[conv]
    for i, t in enumerate(theta):
        if conv[i]:
            if keep and abs(t - theta[keep[-1]]) <= rtol * max(1.0, abs(t)):
                continue
            keep.append(i)
            if len(keep) == m:
                return keep
        elif not np.any(np.abs(settled - t) <= est[i]):
            return None
    return None


def _first_distinct(theta, m, rtol=1e-9):
    keep = []
    for i, t in enumerate(theta):
        if keep and abs(t - theta[keep[-1]]) <= rtol * max(1.0, abs(t)):
            continue
        keep.append(i)
        if len(keep) == m:
            break
    return keep


def _ritz(matvec, Qk, theta, S, keep, k) -> Spectrum:
    y = Qk.T @ S[:, keep]
    y /= np.linalg.norm(y, axis=0)
    res = np.array([np.linalg.norm(matvec(y[:, i]) - theta[idx] * y[:, i])
                    for i, idx in enumerate(keep)])
    return Spectrum(theta[keep].copy(), y, res, method="lanczos", iterations=k, distinct=True)


# -- doubler filtering --------------------------------------------------------


def staggering_index(grid: Grid, field: np.ndarray) -> np.ndarray:
    """Re<v, Avg_a v> / <v, v> per axis: near +1 for smooth modes, near -1 for
    the pi/h doubler branch of the central-difference momentum."""
    field = np.asarray(field)
    norm = np.vdot(field, field).real
    return np.array([np.vdot(field, neighbour_average(grid, a).apply(field)).real / norm
                     for a in range(grid.dims)])


def physical_mask(grid: Grid, fields) -> np.ndarray:
    return np.array([bool(np.all(staggering_index(grid, f) > 0)) for f in fields])


# -- level bookkeeping --------------------------------------------------------


def distinct_levels(values, rtol: float = 1e-8) -> list:
    """Cluster an ascending list into (value, multiplicity)."""
    out = []
    for v in np.sort(np.asarray(values, dtype=float)):
        if out and abs(v - out[-1][0]) <= rtol * max(1.0, abs(v)):
            val, mult = out[-1]
            out[-1] = ((val * mult + v) / (mult + 1), mult + 1)
        else:
            out.append((float(v), 1))
    return out


@dataclass
class PairingReport:
    psi_levels: list
    eta_levels: list
    kernel_dims: dict
    pairs: list  # (E_psi, E_eta, |difference|)
    multiplicity_mismatches: list
    excluded_doublers: dict
    tol: float
    kernel_threshold: float

    @property
    def max_deviation(self) -> float:
        return max((d for _, _, d in self.pairs), default=0.0)

    @property
    def paired(self) -> bool:
        return bool(self.pairs) and self.max_deviation <= self.tol and not self.multiplicity_mismatches


SOLVER_METHODS = ("auto", "dense", "iterative", "shift-invert")


def block_spectrum(op: Operator, count: int, method: str = "auto", seed: int = 0,
                   shift: float = -0.5, tol: float = 1e-10, cap: int = 8192,
                   maxiter: int | None = None) -> Spectrum:
    """Lowest ``count`` eigenpairs by the named route; ``auto`` is dense in 1D, Lanczos in 3D."""
    if method not in SOLVER_METHODS:
        raise ValueError(f"unknown solver method {method!r}")
    if method == "auto":
        method = "dense" if op.grid.dims == 1 else "iterative"
    if method == "dense":
        return dense_spectrum(op, want_vectors=True, count=count, cap=cap)
    return lowest_eigenpairs(op, count, tol=tol, seed=seed, maxiter=maxiter,
                             shift=shift if method == "shift-invert" else None)


def susy_degeneracy_check(pair: HamiltonianPair, m: int = 10, tol: float = 1e-6,
                          kernel_threshold: float | None = None, scale: float = 1.0,
                          filter_doublers: bool = True, method: str = "auto", seed: int = 0,
                          count: int | None = None, shift: float = -0.5) -> PairingReport:
    """m lowest levels of each block, kernel removed, nonzero levels paired in order."""
    thr = 1e-6 * scale if kernel_threshold is None else kernel_threshold
    grid = pair.grid
    levels, kernel, excluded = {}, {}, {}
    for name, op in pair.blocks().items():
        want = count or (4 * m + 8 if filter_doublers else 2 * m + 4)
        spec = block_spectrum(op, want, method, seed, shift)
        vals = spec.eigenvalues
        if filter_doublers:
            mask = physical_mask(grid, spec.fields(grid, 2))
            excluded[name] = int(np.sum(~mask))
            vals = vals[mask]
        else:
            excluded[name] = 0
        lev = (distinct_levels(vals) if not spec.distinct else [(float(v), 1) for v in vals])[:m]
        kernel[name] = sum(k for v, k in lev if abs(v) <= thr)
        levels[name] = lev
    nz = {name: [(v, k) for v, k in lev if abs(v) > thr] for name, lev in levels.items()}
    pairs, mism = [], []
    for (ep, kp), (ee, ke) in zip(nz["psi"], nz["eta"]):
        pairs.append((ep, ee, abs(ep - ee)))
        if kp != ke:
            mism.append((ep, kp, ke))
    return PairingReport(levels["psi"], levels["eta"], kernel, pairs, mism, excluded, tol, thr)


# -- linearized pair -------------------------------------------------------------


@dataclass
class PairConsistency:
    residual: float
    eigen_residual: float
    eta_residual: float | None
    applicable: bool = True


def pair_consistency_check(pa: CliffordMomentum, pb: CliffordMomentum, energy: float,
                           psi: np.ndarray, tol: float = 1e-8) -> PairConsistency:
    """eta := (i/2) p^A psi, then ||p^B eta - i E psi|| / ||psi||."""
    psi = np.asarray(psi, dtype=complex)
    norm = np.linalg.norm(psi)
    if norm == 0:
        return PairConsistency(0.0, 0.0, None, applicable=False)
    a_psi = pa.apply(psi)
    eig = np.linalg.norm(0.5 * pb.apply(a_psi) - energy * psi) / norm
    if eig > tol / 10:
        raise ValueError(f"(E, psi) is not an eigenpair to tol/10 (residual {eig:.2e})")
    eta = 0.5j * a_psi
    res = float(np.linalg.norm(pb.apply(eta) - 1j * energy * psi) / norm)
    eta_norm = np.linalg.norm(eta)
    eta_res = None
    if eta_norm > 1e-12 * norm:
        eta_res = float(np.linalg.norm(0.5 * pa.apply(pb.apply(eta)) - energy * eta) / eta_norm)
    return PairConsistency(res, float(eig), eta_res)


# -- dispersion -----------------------------------------------------------------


@dataclass
class DispersionCurve:
    k_samples: np.ndarray
    branches: np.ndarray  # (samples, spin dimension), ascending per row


def _as_k3(ks) -> np.ndarray:
    ks = np.asarray(ks, dtype=float)
    if ks.ndim == 1:
        ks = np.stack([ks, np.zeros_like(ks), np.zeros_like(ks)], axis=1)
    if ks.ndim != 2 or ks.shape[1] != 3:
        raise ValueError("k samples must be scalars or 3-vectors")
    return ks


def dispersion(model: ModelSpec, ks) -> dict:
    """Branches of the closed-form symbol (P -> k) for each block."""
    if not isinstance(model, CONSTANT_COEFFICIENT_MODELS):
        raise SpatiallyVaryingError(f"{type(model).__name__} has spatially varying coefficients")
    ks = _as_k3(ks)
    grid = Grid(3, 4, 1.0, offset=False, boundary="periodic")
    pair = closed_form(model, grid)
    out = {}
    for name, op in pair.blocks().items():
        rows = []
        for k in ks:
            s = np.asarray(op.symbol(k), dtype=complex)
            if np.max(np.abs(s - s.conj().T)) > 1e-14 * max(1.0, np.max(np.abs(s))):
                raise NonHermitianError("symbol is not Hermitian")
            rows.append(np.linalg.eigvalsh(s))
        out[name] = DispersionCurve(ks.copy(), np.array(rows))
    return out


def k_path(start, stop, samples: int) -> np.ndarray:
    start, stop = np.asarray(start, dtype=float), np.asarray(stop, dtype=float)
    t = np.linspace(0.0, 1.0, samples)[:, None]
    return start + t * (stop - start)


# -- sigma.L channels and radial spectra ------------------------------------------


def angular_momentum_matrices(l: int) -> tuple:
    """L_x, L_y, L_z on |l, m>, m = l .. -l, from ladder-operator matrix elements."""
    ms = np.arange(l, -l - 1, -1, dtype=float)
    lp = np.zeros((2 * l + 1, 2 * l + 1), dtype=complex)
    for i in range(1, 2 * l + 1):
        m = ms[i]
        lp[i - 1, i] = np.sqrt(l * (l + 1) - m * (m + 1))
    lm = lp.conj().T
    return (lp + lm) / 2, (lp - lm) / 2j, np.diag(ms).astype(complex)


def sigma_dot_l_matrix(l: int) -> np.ndarray:
    return sum(np.kron(s, L) for s, L in zip(PAULI, angular_momentum_matrices(l)))


def sigma_dot_l_channel_eigs(l: int) -> list:
    """[(kappa, multiplicity)] for sigma.L on the l shell, kappa descending."""
    if l < 0 or int(l) != l:
        raise ValueError("l must be a nonnegative integer")
    vals = np.linalg.eigvalsh(sigma_dot_l_matrix(int(l)))
    rounded = np.rint(vals)
    if np.max(np.abs(vals - rounded), initial=0.0) > 1e-9:
        raise ArithmeticError("sigma.L eigenvalues are not integers")
    counts = Counter(int(v) for v in rounded)
    return sorted(counts.items(), key=lambda kv: -kv[0])


@dataclass(frozen=True)
class ChannelSpec:
    l: int
    kappa: int

    def __post_init__(self):
        if self.l < 0 or int(self.l) != self.l:
            raise ValueError("l must be a nonnegative integer")
        allowed = {0} if self.l == 0 else {self.l, -(self.l + 1)}
        if self.kappa not in allowed:
            raise ValueError(f"kappa must be in {sorted(allowed)} for l={self.l}")


def _block_sign(block: str) -> int:
    if block not in ("psi", "eta"):
        raise ValueError("block must be 'psi' or 'eta'")
    return 1 if block == "psi" else -1


def _radial_model(m):
    if not isinstance(m, (RadialInverse, RadialOscillator)):
        raise ValueError("radial channels need a RadialInverse or RadialOscillator model")


def inverse_square_coefficient(m: ModelSpec, ch: ChannelSpec, block: str) -> float:
    """Coefficient c of c/r^2 in the channel potential (centrifugal term included)."""
    _radial_model(m)
    s = _block_sign(block)
    c = 0.5 * ch.l * (ch.l + 1)
    if isinstance(m, RadialInverse):
        c += 0.5 * (s * 2 * m.alpha * ch.kappa + m.alpha ** 2 + s * m.alpha)
    return c


def check_fall_to_center(m: ModelSpec, ch: ChannelSpec, block: str) -> float:
    c = inverse_square_coefficient(m, ch, block)
    if c < -0.125:
        raise FallToCenterError(f"channel (l={ch.l}, kappa={ch.kappa}) {block}-block has "
                                f"inverse-square coefficient {c} < -1/8: unbounded below")
    return c


def channel_potential(m: ModelSpec, ch: ChannelSpec, block: str, r: np.ndarray) -> np.ndarray:
    """V_block with sigma.L -> kappa: 1/2 [+-2 a kappa f/r + a^2 f^2 +- a (f' + 2 f/r)]."""
    _radial_model(m)
    s = _block_sign(block)
    f, fp = radial_profile(m.profile)
    a = m.alpha
    return 0.5 * (s * 2 * a * ch.kappa * f(r) / r + a ** 2 * f(r) ** 2 + s * a * (fp(r) + 2 * f(r) / r))


def radial_channel_spectrum(m: ModelSpec, ch: ChannelSpec, block: str, n_points: int = 4000,
                            r_max: float = 12.0, m_levels: int = 4) -> Spectrum:
    """Lowest levels of 1/2[-u'' + l(l+1)u/r^2] + V u on r_i = (i + 1/2) h, u(R) = 0,
    with the odd reflection u(-r) = -u(r) closing the stencil at the origin."""
    check_fall_to_center(m, ch, block)
    h = r_max / n_points
    r = (np.arange(n_points) + 0.5) * h
    d = 1.0 / h ** 2 + 0.5 * ch.l * (ch.l + 1) / r ** 2 + channel_potential(m, ch, block, r)
    d[0] += 0.5 / h ** 2
    e = np.full(n_points - 1, -0.5 / h ** 2)
    vals = sla.eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, m_levels - 1))
    return Spectrum(np.asarray(vals), method="radial")


def oscillator_level(alpha: float, l: int, kappa: int, n: int, block: str) -> float:
    """|a|(2n + l + 3/2) +- (a kappa + 3a/2)."""
    s = _block_sign(block)
    return abs(alpha) * (2 * n + l + 1.5) + s * (alpha * kappa + 1.5 * alpha)


# -- report-level helpers ----------------------------------------------------------


def operator_norm_estimate(op) -> float:
    """Max absolute row sum of the assembled matrix (an upper bound on ||op||_2)."""
    m, _ = _assemble(op, None)
    return float(abs(sp.csr_matrix(m)).sum(axis=1).max())


def residual_bound(op, spec: Spectrum, tol: float = 1e-10) -> float:
    """Acceptable eigen-residual: tol ||op|| for the dense route, tol for Krylov."""
    return tol * operator_norm_estimate(op) if spec.method == "dense" else tol


def susy_ladder_check(report: PairingReport, omega: float, levels: int = 9, tol: float = 1e-6) -> dict:
    """E_psi,n = E_eta,n+1 = (n + 1) omega for n < levels, and an eta-block ground state at zero."""
    ladder = [abs(ep - (n + 1) * omega) for n, (ep, _, _) in enumerate(report.pairs[:levels])]
    ladder += [abs(ee - (n + 1) * omega) for n, (_, ee, _) in enumerate(report.pairs[:levels])]
    eta_ground = report.eta_levels[0][0] if report.eta_levels else np.inf
    return {
        "ladder_deviation": float(max(ladder, default=np.inf)),
        "ladder_ok": len(report.pairs) >= levels and max(ladder, default=np.inf) <= tol * omega,
        "eta_ground": float(eta_ground),
        "eta_ground_ok": abs(eta_ground) <= tol * omega,
        "levels_below_half_omega": sum(1 for v, _ in report.eta_levels if v < omega / 2),
    }


def pair_consistency_sweep(pair: HamiltonianPair, spec: Spectrum, tol: float = 1e-8) -> list:
    """pair_consistency_check for every eigenpair of the psi-block in ``spec``."""
    if pair.momenta is None:
        raise ValueError("pair carries no momenta")
    pa, pb = pair.momenta
    return [pair_consistency_check(pa, pb, float(e), f, tol)
            for e, f in zip(spec.eigenvalues, spec.fields(pair.grid, 2))]


def channel_table(l_max: int) -> list:
    """Rows (l, kappa, multiplicity) plus a completeness flag per l."""
    rows = []
    for l in range(l_max + 1):
        eigs = sigma_dot_l_channel_eigs(l)
        complete = (sum(k for _, k in eigs) == 2 * (2 * l + 1)
                    and {kap for kap, _ in eigs} <= {l, -(l + 1)})
        rows += [{"l": l, "kappa": kap, "multiplicity": mult, "complete": complete} for kap, mult in eigs]
    return rows


def radial_channel_report(m: ModelSpec, l_max: int, n_points: int = 4000, r_max: float = 12.0,
                          m_levels: int = 2, tol: float = 1e-3) -> list:
    """Per (l, kappa, block): inverse-square coefficient, bounded-below status and,
    for the oscillator, the lowest levels against the closed-form ladder."""
    rows = []
    for l in range(l_max + 1):
        for kappa in ([0] if l == 0 else [l, -(l + 1)]):
            ch = ChannelSpec(l, kappa)
            for block in ("psi", "eta"):
                row = {"l": l, "kappa": kappa, "block": block,
                       "coefficient": inverse_square_coefficient(m, ch, block)}
                try:
                    check_fall_to_center(m, ch, block)
                    row["bounded_below"] = True
                except FallToCenterError:
                    row["bounded_below"] = False
                if isinstance(m, RadialOscillator) and row["bounded_below"]:
                    levels = radial_channel_spectrum(m, ch, block, n_points, r_max, m_levels).eigenvalues
                    expected = [oscillator_level(m.alpha, l, kappa, n, block) for n in range(m_levels)]
                    row["levels"] = [float(v) for v in levels]
                    row["expected"] = expected
                    row["levels_ok"] = bool(np.max(np.abs(levels - expected)) <= tol)
                rows.append(row)
    return rows
