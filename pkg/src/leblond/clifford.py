"""Pauli/Clifford bases, 4x4 gamma matrices and the first-order factorization
coefficients of the free Schrodinger operator.

Everything here is a small dense complex matrix. Residuals are measured in the
max-absolute-entry norm.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_1, SIGMA_2, SIGMA_3)

DEFAULT_TOL = 1e-12


def levi_civita(i: int, j: int, k: int) -> int:
    """Totally antisymmetric symbol on 0-based indices."""
    return int((i - j) * (j - k) * (k - i) / 2)


def max_abs(m) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


@dataclass(frozen=True)
class CliffordRep:
    """Matrix representation of the Cl(3) generators e_1, e_2, e_3."""

    dim: int
    basis: tuple

    @property
    def e1(self):
        return self.basis[0]

    @property
    def e2(self):
        return self.basis[1]

    @property
    def e3(self):
        return self.basis[2]

    def dot(self, vec) -> np.ndarray:
        """e . v for a numeric 3-vector."""
        return sum(v * e for v, e in zip(vec, self.basis))

    def residual(self) -> float:
        """Largest violation of e_j^2 = 1 and e_i e_j + e_j e_i = 0."""
        eye = np.eye(self.dim)
        worst = 0.0
        for i, ei in enumerate(self.basis):
            for j, ej in enumerate(self.basis):
                target = 2 * eye if i == j else 0 * eye
                worst = max(worst, max_abs(ei @ ej + ej @ ei - target))
        return worst


def pauli_basis() -> CliffordRep:
    return CliffordRep(dim=2, basis=PAULI)


@dataclass(frozen=True)
class GammaSet:
    gammas: tuple  # gamma_1 .. gamma_4
    lam: np.ndarray

    @property
    def gamma4(self):
        return self.gammas[3]


def build_gamma_set(rep: CliffordRep | None = None) -> GammaSet:
    """Off-diagonal sigma blocks for gamma_1..3, diag(1, -1) blocks for gamma_4,
    and the block-antidiagonal identity for Lambda."""
    rep = rep or pauli_basis()
    zero = np.zeros((2, 2), dtype=complex)
    gammas = [np.block([[zero, e], [e, zero]]) for e in rep.basis]
    gammas.append(np.block([[SIGMA_0, zero], [zero, -SIGMA_0]]))
    lam = np.block([[zero, SIGMA_0], [SIGMA_0, zero]])
    return GammaSet(gammas=tuple(gammas), lam=lam)


@dataclass(frozen=True)
class LinearizationCoeffs:
    """Coefficients of (A'E + B'_i P_i + C')(AE + B_j P_j + C) = 2E - P.P.

    ``B`` and ``Bprime`` hold the three spatial coefficients; B4/B5 (and primes)
    are the combinations i(A + C/2) and A - C/2 that fold the energy and
    constant terms into the condensed anticommutator.
    """

    A: np.ndarray
    Aprime: np.ndarray
    C: np.ndarray
    Cprime: np.ndarray
    B: tuple
    Bprime: tuple
    B4: np.ndarray
    B4prime: np.ndarray
    B5: np.ndarray
    B5prime: np.ndarray

    def condensed(self) -> tuple[list, list]:
        return (list(self.B) + [self.B4, self.B5],
                list(self.Bprime) + [self.B4prime, self.B5prime])

    def symbol(self, energy: float, k) -> tuple[np.ndarray, np.ndarray]:
        """The two first-order factors with P replaced by the wavevector k."""
        right = self.A * energy + sum(kj * bj for kj, bj in zip(k, self.B)) + self.C
        left = self.Aprime * energy + sum(kj * bj for kj, bj in zip(k, self.Bprime)) + self.Cprime
        return left, right


def build_leblond_coeffs(g: GammaSet, *, singular_tol: float = 1e-10) -> LinearizationCoeffs:
    """Coefficients from B_5 = -i Lam, B'_5 = -i Lam^-1, B_k = Lam g_k, B'_k = -g_k Lam^-1.

    A and C (and primes) are recovered from the B4/B5 definitions as
    A = (B5 - i B4)/2 and C = -(B5 + i B4).
    """
    lam = np.asarray(g.lam, dtype=complex)
    s = np.linalg.svd(lam, compute_uv=False)
    if s.min() <= singular_tol * max(1.0, s.max()):
        raise ValueError("Lambda is numerically singular; not a valid gamma set")
    lam_inv = np.linalg.inv(lam)

    B = [lam @ gk for gk in g.gammas]
    Bp = [-gk @ lam_inv for gk in g.gammas]
    B5, B5p = -1j * lam, -1j * lam_inv
    B4, B4p = B[3], Bp[3]

    A = 0.5 * (B5 - 1j * B4)
    C = -(B5 + 1j * B4)
    Ap = 0.5 * (B5p - 1j * B4p)
    Cp = -(B5p + 1j * B4p)
    return LinearizationCoeffs(A=A, Aprime=Ap, C=C, Cprime=Cp,
                               B=tuple(B[:3]), Bprime=tuple(Bp[:3]),
                               B4=B4, B4prime=B4p, B5=B5, B5prime=B5p)


RELATION_NAMES = (
    "A'A = 0",
    "A'C + C'A = 2",
    "C'C = 0",
    "A'B_j + B'_jA = 0",
    "B'_iB_j + B'_jB_i = -2delta_ij",
    "C'B_i + B'_iC = 0",
)


@dataclass
class FactorizationReport:
    residuals: dict = field(default_factory=dict)
    tol: float = DEFAULT_TOL

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values()) if self.residuals else 0.0

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol


def relation_residuals(c: LinearizationCoeffs) -> dict:
    """Residual of each of the six matrix relations implied by the factorization."""
    eye = np.eye(c.A.shape[0])
    A, Ap, C, Cp = c.A, c.Aprime, c.C, c.Cprime
    out = {
        RELATION_NAMES[0]: max_abs(Ap @ A),
        RELATION_NAMES[1]: max_abs(Ap @ C + Cp @ A - 2 * eye),
        RELATION_NAMES[2]: max_abs(Cp @ C),
        RELATION_NAMES[3]: max(max_abs(Ap @ b + bp @ A) for b, bp in zip(c.B, c.Bprime)),
        RELATION_NAMES[5]: max(max_abs(Cp @ b + bp @ C) for b, bp in zip(c.B, c.Bprime)),
    }
    worst = 0.0
    for i in range(3):
        for j in range(3):
            lhs = c.Bprime[i] @ c.B[j] + c.Bprime[j] @ c.B[i]
            worst = max(worst, max_abs(lhs + 2 * (i == j) * eye))
    out[RELATION_NAMES[4]] = worst
    return {name: out[name] for name in RELATION_NAMES}


def condensed_residual(c: LinearizationCoeffs) -> float:
    """B'_i B_j + B'_j B_i = -2 delta_ij over i, j = 1..5, plus the B4/B5 definitions."""
    eye = np.eye(c.A.shape[0])
    Bs, Bps = c.condensed()
    worst = 0.0
    for i in range(5):
        for j in range(5):
            worst = max(worst, max_abs(Bps[i] @ Bs[j] + Bps[j] @ Bs[i] + 2 * (i == j) * eye))
    worst = max(worst,
                max_abs(c.B4 - 1j * (c.A + 0.5 * c.C)),
                max_abs(c.B4prime - 1j * (c.Aprime + 0.5 * c.Cprime)),
                max_abs(c.B5 - (c.A - 0.5 * c.C)),
                max_abs(c.B5prime - (c.Aprime - 0.5 * c.Cprime)))
    return worst


def symbol_residual(c: LinearizationCoeffs, energy: float, k) -> float:
    k = np.asarray(k, dtype=float)
    left, right = c.symbol(energy, k)
    eye = np.eye(c.A.shape[0])
    return max_abs(left @ right - (2 * energy - k @ k) * eye)


def random_samples(n: int, seed: int = 0, scale: float = 3.0) -> list:
    rng = np.random.default_rng(seed)
    return [(float(rng.uniform(-scale, scale)), rng.uniform(-scale, scale, size=3))
            for _ in range(n)]


def verify_factorization(c: LinearizationCoeffs, samples, tol: float = DEFAULT_TOL) -> FactorizationReport:
    """Check every matrix relation, the condensed form and the scalar-symbol
    product at each (energy, wavevector) sample."""
    samples = list(samples)
    if not samples:
        raise ValueError("at least one (energy, wavevector) sample is required")
    report = FactorizationReport(tol=tol)
    report.residuals.update(relation_residuals(c))
    report.residuals["condensed"] = condensed_residual(c)
    report.residuals["symbol_product"] = max(symbol_residual(c, e, k) for e, k in samples)
    return report


def leblond_pair_blocks(energy: float, k, rep: CliffordRep | None = None):
    """Reference 2x2-block rows of the pair  s.k psi + 2i eta = 0,  s.k eta - iE psi = 0."""
    rep = rep or pauli_basis()
    sk = rep.dot(k)
    eye = np.eye(rep.dim)
    return (sk, 2j * eye), (-1j * energy * eye, sk)


@dataclass
class BlockReduction:
    top: tuple
    bottom: tuple
    matrix: np.ndarray
    deviation: float
    tol: float = DEFAULT_TOL

    @property
    def matches(self) -> bool:
        return self.deviation <= self.tol


def block_reduce(c: LinearizationCoeffs, energy: float, k, tol: float = DEFAULT_TOL) -> BlockReduction:
    """Assemble M(E, k) = AE + B_j k_j + C and split it into 2x2 blocks."""
    k = np.asarray(k, dtype=float)
    _, m = c.symbol(energy, k)
    n = m.shape[0] // 2
    top = (m[:n, :n], m[:n, n:])
    bottom = (m[n:, :n], m[n:, n:])
    ref_top, ref_bottom = leblond_pair_blocks(energy, k)
    dev = max(max_abs(a - b) for a, b in zip(top + bottom, ref_top + ref_bottom))
    return BlockReduction(top=top, bottom=bottom, matrix=m, deviation=dev, tol=tol)


def corrupted(c: LinearizationCoeffs, which: str = "B", index: int = 0, factor: float = 2.0) -> LinearizationCoeffs:
    """Copy of ``c`` with one coefficient scaled; used to exercise the verifier."""
    if which in ("B", "Bprime"):
        mats = list(getattr(c, which))
        mats[index] = factor * mats[index]
        return replace(c, **{which: tuple(mats)})
    return replace(c, **{which: factor * getattr(c, which)})


def foundations_report(n_samples: int = 100, seed: int = 0, tol: float = DEFAULT_TOL,
                       corrupt: bool = False) -> dict:
    """Run the whole foundations suite; returns name -> residual."""
    rep = pauli_basis()
    coeffs = build_leblond_coeffs(build_gamma_set(rep))
    if corrupt:
        coeffs = corrupted(coeffs)
    samples = random_samples(n_samples, seed)
    rep_report = verify_factorization(coeffs, samples, tol)
    out = {"clifford basis": rep.residual()}
    out.update(rep_report.residuals)
    out["block reduction"] = max(block_reduce(coeffs, e, k, tol).deviation for e, k in samples)
    return out
