import numpy as np
import pytest
import scipy.sparse as sp
import sympy
from hypothesis import given, settings, strategies as st

from leblond import hamiltonians as hf
from leblond import spectral as se
from leblond.lattice import Grid, Stencil


def _box(n=60, width=1.0):
    grid = Grid(1, n, width)
    h = grid.spacing
    return grid, Stencil(grid, 0, {-1: -0.5 / h ** 2, 0: 1.0 / h ** 2, 1: -0.5 / h ** 2})


def _box_levels(grid, count):
    # -1/2 f'' with the 3-point stencil and zero Dirichlet walls
    h, n = grid.spacing, grid.n
    j = np.arange(1, count + 1)
    return (1 - np.cos(j * np.pi / (n + 1))) / h ** 2


def test_dense_box_levels():
    grid, op = _box()
    spec = se.dense_spectrum(op, want_vectors=True, count=8)
    assert np.allclose(spec.eigenvalues, _box_levels(grid, 8), rtol=1e-12)
    assert np.all(spec.residuals < 1e-10 * np.max(spec.eigenvalues))


def test_lanczos_box_levels():
    grid, op = _box(200)
    spec = se.lowest_eigenpairs(op, 5, tol=1e-9)
    assert spec.converged and spec.distinct
    assert np.allclose(spec.eigenvalues, _box_levels(grid, 5), rtol=1e-10)


def test_shift_invert_box_levels():
    grid, op = _box(200)
    spec = se.lowest_eigenpairs(op, 5, tol=1e-10, shift=-0.5)
    assert np.allclose(spec.eigenvalues, _box_levels(grid, 5), rtol=1e-10)


def test_dense_matches_numpy_on_random_hermitian():
    rng = np.random.default_rng(4)
    a = rng.normal(size=(40, 40)) + 1j * rng.normal(size=(40, 40))
    h = a + a.conj().T
    spec = se.dense_spectrum(h, want_vectors=True)
    assert np.allclose(spec.eigenvalues, np.linalg.eigvalsh(h))
    assert np.max(spec.residuals) < 1e-10


def test_lanczos_matches_dense_on_sparse_matrix():
    rng = np.random.default_rng(1)
    n = 300
    d = np.sort(rng.uniform(0, 10, n))
    off = rng.normal(size=n - 1) * 0.3
    m = sp.diags([off, d, off], [-1, 0, 1]).tocsr()
    ref = np.linalg.eigvalsh(m.toarray())[:6]
    spec = se.lowest_eigenpairs(m, 6, tol=1e-9, maxiter=300)
    assert np.allclose(spec.eigenvalues, ref, atol=1e-8)


def test_identity_is_fully_degenerate():
    spec = se.dense_spectrum(np.eye(5))
    assert np.allclose(spec.eigenvalues, 1.0)
    assert se.distinct_levels(spec.eigenvalues) == [(1.0, 5)]


def test_non_hermitian_rejected():
    m = np.array([[0, 1], [0, 0]], dtype=complex)
    with pytest.raises(se.NonHermitianError):
        se.dense_spectrum(m)
    with pytest.raises(se.NonHermitianError):
        se.lowest_eigenpairs(np.triu(np.ones((50, 50))), 2)


def test_dense_cap():
    _, op = _box(60)
    with pytest.raises(ValueError, match="cap"):
        se.dense_spectrum(op, cap=10)


def test_convergence_error_carries_partial_spectrum():
    _, op = _box(400)
    with pytest.raises(se.ConvergenceError) as err:
        se.lowest_eigenpairs(op, 5, tol=1e-12, maxiter=12)
    assert err.value.spectrum is not None
    assert not err.value.spectrum.converged


def test_periodic_free_ground_state_is_zero():
    pair = hf.constructed_pair(hf.FreeParticle(), Grid(3, 8, 2.0, offset=False, boundary="periodic"))
    spec = se.lowest_eigenpairs(pair.h_psi, 1, tol=1e-10)
    assert abs(spec.eigenvalues[0]) < 1e-10


def test_staggering_index_separates_doublers():
    grid = Grid(1, 64, 4.0)
    x = grid.coords()
    smooth = np.exp(-x ** 2)
    stag = smooth * (-1) ** np.arange(grid.n)
    assert se.staggering_index(grid, smooth)[0] > 0.9
    assert se.staggering_index(grid, stag)[0] < -0.9
    assert list(se.physical_mask(grid, [smooth, stag])) == [True, False]


def test_susy_eta_ground_state_and_ladder():
    pair = hf.constructed_pair(hf.Susy1D(2.0), Grid(1, 1024, 8.0, order=8))
    r = se.susy_degeneracy_check(pair, m=5, tol=1e-6, scale=2.0, method="dense")
    lad = se.susy_ladder_check(r, 2.0, levels=4)
    assert r.paired and lad["ladder_ok"] and lad["eta_ground_ok"]
    assert r.kernel_dims["eta"] >= 1 and r.kernel_dims["psi"] == 0


def test_free_particle_pairs_trivially():
    pair = hf.constructed_pair(hf.FreeParticle(), Grid(1, 64, 4.0))
    r = se.susy_degeneracy_check(pair, m=6, tol=1e-10, filter_doublers=False, method="dense")
    assert r.paired and r.max_deviation == 0.0


def test_pair_consistency():
    pair = hf.constructed_pair(hf.Susy1D(1.0), Grid(1, 512, 8.0, order=8))
    spec = se.block_spectrum(pair.h_psi, 4, "dense")
    for c in se.pair_consistency_sweep(pair, spec):
        assert c.residual < 1e-8
        assert c.eta_residual is None or c.eta_residual < 1e-8
    pa, pb = pair.momenta
    zero = se.pair_consistency_check(pa, pb, 1.0, np.zeros((2, 512)))
    assert not zero.applicable
    with pytest.raises(ValueError, match="eigenpair"):
        se.pair_consistency_check(pa, pb, 0.123, spec.fields(pair.grid, 2)[0])


def test_block_spectrum_rejects_unknown_method():
    _, op = _box()
    with pytest.raises(ValueError):
        se.block_spectrum(op, 2, "qr")


# -- dispersion ---------------------------------------------------------------

def test_rashba_dispersion_example():
    curves = se.dispersion(hf.Rashba((0, 0, 1)), [[1.0, 0, 0]])
    assert np.allclose(curves["psi"].branches[0], [0.0, 2.0], atol=1e-14)


def test_dresselhaus_dispersion_example():
    curves = se.dispersion(hf.Dresselhaus(2.0), [[0, 1.0, 0]])
    assert np.allclose(curves["eta"].branches[0], [-0.5, 1.5], atol=1e-14)


@given(k=st.lists(st.floats(-3, 3, allow_nan=False), min_size=3, max_size=3),
       a=st.lists(st.floats(-2, 2, allow_nan=False), min_size=3, max_size=3))
@settings(max_examples=40, deadline=None)
def test_rashba_dispersion_is_inversion_symmetric(k, a):
    k = np.array(k)
    c = se.dispersion(hf.Rashba(tuple(a)), np.stack([k, -k]))
    assert np.allclose(c["psi"].branches[0], c["psi"].branches[1], atol=1e-12)


def test_dispersion_rejects_varying_models():
    from leblond.lattice import SpatiallyVaryingError
    with pytest.raises(SpatiallyVaryingError):
        se.dispersion(hf.RadialOscillator(1.0), [0.0])


def test_k_path_endpoints():
    ks = se.k_path((0, 0, 0), (2, 0, 0), 51)
    assert ks.shape == (51, 3) and ks[-1, 0] == 2.0 and ks[25, 0] == pytest.approx(1.0)


# -- sigma.L channels -----------------------------------------------------------

@pytest.mark.parametrize("l", range(4))
def test_sigma_dot_l_against_coupling_rule(l):
    # sigma.L = J^2 - L^2 - S^2 (in units with S = sigma/2, times 2), j = l +- 1/2
    expected = {}
    for j in ([sympy.Rational(1, 2)] if l == 0 else [l + sympy.Rational(1, 2), l - sympy.Rational(1, 2)]):
        kappa = j * (j + 1) - l * (l + 1) - sympy.Rational(3, 4)
        expected[int(kappa)] = int(2 * j + 1)
    assert dict(se.sigma_dot_l_channel_eigs(l)) == expected


@pytest.mark.parametrize("l", range(7))
def test_channel_completeness(l):
    eigs = dict(se.sigma_dot_l_channel_eigs(l))
    assert sum(eigs.values()) == 2 * (2 * l + 1)
    assert set(eigs) <= {l, -(l + 1)}


def test_channel_spec_validation():
    with pytest.raises(ValueError):
        se.ChannelSpec(0, -1)
    with pytest.raises(ValueError):
        se.ChannelSpec(2, 1)
    with pytest.raises(ValueError):
        se.sigma_dot_l_channel_eigs(-1)


def test_radial_oscillator_ground_channel():
    spec = se.radial_channel_spectrum(hf.RadialOscillator(1.0), se.ChannelSpec(1, 1), "psi", m_levels=2)
    expected = [se.oscillator_level(1.0, 1, 1, n, "psi") for n in range(2)]
    assert np.allclose(spec.eigenvalues, expected, atol=1e-3)


def test_radial_inverse_channels_bounded():
    rows = se.radial_channel_report(hf.RadialInverse(-0.5), 3)
    assert all(r["bounded_below"] for r in rows)
    assert min(r["coefficient"] for r in rows) >= -0.125


def test_fall_to_center_raises(monkeypatch):
    monkeypatch.setattr(se, "inverse_square_coefficient", lambda m, ch, block: -0.2)
    with pytest.raises(se.FallToCenterError):
        se.radial_channel_spectrum(hf.RadialInverse(0.5), se.ChannelSpec(0, 0), "psi")
    rows = se.radial_channel_report(hf.RadialInverse(0.5), 0)
    assert not any(r["bounded_below"] for r in rows)


def test_radial_needs_radial_model():
    with pytest.raises(ValueError):
        se.channel_potential(hf.Rashba(), se.ChannelSpec(0, 0), "psi", np.ones(3))
    with pytest.raises(ValueError):
        se.oscillator_level(1.0, 0, 0, 0, "chi")
