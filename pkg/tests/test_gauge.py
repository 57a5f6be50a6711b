import numpy as np
import pytest

from leblond import gauge as gg
from leblond.clifford import PAULI
from leblond.lattice import Grid, hermiticity_deviation

G3 = Grid(3, 8, 2.0)
G1 = Grid(1, 32, 3.0)


def test_sign_flag_validated():
    with pytest.raises(ValueError):
        gg.ConstantImaginary((0, 0, 1), sign=2)
    with pytest.raises(ValueError):
        gg.SusyLinear(-1.0)
    with pytest.raises(ValueError):
        gg.RadialScalar(1.0, "exp")
    with pytest.raises(ValueError):
        gg.ConstantImaginary((1, 2))


@pytest.mark.parametrize("g", [gg.ZeroGauge(), gg.ConstantImaginary((0.1, 0.2, 0.3)),
                               gg.RadialScalar(0.5, "1/r"), gg.SusyLinear(2.0, -1)])
def test_conjugation_is_an_involution(g):
    assert gg.conjugate_gauge(gg.conjugate_gauge(g)) == g


def test_spin_matrix_gauge_equality_and_padding():
    a = gg.SpinMatrixConstant((PAULI[0],))
    b = gg.SpinMatrixConstant((PAULI[0], np.zeros((2, 2)), np.zeros((2, 2))))
    assert a == b and hash(a) == hash(b)
    assert len(a.matrices) == 3
    with pytest.raises(ValueError):
        gg.SpinMatrixConstant((np.eye(3),))


def test_compatibility_checks():
    with pytest.raises(ValueError):
        gg.build_momentum(gg.SusyLinear(1.0), G3)
    with pytest.raises(ValueError):
        gg.build_momentum(gg.RadialScalar(1.0), G1)
    with pytest.raises(ValueError):
        gg.build_momentum(gg.RadialScalar(1.0, "1/r"), Grid(3, 8, 2.0, offset=False))
    with pytest.raises(ValueError):
        gg.build_momentum(gg.ConstantImaginary((0, 0, 1)), G1)


def test_constant_imaginary_values():
    vals = gg.scalar_gauge_values(gg.ConstantImaginary((0.0, 2.0, 0.0)), G3)
    assert vals[0] is None and vals[1] == -2j and vals[2] is None


def test_real_gauge_momentum_is_hermitian():
    # A = i omega X is anti-Hermitian as a multiplier; the momentum then is not Hermitian
    p = gg.build_momentum(gg.SusyLinear(1.0), G1)
    assert hermiticity_deviation(p.operator, 2) > 0.1
    free = gg.build_momentum(gg.ZeroGauge(), G3)
    assert hermiticity_deviation(free.operator, 2) <= 1e-14


def test_conjugate_pair_uses_exact_adjoint():
    a = gg.RadialScalar(0.8, "r")
    pa, pb = gg.momentum_pair(a, gg.conjugate_gauge(a), G3)
    ma, mb = pa.to_sparse().toarray(), pb.to_sparse().toarray()
    assert np.allclose(mb, ma.conj().T, atol=1e-14)


def test_dresselhaus_type_gauge_cancels():
    g = gg.SpinMatrixConstant((0.5 * PAULI[0], -0.5 * PAULI[1]))
    assert np.allclose(gg.gauge_spin_sum(g), 0)
    p = gg.build_momentum(g, G3)
    assert any(n.startswith("spin-gauge-cancellation") for n in p.notes)
    free = gg.build_momentum(gg.ZeroGauge(), G3)
    v = np.random.default_rng(1).normal(size=(2,) + G3.shape)
    assert np.allclose(p.apply(v), free.apply(v))


def test_non_cancelling_spin_gauge_has_no_note():
    g = gg.SpinMatrixConstant((PAULI[1],))
    assert gg.build_momentum(g, G3).notes == []
