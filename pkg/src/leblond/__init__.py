"""Lévy-Leblond-type linearization toolkit.

Builds generalized Clifford momenta on finite-difference lattices, composes the
paired Hamiltonians they induce, checks them against closed forms and computes
their spectra.
"""
from .clifford import (CliffordRep, GammaSet, LinearizationCoeffs, build_gamma_set, build_leblond_coeffs,
                       pauli_basis, verify_factorization)
from .gauge import (CliffordMomentum, ConstantImaginary, RadialScalar, SpinMatrixConstant, SusyLinear,
                    ZeroGauge, build_momentum)
from .hamiltonians import (CustomPair, Dresselhaus, FreeParticle, HamiltonianPair, RadialInverse,
                           RadialOscillator, Rashba, Susy1D, closed_form, compose_pair, constructed_pair,
                           equivalence_report)
from .lattice import Grid, SpinorField

__version__ = "0.1.0"
