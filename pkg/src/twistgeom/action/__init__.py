"""Fermionic and spectral actions of the minimally twisted torus."""

from .fermionic import (ClosedFormComparison, FermionicConfig, LorentzInvariance, SignatureResult,
                        compare_closed_form, eigen_projection, eigenspinor, fermionic_closed_form,
                        fermionic_form, lorentz_invariance, lorentz_suite, random_lorentz_parameters,
                        reduction_matrices, reduction_residuals, signature_classify, symmetry_ratio,
                        weyl_operator)
from .spectral import (FourierSpectralResult, SeeleyDeWittResult, fit_expansion,
                       fourier_spectral_action, heat_coefficients, heat_trace, laplace_form,
                       mode_matrix, trace_invariance)

__all__ = [name for name in dir() if not name.startswith("_")]
