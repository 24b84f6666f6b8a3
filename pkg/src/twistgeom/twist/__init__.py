"""Minimally twisted spectral triple on the flat torus."""

from .operator import (SpinorOperator, group_terms, operator_deviation, random_spinors,
                       structural_deviation, sum_operators)
from .triple import (ALGEBRAIC_TOL, DERIVATIVE_TOL, NONVANISHING, FluctuationResult, NonEntangled,
                     RhoUnitaryCheck, RMatrix, TorsionGeneration, TwistedElement, TwistedOneForm,
                     adjoint_action, adjoint_with_product, build_R, chiral_diag, compose_torsion,
                     coexact_torsion, conjugate_by_J, dirac_free, dirac_with_torsion,
                     first_order_residual, flip, gauge_transform, generate_torsion,
                     hodge_identity_check, is_rho_unitary, is_rho_unitary_operator,
                     log_modulus_gradient, nonentangled_classify, order_zero_residual,
                     r_matrix, real_structure_inverse, real_structure_operator, represent,
                     rho_adjoint, rho_conj, rho_unitary_from, torsion_matrix, twisted_commutator,
                     twisted_fluctuation, twisted_product)

__all__ = [name for name in dir() if not name.startswith("_")]
