"""Flat-torus grids, fields, field expressions, vielbeins and differential forms."""

from .expr import FieldExpr, parse_field_expr
from .forms import (DifferentialForm, clifford_action, codifferential, exterior_derivative, form_inner,
                    hodge_dual, index_tuples, local_gammas, matmul_fields, one_form,
                    volume_form, zero_form)
from .frame import Vielbein, flat_frame, vielbein_from_metric
from .grid import (ScalarField, SpinorField, TorusGrid, derivative, derivative_multi,
                   export_csv, inner, integrate, partial, random_band_limited)

__all__ = [
    "FieldExpr", "parse_field_expr", "DifferentialForm", "clifford_action", "codifferential",
    "exterior_derivative", "form_inner", "hodge_dual", "index_tuples", "local_gammas", "matmul_fields",
    "one_form", "volume_form", "zero_form", "Vielbein", "flat_frame", "vielbein_from_metric",
    "ScalarField", "SpinorField", "TorusGrid", "derivative", "derivative_multi", "export_csv",
    "inner", "integrate", "partial", "random_band_limited",
]
