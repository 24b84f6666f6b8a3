"""Build the chiral gammas, measure the product-formula sign and kappa."""

from __future__ import annotations

from twistgeom.clifford import (euclidean_gammas, gamma_suite, grading_product_sign, hodge_kappa,
                                real_structure_dim4)

for m in (1, 2, 3):
    rep = euclidean_gammas(m)
    worst = max(gamma_suite(rep).values())
    print(f"m={m}: {rep.dim}x{rep.dim} gammas, worst identity residual {worst:.1e}, "
          f"product sign {grading_product_sign(rep):+d}, kappa {hodge_kappa(rep):.3g}")

J = real_structure_dim4(euclidean_gammas(2))
print("KO signs (eps, eps', eps''):", J.ko_signs)
