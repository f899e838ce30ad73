"""
Closed-form power and distance design
=====================================

Users are ranked by received budget P*beta.  The weakest budget relative to
its sub-constellation energy fixes the minimum distance d, and every user
then transmits with p_k = 1/(sqrt(E_k) d).  A brute-force grid over powers
and all assignments confirms nothing beats it.
"""

import numpy as np

from ncsimo.channel import noise_power, RadioParams
from ncsimo.linkdesign import (UserProfile, design_objective, grid_search_design, gram_stats,
                               min_kl_closed_form, optimal_design, sort_users)
from ncsimo.modem import min_kl_over_codebook

# three users at 25 dBm with different path gains (linear)
profiles = [UserProfile(P=0.316, beta=b) for b in (3e-11, 2e-12, 8e-12)]
order = sort_users(profiles)
ranked = [profiles[i] for i in order]
print("sorted order of the input users:", order + 1)

sigma2 = noise_power(RadioParams())
design = optimal_design(ranked, sigma2)
print("d =", design.d)
print("p =", design.p, " assignment:", design.perm)

g = gram_stats(design, sigma2)
print("a = %.6g, b = %.6g (equal at the optimum)" % (g.a, g.b))

# the grid oracle searches every assignment and a power grid
grid = grid_search_design(ranked, sigma2)
print("closed form objective:", design_objective(design.p, design.d, sigma2))
print("grid search objective:", design_objective(grid.p, grid.d, sigma2), " assignment:", grid.perm)

# the smallest pairwise KL distance equals the closed form
value, (c, ct) = min_kl_over_codebook(design, ranked, sigma2)
print("min KL (exhaustive) = %.6g  between %s and %s" % (value, np.round(c, 15), np.round(ct, 15)))
print("min KL (formula)    = %.6g" % min_kl_closed_form(design, sigma2))
