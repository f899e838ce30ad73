"""
Multilevel QPSK sub-constellations and their sum
================================================

Each user owns a scaled QPSK set; user k's set is twice as large as user
k-1's.  Adding one point from every set tiles a square QAM grid with no
collisions, so the receiver can split the sum back into per-user symbols.
"""

import numpy as np

from ncsimo.udcg import build_sub_constellations, decompose, min_distance

# three users, unit minimum distance: 64 sum points
ucs = build_sub_constellations(3, d=1.0)
print("sub-constellation energies E_k:", ucs.energies)
print("sum points:", ucs.size, " min distance:", min_distance(ucs.sum_points))

# pick one symbol per user, add, and split again
parts = ucs.subsets[np.arange(3), [2, 0, 3]]
point = parts.sum()
print("per-user symbols:", parts)
print("sum point       :", point)
print("decomposed      :", decompose(point, ucs))

# points that are not on the grid are refused
try:
    decompose(point + 0.25, ucs)
except ValueError as exc:
    print("off-grid:", exc)

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, ax = plt.subplots(figsize=(4, 4))
    ax.scatter(ucs.sum_points.real, ucs.sum_points.imag, s=12, c="0.6", label="sum")
    for k in range(3):
        ax.scatter(ucs.subsets[k].real, ucs.subsets[k].imag, s=30, label=f"user {k + 1}")
    ax.set_aspect("equal")
    ax.legend(fontsize=7)
    fig.savefig("sum_constellation.png", dpi=120)
    print("wrote sum_constellation.png")
