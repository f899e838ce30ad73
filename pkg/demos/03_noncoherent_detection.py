"""
Two-slot noncoherent detection
==============================

Slot 1 carries a fixed reference per user, slot 2 the data.  The receiver
never estimates the channel: it only uses the energies of the two received
vectors and their inner product, and searches the sum grid.
"""

import numpy as np

from ncsimo.channel import ChannelRealization, apply_channel, complex_normal, stream
from ncsimo.linkdesign import UserProfile, optimal_design
from ncsimo.modem import RxBlock, assemble_codeword, detect_ncml

profiles = [UserProfile(P=1.0, beta=1.0), UserProfile(P=2.0, beta=1.0)]
sigma2 = 0.05
design = optimal_design(profiles, sigma2)
ucs = design.constellation()
beta = np.array([u.beta for u in profiles])

rng = stream(0, "data")
for M in (4, 16, 64, 256):
    errors, n = 0, 2000
    G = complex_normal(stream(0, "fading", M), (n, M, 2))
    noise = complex_normal(stream(0, "noise", M), (n, M, 2))
    for i in range(n):
        word = rng.integers(0, 2, 4)
        tx = assemble_codeword(word, design, profiles, ucs)
        Y = apply_channel(tx.X, ChannelRealization(G=G[i], beta=beta), sigma2, noise=noise[i])
        _, word_hat = detect_ncml(RxBlock.from_matrix(Y), design, profiles, ucs, sigma2)
        errors += int(np.sum(word_hat != word))
    print(f"M = {M:4d}: BER = {errors / (4 * n):.4f}")
