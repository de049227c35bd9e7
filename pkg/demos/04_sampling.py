"""
Sampling band-limited functions
===============================

A function with spectrum inside ``|xi| <= 1/4`` is determined by its values
on the integers.  Shannon reconstruction with a smooth cutoff recovers it,
and weighted ``L_p`` norms match the ``l_p`` norms of the samples.
"""

# %%
import numpy as np

from modspace.lattice import Sequence, weighted_norm
from modspace.sampling import (COMB_ATOM, RECONSTRUCTION_CUTOFF, comb, make_window, sample,
                               sample_values, shannon_reconstruct, weighted_Lp_norm)

atom = make_window(COMB_ATOM)
psi = make_window(RECONSTRUCTION_CUTOFF)
f = comb(Sequence.from_dict({(-3,): 0.5, (0,): 1.0, (4,): 0.8}), atom)

# %%
# Round trip through the integer samples.
g = shannon_reconstruct(sample(f), psi)
err = np.abs(g.values - f.values).max() / np.abs(f.values).max()
print(f"relative reconstruction error: {err:.2e}")

# %%
# Norm of the function against the norm of its samples.
seq = sample_values(f)
for p, t in (("1", 0), ("2", 1), ("inf", -1)):
    print(f"p={p:>3} t={t:2d}  L_p / l_p = {weighted_Lp_norm(f, p, t) / weighted_norm(seq, p, t):.4f}")
