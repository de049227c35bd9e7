"""
Two ways to measure a modulation norm
=====================================

Functions live on a periodic grid wide enough that they vanish near the
edges.  The discrete norm slices the spectrum with a smooth partition of
unity; the continuous norm integrates the short-time Fourier transform.
The two agree up to a moderate constant.
"""

# %%
import numpy as np

from modspace.lattice import Sequence, weighted_norm
from modspace.sampling import (ANALYSIS_WINDOW, COMB_ATOM, band_limited_corpus, gabor_comb,
                               make_window, modulation_norm_continuous,
                               modulation_norm_discrete, sigma_partition, stft_magnitude)

M = 2048
atom = make_window(COMB_ATOM, M=M)
window = make_window(ANALYSIS_WINDOW, M=M)
P = sigma_partition(8, M=M)
print("partition defect:", P.defect())

# %%
# A Gabor comb ``h(x) sum_k a_k e^{2 pi i k x}`` puts one bump of energy near
# each frequency ``k``; its STFT magnitude peaks there.
a = Sequence.from_dict({(-2,): 1.0, (1,): 0.5, (3,): 0.25})
f = gabor_comb(a, atom)
V = stft_magnitude(f, window)
peak = V.xi[np.argmax(V.values.max(axis=1)), 0]
print("strongest frequency:", peak)

# %%
# Its modulation norm tracks the weighted sequence norm of ``a``.
for q, s in (("1", 0), ("2", 1), ("inf", -1)):
    ratio = modulation_norm_discrete(f, 2, q, 0, s, P) / weighted_norm(a, q, s)
    print(f"q={q:>3} s={s:2d}  norm / ||a||_(q,s) = {ratio:.4f}")

# %%
# Continuous against discrete norms over a small random corpus.
ratios = []
for g in band_limited_corpus(6, seed=0, M=M):
    cont = modulation_norm_continuous(g, window, 1, 2, 1, 0)
    disc = modulation_norm_discrete(g, 1, 2, 1, 0, P)
    ratios.append(cont / disc)
print("continuous / discrete:", np.round(ratios, 3))
