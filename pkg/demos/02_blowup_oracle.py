"""
Watching a relation fail
========================

When a sequence-space relation fails, some family of finite sequences makes
the norm ratio grow like a power of the truncation size ``N``.  The oracle
evaluates a handful of such families and fits the growth exponent.
"""

# %%
import numpy as np

from modspace.indices import IndexPair
from modspace.witnesses import (WitnessFamily, blowup_probe, box, empirical_decide,
                                ratio)

P = IndexPair.of

# %%
# Two boxes convolved in ``l_2``: the ratio grows like ``N^{1/2}``.
for N in (8, 32, 128):
    r = ratio("convolution", P(2), (P(2), P(2)), (box(N), box(2 * N)))
    print(f"N={N:4d}  ratio={r:8.3f}  N^(1/2)={np.sqrt(N):7.3f}")

# %%
# The same family fitted on a log-log scale.
rep = blowup_probe("convolution", P(2), (P(2), P(2)), WitnessFamily("Box", ("box", "box2")))
print(rep.verdict.value, "slope", round(rep.slope, 3))

# %%
# ``l_1 * l_1 c l_1`` holds with constant one: every family stays flat.
res = empirical_decide("convolution", P(1), (P(1), P(1)))
print(res.verdict.value, [round(r.slope, 6) for r in res.reports])

# %%
# A holding relation whose ratios converge slowly looks like growth on small
# windows.  The far confirmation windows settle it.
out, ins = P(1, -2), (P(4, -1), P("inf"))
quick = empirical_decide("product", out, ins, confirm=False)
full = empirical_decide("product", out, ins)
print("base window:", quick.verdict.value, round(quick.worst.slope, 3))
print("confirmed:  ", full.verdict.value, round(full.worst.slope, 3))
