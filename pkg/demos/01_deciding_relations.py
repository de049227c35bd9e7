"""
Deciding products, convolutions and embeddings
==============================================

Every question about modulation spaces reduces to two conditions on index
pairs, one for the spatial side ``(p, t)`` and one for the frequency side
``(q, s)``.  The conditions are checked with exact rationals.
"""

# %%
# A space is written ``p,q,s,t``; the product of two copies of ``M_{inf,1}``
# stays in ``M_{inf,1}``, which is the classical algebra property.
from modspace.indices import (IndexPair, RelationQuery, SpaceIndex, cond_holder_weighted,
                              cond_young_weighted, decide_relation, holder_margin)


def space(p, q, s=0, t=0):
    return SpaceIndex(IndexPair.of(p, t), IndexPair.of(q, s))


algebra = RelationQuery("modulation", "product", 1, (space("inf", 1),) * 2, space("inf", 1))
v = decide_relation(algebra)
print("M_{inf,1} . M_{inf,1} c M_{inf,1}:", v.holds, v.spatial.tag, v.frequency.tag)

# %%
# ``M_{2,2} = L^2`` is not closed under products; the frequency side fails.
l2 = RelationQuery("modulation", "product", 1, (space(2, 2),) * 2, space(2, 2))
v = decide_relation(l2)
print("M_{2,2} . M_{2,2} c M_{2,2}:", v.holds, "frequency side holds:", v.frequency.holds)

# %%
# Weights can rescue a relation.  On the sequence level ``l_{2,1} . l_{2,1}``
# lands in ``l_1`` but the unweighted ``l_4 . l_4`` does not, and the margin
# says by how much it fails.
out = IndexPair.of(1, 0)
print(cond_holder_weighted(out, IndexPair.of(2, 1), IndexPair.of(2, 1), 1))
print(cond_holder_weighted(out, IndexPair.of(4, 0), IndexPair.of(4, 0), 1))
print("margin:", holder_margin(out, IndexPair.of(4, 0), IndexPair.of(4, 0), 1))

# %%
# Young's inequality with weights: ``l_{1,1} * l_{1,1}`` sits in ``l_{1,1}``.
print(cond_young_weighted(IndexPair.of(1, 1), IndexPair.of(1, 1), IndexPair.of(1, 1), 1))

# %%
# Embeddings compare one space with another, side by side.
emb = RelationQuery("modulation", "embedding", 1, (space(2, 2, 1, 1),), space(1, 1))
print("M^{1,1}_{2,2} c M_{1,1}:", decide_relation(emb).holds)
