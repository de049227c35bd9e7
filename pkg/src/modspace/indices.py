"""Exact index algebra and sharp conditions for power-weighted relations.

Every exponent is stored through its reciprocal as a :class:`fractions.Fraction`
(``recip == 0`` encodes ``p = inf``), so all clauses of the condition sets,
including the endpoint equalities, are decided exactly.

The discrete predicates live on weighted sequence spaces ``l_{q,s}`` over
``Z^n`` with weight ``<k>^s``:

* :func:`cond_holder_weighted`   -- ``l_{q1,s1} . l_{q2,s2} c l_{q,s}`` (B1, B2)
* :func:`cond_young_weighted`    -- ``l_{q1,s1} * l_{q2,s2} c l_{q,s}`` (A1..A4)
* :func:`cond_embedding`         -- ``l_{q1,s1} c l_{q2,s2}`` (C1, C2)
* :func:`cond_young_unweighted_multilinear`, :func:`cond_holder_lr_multilinear`

:func:`decide_relation` composes them into verdicts for products, convolutions
and embeddings of modulation spaces ``M^{s,t}_{p,q}`` and Wiener amalgam
spaces ``W^{s,t}_{p,q}``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

__all__ = [
    "Exponent",
    "IndexPair",
    "SpaceIndex",
    "ConditionTag",
    "Family",
    "Kind",
    "RelationQuery",
    "Verdict",
    "RelationVerdict",
    "OutOfRange",
    "UnsupportedQuery",
    "as_rational",
    "cond_holder_weighted",
    "cond_young_weighted",
    "cond_embedding",
    "cond_young_unweighted_multilinear",
    "cond_holder_lr_multilinear",
    "lr_membership",
    "decide_relation",
    "holder_margin",
    "young_margin",
]

Rational = Union[Fraction, int, str]


class OutOfRange(ValueError):
    """An index lies outside the range on which a condition set is stated."""


class UnsupportedQuery(OutOfRange):
    """The query is well formed but no sharp condition set is available."""


def as_rational(value) -> Fraction:
    """Coerce ints, ``Fraction`` and strings like ``"3/2"`` to ``Fraction``.

    Floats are rejected: endpoint clauses need exact values.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


@dataclass(frozen=True)
class Exponent:
    """A Lebesgue index ``p`` in ``(0, inf]`` stored as ``recip = 1/p``."""

    recip: Fraction

    def __post_init__(self):
        r = as_rational(self.recip)
        if r < 0:
            raise ValueError(f"reciprocal exponent must be >= 0, got {r}")
        object.__setattr__(self, "recip", r)

    @classmethod
    def of(cls, p) -> "Exponent":
        """Build from ``p`` itself: ``Exponent.of(2)``, ``Exponent.of("3/2")``,
        ``Exponent.of("inf")`` or an existing :class:`Exponent`."""
        if isinstance(p, Exponent):
            return p
        if isinstance(p, str) and p.strip().lower() in ("inf", "infinity", "oo"):
            return cls(Fraction(0))
        if isinstance(p, float) and math.isinf(p):
            return cls(Fraction(0))
        p = as_rational(p)
        if p <= 0:
            raise ValueError(f"exponent must be positive, got {p}")
        return cls(1 / p)

    @classmethod
    def inf(cls) -> "Exponent":
        return cls(Fraction(0))

    @property
    def is_infinite(self) -> bool:
        return self.recip == 0

    def is_banach(self) -> bool:
        return self.recip <= 1

    @property
    def p(self) -> Union[Fraction, float]:
        """The exponent itself (``math.inf`` for ``recip == 0``)."""
        return math.inf if self.recip == 0 else 1 / self.recip

    def conjugate(self) -> "Exponent":
        """Hoelder conjugate ``p'``; only defined for ``p >= 1``."""
        if not self.is_banach():
            raise OutOfRange(f"no conjugate exponent for p = {self}")
        return Exponent(1 - self.recip)

    def __float__(self) -> float:
        return float(self.p)

    def __str__(self) -> str:
        return "inf" if self.recip == 0 else str(1 / self.recip)


@dataclass(frozen=True)
class IndexPair:
    """``(q, s)``: the space ``l_{q,s}`` with power weight ``<k>^s``."""

    q: Exponent
    s: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "q", Exponent.of(self.q))
        object.__setattr__(self, "s", as_rational(self.s))

    @classmethod
    def of(cls, q, s=0) -> "IndexPair":
        return cls(Exponent.of(q), as_rational(s))

    @property
    def u(self) -> Fraction:
        """Reciprocal exponent ``1/q``."""
        return self.q.recip

    def level(self, n: int) -> Fraction:
        """The scaling level ``1/q + s/n``."""
        return self.q.recip + self.s / n

    def __str__(self) -> str:
        return f"({self.q},{self.s})"


@dataclass(frozen=True)
class SpaceIndex:
    """Indices of ``M^{s,t}_{p,q}`` or ``W^{s,t}_{p,q}``.

    ``spatial`` is ``(p, t)`` (weight ``<x>^t``), ``frequency`` is ``(q, s)``
    (weight ``<xi>^s``).
    """

    spatial: IndexPair
    frequency: IndexPair

    @classmethod
    def of(cls, p, q, s=0, t=0) -> "SpaceIndex":
        return cls(IndexPair.of(p, t), IndexPair.of(q, s))

    def __str__(self) -> str:
        p, q = self.spatial, self.frequency
        return f"p={p.q},q={q.q},s={q.s},t={p.s}"


class ConditionTag(str, enum.Enum):
    A1 = "A1"
    A2 = "A2"
    A3 = "A3"
    A4 = "A4"
    B1 = "B1"
    B2 = "B2"
    C1 = "C1"
    C2 = "C2"
    YoungS = "YoungS"
    HolderLr = "HolderLr"

    def __str__(self) -> str:
        return self.value


class Family(str, enum.Enum):
    MODULATION = "modulation"
    WIENER = "wiener"


class Kind(str, enum.Enum):
    PRODUCT = "product"
    CONVOLUTION = "convolution"
    EMBEDDING = "embedding"


@dataclass(frozen=True)
class Verdict:
    """Outcome of one discrete condition set."""

    holds: bool
    tag: ConditionTag | None = None
    notes: str = ""

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "tag": None if self.tag is None else self.tag.value,
            "notes": self.notes,
        }


@dataclass(frozen=True)
class RelationVerdict:
    """Verdict on a function-space relation with one tag per side."""

    holds: bool
    spatial: Verdict
    frequency: Verdict
    notes: str = ""

    def __post_init__(self):
        if self.holds and (self.spatial.tag is None or self.frequency.tag is None):
            raise ValueError("a holding relation needs a matched tag on both sides")

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "spatial": self.spatial.to_dict(),
            "frequency": self.frequency.to_dict(),
            "notes": self.notes,
        }


@dataclass(frozen=True)
class RelationQuery:
    """``X_1 (op) ... (op) X_J c X`` for one family of spaces."""

    family: Family
    kind: Kind
    dim: int
    inputs: tuple[SpaceIndex, ...]
    output: SpaceIndex

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "inputs", tuple(self.inputs))
        if not isinstance(self.dim, int) or self.dim < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.dim!r}")
        J = len(self.inputs)
        if self.kind is Kind.EMBEDDING and J != 1:
            raise ValueError("an embedding takes exactly one input space")
        if self.kind is not Kind.EMBEDDING and J < 2:
            raise ValueError("products and convolutions need at least two inputs")


# -- discrete condition sets -------------------------------------------------


def _check_dim(dim: int) -> int:
    if not isinstance(dim, int) or dim < 1:
        raise ValueError(f"dimension must be a positive integer, got {dim!r}")
    return dim


def cond_holder_weighted(out: IndexPair, in1: IndexPair, in2: IndexPair,
                         dim: int = 1) -> Verdict:
    """Sharp condition for ``l_{q1,s1} . l_{q2,s2} c l_{q,s}`` (B1 or B2)."""
    n = _check_dim(dim)
    u, u1, u2 = out.u, in1.u, in2.u
    if u > u1 + u2:
        if out.level(n) < in1.level(n) + in2.level(n):
            return Verdict(True, ConditionTag.B1)
        return Verdict(False, notes="1/q > 1/q1+1/q2 but level inequality of B1 fails")
    if out.s <= in1.s + in2.s:
        return Verdict(True, ConditionTag.B2)
    return Verdict(False, notes="1/q <= 1/q1+1/q2 but s > s1+s2")


def _young_range(*pairs: IndexPair) -> None:
    for pr in pairs:
        if not pr.q.is_banach():
            raise OutOfRange(
                f"weighted Young conditions need 1 <= q <= inf, got q = {pr.q}")


def _a1(o: IndexPair, a: IndexPair, b: IndexPair, n: int) -> tuple[bool, str]:
    al, al1, al2 = o.level(n), a.level(n), b.level(n)
    zero = Fraction(0)
    if not (o.s <= a.s and o.s <= b.s and 0 <= a.s + b.s):
        return False, ""
    if not 1 + max(al, zero) < max(al1, zero) + max(al2, zero):
        return False, ""
    if not (al <= al1 and al <= al2 and 1 <= al1 + al2):
        return False, ""
    active = []
    if al == al1:
        active.append("q,s=q1,s1")
        if (o.q, o.s) != (a.q, a.s):
            return False, ""
    if al == al2:
        active.append("q,s=q2,s2")
        if (o.q, o.s) != (b.q, b.s):
            return False, ""
    if al1 + al2 == 1:
        active.append("q1',-s1=q2,s2")
        if (a.q.conjugate(), -a.s) != (b.q, b.s):
            return False, ""
    note = ""
    if len(active) > 1:
        note = "A1 endpoint sub-clauses conjoined: " + "; ".join(active)
    return True, note


def _a2(o: IndexPair, a: IndexPair, b: IndexPair) -> bool:
    if not (o.s == 0 and a.s == 0 and b.s == 0):
        return False
    one = Exponent.of(1)
    return ((o.q == a.q and b.q == one)
            or (o.q == b.q and a.q == one)
            or (o.q.is_infinite and a.u + b.u == 1))


def _a3(o: IndexPair, a: IndexPair, b: IndexPair, n: int) -> bool:
    return (o.s <= a.s and o.s <= b.s
            and a.u + b.u == 1 and a.s + b.s == 0
            and o.level(n) < 0 <= a.level(n)
            and 0 <= b.level(n))


def _a4(o: IndexPair, a: IndexPair, b: IndexPair, n: int) -> bool:
    al, al1, al2 = o.level(n), a.level(n), b.level(n)
    if not (o.s <= a.s and o.s <= b.s and 0 <= a.s + b.s):
        return False
    if not (1 + al == al1 + al2 and o.u <= a.u + b.u):
        return False
    if not (al < al1 and al < al2 and al > 0):
        return False
    if o.s == a.s or o.s == b.s:
        one = Exponent.of(1)
        if o.q.is_infinite or a.q == one or b.q == one:
            return False
    return True


def cond_young_weighted(out: IndexPair, in1: IndexPair, in2: IndexPair,
                        dim: int = 1) -> Verdict:
    """Sharp condition for ``l_{q1,s1} * l_{q2,s2} c l_{q,s}`` (A1..A4).

    Only stated for ``1 <= q, q1, q2 <= inf``; quasi-Banach inputs raise
    :class:`OutOfRange`.
    """
    n = _check_dim(dim)
    _young_range(out, in1, in2)
    ok, note = _a1(out, in1, in2, n)
    if ok:
        return Verdict(True, ConditionTag.A1, note)
    if _a2(out, in1, in2):
        return Verdict(True, ConditionTag.A2)
    if _a3(out, in1, in2, n):
        return Verdict(True, ConditionTag.A3)
    if _a4(out, in1, in2, n):
        return Verdict(True, ConditionTag.A4)
    return Verdict(False, notes="none of A1-A4 holds")


def cond_embedding(src: IndexPair, dst: IndexPair, dim: int = 1) -> Verdict:
    """Sharp condition for ``l_{q1,s1} c l_{q2,s2}``.

    C1: ``1/q2 <= 1/q1`` and ``s2 <= s1``;
    C2: ``1/q2 > 1/q1`` and ``1/q2 + s2/n < 1/q1 + s1/n``.
    """
    n = _check_dim(dim)
    if dst.u <= src.u:
        if dst.s <= src.s:
            return Verdict(True, ConditionTag.C1)
        return Verdict(False, notes="q1 <= q2 but s2 > s1")
    if dst.level(n) < src.level(n):
        return Verdict(True, ConditionTag.C2)
    return Verdict(False, notes="q1 > q2 but 1/q2+s2/n >= 1/q1+s1/n")


def cond_young_unweighted_multilinear(out: Exponent,
                                      ins: Sequence[Exponent]) -> Verdict:
    """Sharp condition for the J-fold convolution ``l_{q1} * ... * l_{qJ} c l_q``.

    With ``S = {j : q_j >= 1}``: ``(|S|-1) + 1/q <= sum_{j in S} 1/q_j`` and
    ``1/q <= 1/q_j`` for every j. The first clause is vacuous when S is empty.
    """
    out = Exponent.of(out)
    ins = [Exponent.of(e) for e in ins]
    if len(ins) < 2:
        raise ValueError("multilinear Young needs J >= 2 inputs")
    S = [e for e in ins if e.is_banach()]
    if S and not (len(S) - 1) + out.recip <= sum(e.recip for e in S):
        return Verdict(False, notes="(|S|-1) + 1/q > sum over S of 1/q_j")
    if not all(out.recip <= e.recip for e in ins):
        return Verdict(False, notes="1/q > 1/q_j for some j")
    return Verdict(True, ConditionTag.YoungS)


def lr_membership(s_diff, r: Exponent, dim: int = 1) -> bool:
    """Whether ``<x>^{s_diff}`` lies in ``L^r(R^n)``."""
    s_diff = as_rational(s_diff)
    r = Exponent.of(r)
    n = _check_dim(dim)
    if r.is_infinite:
        return s_diff <= 0
    # s_diff * r < -n  <=>  s_diff < -n / r
    return s_diff < -n * r.recip


def holder_lr_recip(out: IndexPair, ins: Iterable[IndexPair]) -> Fraction:
    """``1/r = max(1/q - sum 1/q_j, 0)``."""
    return max(out.u - sum(i.u for i in ins), Fraction(0))


def cond_holder_lr_multilinear(out: IndexPair, ins: Sequence[IndexPair],
                               dim: int = 1) -> Verdict:
    """Sharp condition for ``prod_j l_{q_j,s_j} c l_{q,s}`` via the weight
    quotient ``<k>^{s - sum s_j}`` lying in ``L^r``."""
    ins = list(ins)
    if not ins:
        raise ValueError("need at least one input")
    n = _check_dim(dim)
    rho = holder_lr_recip(out, ins)
    s_diff = out.s - sum(i.s for i in ins)
    holds = lr_membership(s_diff, Exponent(rho), n)
    notes = f"1/r={rho}, s-sum(s_j)={s_diff}"
    return Verdict(holds, ConditionTag.HolderLr if holds else None, notes)


# -- violation margins -------------------------------------------------------
#
# Each function returns the largest violation, in units of 1/q + s/n, among a
# list of necessary conditions; every listed condition is paired with a
# canonical witness family in :mod:`modspace.witnesses`.  A positive value
# means the predicate fails; 0 or less is returned when every listed
# condition holds (possibly with equality).


def holder_margin(out: IndexPair, in1: IndexPair, in2: IndexPair,
                  dim: int = 1) -> Fraction:
    n = _check_dim(dim)
    v = [(out.s - in1.s - in2.s) / n]
    if out.u > in1.u + in2.u:
        v.append(out.level(n) - in1.level(n) - in2.level(n))
    return max(v)


def young_margin(out: IndexPair, in1: IndexPair, in2: IndexPair,
                 dim: int = 1) -> Fraction:
    n = _check_dim(dim)
    zero = Fraction(0)
    al, al1, al2 = out.level(n), in1.level(n), in2.level(n)
    v = [
        (out.s - in1.s) / n,
        (out.s - in2.s) / n,
        -(in1.s + in2.s) / n,
        1 + max(al, zero) - max(al1, zero) - max(al2, zero),
    ]
    # embeddings l_{qj,sj} c l_{q,s} obtained by a unit in the other slot
    for a in (in1, in2):
        if out.u > a.u:
            v.append(al - a.level(n))
    # pairing at the origin: l_{q1,s1} . l_{q2,s2} c l_{1,0}
    if 1 > in1.u + in2.u:
        v.append(1 - al1 - al2)
    return max(v)


# -- relation decider --------------------------------------------------------


def _holder_side(out: IndexPair, ins: list[IndexPair], n: int) -> Verdict:
    if len(ins) == 2:
        return cond_holder_weighted(out, ins[0], ins[1], n)
    return cond_holder_lr_multilinear(out, ins, n)


def _young_side(out: IndexPair, ins: list[IndexPair], n: int) -> Verdict:
    unweighted = out.s == 0 and all(i.s == 0 for i in ins)
    banach = all(pr.q.is_banach() for pr in [out, *ins])
    if len(ins) == 2 and banach:
        return cond_young_weighted(out, ins[0], ins[1], n)
    if unweighted:
        return cond_young_unweighted_multilinear(out.q, [i.q for i in ins])
    if len(ins) == 2:
        raise OutOfRange("weighted Young conditions need 1 <= q <= inf on every index")
    raise UnsupportedQuery(
        "multilinear convolution with nonzero weights has no sharp condition set; "
        "only the bilinear weighted case is available")


def decide_relation(query: RelationQuery) -> RelationVerdict:
    """Decide a product, convolution or embedding relation.

    Modulation and Wiener products both reduce to a pointwise product on the
    spatial indices ``(p, t)`` and a convolution on the frequency indices
    ``(q, s)``; convolutions are the mirror image.  Embeddings need the
    embedding condition on each side.
    """
    n = _check_dim(query.dim)
    outs = query.output
    sp_in = [x.spatial for x in query.inputs]
    fr_in = [x.frequency for x in query.inputs]

    if query.kind is Kind.EMBEDDING:
        sp = cond_embedding(sp_in[0], outs.spatial, n)
        fr = cond_embedding(fr_in[0], outs.frequency, n)
        return RelationVerdict(sp.holds and fr.holds, sp, fr)

    # range hypothesis of the characterization behind modulation products and
    # Wiener convolutions: 1 <= p for the output spatial exponent
    needs_banach_p = (
        (query.family is Family.MODULATION and query.kind is Kind.PRODUCT)
        or (query.family is Family.WIENER and query.kind is Kind.CONVOLUTION))
    if needs_banach_p and not outs.spatial.q.is_banach():
        raise OutOfRange(
            f"this characterization needs 1 <= p on the output, got p = {outs.spatial.q}")

    if query.kind is Kind.PRODUCT:
        sp = _holder_side(outs.spatial, sp_in, n)
        fr = _young_side(outs.frequency, fr_in, n)
    else:
        sp = _young_side(outs.spatial, sp_in, n)
        fr = _holder_side(outs.frequency, fr_in, n)
    notes = "; ".join(x for x in (sp.notes, fr.notes) if x and (x.startswith("A1")))
    return RelationVerdict(sp.holds and fr.holds, sp, fr, notes)
