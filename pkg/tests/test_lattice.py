"""Finite nonnegative sequences, weighted norms, products and convolutions."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from modspace.indices import Exponent, IndexPair, cond_holder_weighted
from modspace.lattice import (
    DimensionMismatch,
    PowerWeightFn,
    Sequence,
    convolve,
    pointwise_product,
    weighted_norm,
)
from modspace.witnesses import box


def seqs(dim=1, max_len=12):
    shape = st.integers(1, max_len) if dim == 1 else st.tuples(st.integers(1, 5), st.integers(1, 5))
    vals = arrays(np.float64, shape, elements=st.floats(0, 10, allow_subnormal=False))
    offs = st.tuples(*([st.integers(-6, 6)] * dim))
    return st.builds(Sequence, vals, offs)


exps = st.sampled_from(["1/2", "1", "4/3", "2", "3", "inf"])
orders = st.sampled_from([-2, -1, 0, 1, 2])


class TestSequence:
    def test_trims_zeros(self):
        a = Sequence([0, 0, 2, 0, 3, 0], (-3,))
        assert a.offset == (-1,)
        assert a.support_size == 2
        assert a.to_dict() == {(-1,): 2.0, (1,): 3.0}
        assert a.support_bound == 1

    def test_rejects_negative_and_nonfinite(self):
        with pytest.raises(ValueError):
            Sequence([1, -1])
        with pytest.raises(ValueError):
            Sequence([1, np.inf])

    def test_empty(self):
        e = Sequence.empty(2)
        assert e.is_empty and e.support_size == 0 and e.support_bound == 0
        assert weighted_norm(e, 2, 1) == 0.0

    def test_getitem(self):
        a = Sequence.from_dict({(1, 2): 4.0, (-1, 0): 1.0})
        assert a[(1, 2)] == 4.0 and a[(0, 0)] == 0.0 and a[(9, 9)] == 0.0
        with pytest.raises(DimensionMismatch):
            a[(1,)]

    def test_csv_round_trip(self):
        a = Sequence.from_dict({(1, 2): 0.1, (-3, 0): 1 / 3})
        text = a.to_csv()
        assert text.splitlines()[0] == "k1,k2,value"
        assert Sequence.from_csv(text) == a

    def test_csv_rejects_bad_header(self):
        with pytest.raises(ValueError):
            Sequence.from_csv("a,b\n1,2\n")

    @given(seqs())
    def test_csv_round_trip_property(self, a):
        assert Sequence.from_csv(a.to_csv()) == a

    def test_hash_eq(self):
        a = Sequence([1, 2], (3,))
        b = Sequence([0, 1, 2], (2,))
        assert a == b and hash(a) == hash(b)


class TestWeightedNorm:
    def test_examples(self):
        for p in ["1/2", 1, 2, "inf"]:
            for s in [-2, 0, 3]:
                assert weighted_norm(Sequence.delta(0), p, s) == 1.0
        assert weighted_norm(Sequence([3, 4]), 2, 0) == pytest.approx(5.0, rel=1e-15)
        assert weighted_norm(Sequence.delta((3, 4)), 1, 2) == pytest.approx(26.0, rel=1e-14)

    def test_sup(self):
        a = Sequence([1.0, 5.0, 2.0], (-1,))
        # <0>^1 * 5 vs <1>^1 * 2
        assert weighted_norm(a, "inf", 1) == pytest.approx(max(5.0, 2 * np.sqrt(2)))

    def test_weight_fn(self):
        w = PowerWeightFn(2)
        assert w(np.array([[3, 4]]))[0] == pytest.approx(26.0)
        assert weighted_norm(Sequence.delta((3, 4)), 1, w) == pytest.approx(26.0)

    def test_large_values_do_not_overflow(self):
        a = Sequence([1e200, 1e200])
        assert weighted_norm(a, 2) == pytest.approx(np.sqrt(2) * 1e200)

    @given(seqs(), exps, exps, orders)
    def test_monotone_in_p(self, a, p1, p2, s):
        e1, e2 = Exponent.of(p1), Exponent.of(p2)
        if e1.recip < e2.recip:
            e1, e2 = e2, e1
        # p1 <= p2  =>  ||a||_{p2} <= ||a||_{p1}
        assert weighted_norm(a, e2, s) <= weighted_norm(a, e1, s) * (1 + 1e-12)

    @given(seqs(), exps, orders, st.floats(0, 100))
    def test_homogeneous(self, a, p, s, c):
        assert weighted_norm(a.scaled(c), p, s) == pytest.approx(
            c * weighted_norm(a, p, s), rel=1e-12, abs=1e-300)


class TestConvolve:
    def test_identity(self):
        a = Sequence([1.0, 0.5, 2.0], (-1,))
        assert convolve(Sequence.delta(0), a) == a

    def test_small(self):
        c = convolve(Sequence([1, 1]), Sequence([1, 1]))
        assert c.to_dict() == {(0,): 1.0, (1,): 2.0, (2,): 1.0}

    def test_box_lower_bound(self):
        c = convolve(box(2), box(4))
        for i in range(-2, 3):
            assert c[(i,)] == 5.0 >= 2 * box(2)[(i,)]

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            convolve(Sequence([1]), Sequence([[1]]))

    def test_fft_agrees_with_direct(self):
        rng = np.random.default_rng(0)
        a = Sequence(rng.uniform(0, 1, 300), (-150,))
        b = Sequence(rng.uniform(0, 1, 200), (7,))
        d = convolve(a, b, method="direct")
        f = convolve(a, b, method="fft")
        assert d.offset == f.offset
        np.testing.assert_allclose(f.values, d.values, rtol=0, atol=1e-12 * d.values.max())

    @given(seqs(), seqs())
    def test_l1_identity(self, a, b):
        lhs = weighted_norm(convolve(a, b), 1)
        assert lhs == pytest.approx(weighted_norm(a, 1) * weighted_norm(b, 1), rel=1e-12, abs=0)

    @given(seqs(2), seqs(2))
    def test_commutative(self, a, b):
        assert convolve(a, b).allclose(convolve(b, a))

    @settings(max_examples=50)
    @given(seqs(max_len=6), seqs(max_len=6), seqs(max_len=6))
    def test_associative(self, a, b, c):
        x = convolve(convolve(a, b), c)
        y = convolve(a, convolve(b, c))
        assert x.allclose(y, rtol=1e-12, atol=1e-12 * max(1.0, x.values.max()))

    @given(seqs(), seqs())
    def test_support(self, a, b):
        c = convolve(a, b)
        if a.is_empty or b.is_empty:
            assert c.is_empty
            return
        lo = a.support().min() + b.support().min()
        hi = a.support().max() + b.support().max()
        assert c.is_empty or (c.support().min() >= lo and c.support().max() <= hi)


class TestPointwise:
    def test_examples(self):
        a = Sequence([2.0, 3.0], (0,))
        assert pointwise_product(a, Sequence.delta(0)).to_dict() == {(0,): 2.0}
        assert pointwise_product(Sequence([0.0, 3.0]), Sequence.delta(0)).is_empty
        assert pointwise_product(box(3), box(3)) == box(3)
        assert pointwise_product(Sequence.delta(5), Sequence.delta(-5)).is_empty

    @given(seqs(), seqs(), exps, exps, exps, orders, orders, orders)
    def test_holder_constant_one(self, a, b, q, q1, q2, s, s1, s2):
        out, x, y = IndexPair.of(q, s), IndexPair.of(q1, s1), IndexPair.of(q2, s2)
        v = cond_holder_weighted(out, x, y, 1)
        if v.holds and v.tag.value == "B2":
            lhs = weighted_norm(pointwise_product(a, b), out.q, out.s)
            rhs = weighted_norm(a, x.q, x.s) * weighted_norm(b, y.q, y.s)
            assert lhs <= rhs * (1 + 1e-12) + 1e-300
