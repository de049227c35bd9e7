"""Witness sequences and the empirical blow-up oracle."""

import json

import numpy as np
import pytest

from modspace.indices import IndexPair, Kind
from modspace.lattice import pointwise_product, weighted_norm
from modspace.witnesses import (
    FamilyKind,
    InvalidBranch,
    OracleVerdict,
    WitnessFamily,
    ZeroDenominator,
    blowup_probe,
    box,
    canonical_families,
    classify,
    confirmation_windows,
    empirical_decide,
    fit_slope,
    holder_power_witness,
    ratio,
)


def P(q, s=0):
    return IndexPair.of(q, s)


class TestBox:
    def test_examples(self):
        b = box(2)
        assert b.to_dict() == {(i,): 1.0 for i in range(-2, 3)}
        assert weighted_norm(b, 1) == 5.0
        assert box(3, 2).support_size == 49

    def test_negative(self):
        with pytest.raises(ValueError):
            box(-1)


class TestHolderPowerWitness:
    def test_unweighted_inf(self):
        a, b = holder_power_witness(2, P(1), (P("inf"), P("inf")))
        assert a == box(2) and b == box(2)
        assert pointwise_product(a, b) == box(2)

    def test_invalid_branch(self):
        with pytest.raises(InvalidBranch):
            holder_power_witness(4, P(2), (P(2), P(2)))

    @pytest.mark.parametrize("out,ins", [
        (P(1, 1), (P(2, 0), P(4, -1))),
        (P(1, -2), (P(4, 1), P(2, 2))),
        (P(1, 0), (P("inf", 1), P(2, -1))),
    ])
    def test_product_identity(self, out, ins):
        # prod a_j = m^{-1} (m / prod m_j)^{r/q}
        N = 6
        seqs = holder_power_witness(N, out, ins)
        prod = seqs[0]
        for a in seqs[1:]:
            prod = pointwise_product(prod, a)
        r = 1 / float(out.u - sum(i.u for i in ins))
        k = np.arange(-N, N + 1)
        br = np.sqrt(1.0 + k ** 2)
        m = br ** float(out.s)
        mj = np.prod([br ** float(i.s) for i in ins], axis=0)
        want = (m / mj) ** (r * float(out.u)) / m
        np.testing.assert_allclose(prod.values, want, rtol=1e-12)

    def test_two_dim(self):
        seqs = holder_power_witness(3, P(1, 1), (P(2), P(4, -1)), dim=2)
        assert all(a.support_size == 49 for a in seqs)


class TestRatio:
    @pytest.mark.parametrize("N", [1, 4, 9])
    def test_product_boxes_closed_form(self, N):
        r = ratio(Kind.PRODUCT, P(1), (P(4), P(4)), (box(N), box(N)))
        assert r == pytest.approx((2 * N + 1) ** 0.5, rel=1e-12)

    @pytest.mark.parametrize("N", [1, 4, 9])
    def test_holder_power_closed_form(self, N):
        ins = (P("inf"), P("inf"))
        seqs = holder_power_witness(N, P(1), ins)
        assert ratio("product", P(1), ins, seqs) == pytest.approx(2 * N + 1, rel=1e-12)

    def test_convolution_boxes(self):
        rs = [ratio("convolution", P(2), (P(2), P(2)), (box(N), box(2 * N)))
              for N in (8, 16, 32, 64)]
        slope = np.polyfit(np.log2([8, 16, 32, 64]), np.log2(rs), 1)[0]
        assert slope == pytest.approx(0.5, abs=0.05)

    def test_zero_denominator(self):
        from modspace.lattice import Sequence
        with pytest.raises(ZeroDenominator):
            ratio("product", P(1), (P(1), P(1)), (Sequence.empty(1), box(1)))

    def test_arity(self):
        with pytest.raises(ValueError):
            ratio("product", P(1), (P(1),), (box(1), box(1)))


class TestFamilies:
    def test_labels_and_validation(self):
        f = WitnessFamily("Box", ("box", "box2"))
        assert f.kind is FamilyKind.BOX and f.label == "Box[box,box2]"
        with pytest.raises(ValueError):
            WitnessFamily("Box", ("nope",))
        with pytest.raises(ValueError):
            WitnessFamily("HolderPower", ("holder",))

    def test_members(self):
        f = WitnessFamily("DeltaAt", ("delta+", "delta-"))
        a, b = f.members(5, (P(1), P(1)))
        assert a.to_dict() == {(5,): 1.0} and b.to_dict() == {(-5,): 1.0}
        with pytest.raises(ValueError):
            f.members(0, (P(1), P(1)))
        with pytest.raises(ValueError):
            f.members(3, (P(1),))

    def test_canonical_holder_only_when_branch_valid(self):
        kinds = {f.kind for f in canonical_families("product", P(1), (P(4), P(4)))}
        assert FamilyKind.HOLDER_POWER in kinds
        kinds = {f.kind for f in canonical_families("product", P(2), (P(2), P(2)))}
        assert FamilyKind.HOLDER_POWER not in kinds


class TestClassify:
    def test_fit_slope(self):
        pts = [(N, 3.0 * N ** 0.75) for N in (8, 16, 32)]
        assert fit_slope(pts) == pytest.approx(0.75)
        with pytest.raises(ValueError):
            fit_slope([(4, 1.0), (8, 1.0)])

    def test_bands(self):
        grow = [(N, N ** 0.3) for N in (8, 16, 32)]
        flat = [(N, 2.0) for N in (8, 16, 32)]
        mid = [(N, N ** 0.03) for N in (8, 16, 32)]
        wobble = [(8, 1.0), (16, 4.0), (32, 2.0), (64, 8.0)]
        assert classify(grow)[1] is OracleVerdict.BLOW_UP
        assert classify(flat)[1] is OracleVerdict.BOUNDED
        assert classify(mid)[1] is OracleVerdict.INCONCLUSIVE
        assert classify(wobble)[1] is OracleVerdict.INCONCLUSIVE


class TestBlowupProbe:
    def test_young_l2_blows_up(self):
        fam = WitnessFamily("Box", ("box", "box"))
        rep = blowup_probe("convolution", P(2), (P(2), P(2)), fam, N_list=(8, 16, 32, 64))
        assert rep.verdict is OracleVerdict.BLOW_UP
        assert rep.slope == pytest.approx(0.5, abs=0.05)

    def test_young_l1_bounded(self):
        fam = WitnessFamily("Box", ("box", "box"))
        rep = blowup_probe("convolution", P(1), (P(1), P(1)), fam)
        assert rep.verdict is OracleVerdict.BOUNDED
        assert abs(rep.slope) < 1e-12
        np.testing.assert_allclose(rep.ratios, 1.0, rtol=1e-12)

    def test_holder_power_slope_one(self):
        ins = (P("inf"), P("inf"))
        fam = WitnessFamily("HolderPower", ("holder", "holder"), P(1))
        rep = blowup_probe("product", P(1), ins, fam)
        assert rep.verdict is OracleVerdict.BLOW_UP
        assert rep.slope == pytest.approx(1.0, abs=0.02)

    @pytest.mark.parametrize("N_list", [(8, 16), (4, 8, 16), (16, 8, 32), (8, 8, 16, 32)])
    def test_bad_n_list(self, N_list):
        fam = WitnessFamily("Box", ("box", "box"))
        with pytest.raises(ValueError):
            blowup_probe("convolution", P(1), (P(1), P(1)), fam, N_list=N_list)

    def test_json(self):
        fam = WitnessFamily("Box", ("box", "box"))
        rep = blowup_probe("convolution", P(2), (P(2), P(2)), fam)
        d = json.loads(rep.to_json())
        assert set(d) == {"family", "points", "slope", "verdict"}
        assert [p["N"] for p in d["points"]] == [8, 16, 32, 64, 128]
        assert d["verdict"] == "BlowUp"


class TestEmpiricalDecide:
    def test_l1_young_bounded(self):
        res = empirical_decide("convolution", P(1), (P(1), P(1)))
        assert res.verdict is OracleVerdict.BOUNDED
        assert res.confirmations == ()

    def test_l2_young_blows_up(self):
        res = empirical_decide("convolution", P(2), (P(2), P(2)), confirm=False)
        assert res.verdict is OracleVerdict.BLOW_UP
        assert res.worst.slope >= 0.45

    def test_weighted_holder_bounded(self):
        res = empirical_decide("product", P(1), (P(2, 1), P(2, 1)))
        assert res.verdict is OracleVerdict.BOUNDED
        assert all(r.slope <= 0.02 for r in res.final_reports())

    def test_blowup_is_replayable(self):
        out, ins = P(1), (P(4), P(4))
        res = empirical_decide("product", out, ins, confirm=False)
        assert res.verdict is OracleVerdict.BLOW_UP
        fam = next(f for f in canonical_families("product", out, ins) if f.label == res.worst.family)
        for N, r in res.worst.points:
            seqs = fam.members(N, ins)
            assert ratio("product", out, ins, seqs) == pytest.approx(r, rel=1e-12)

    def test_confirmation_windows(self):
        assert confirmation_windows(1)[0] == (2 ** 14, 2 ** 16, 2 ** 18)
        assert confirmation_windows(2) == ((128, 256, 512),)

    def test_slow_convergence_is_confirmed_bounded(self):
        # the power profile ratio converges like a partial sum with a small tail
        # exponent, so the base window alone reads it as growth
        out, ins = P(1, -2), (P(4, -1), P("inf", 0))
        base = empirical_decide("product", out, ins, confirm=False)
        full = empirical_decide("product", out, ins)
        assert base.verdict is not OracleVerdict.BOUNDED
        assert full.verdict is OracleVerdict.BOUNDED
        assert full.confirmations
        assert {r.family for r in full.final_reports()} == {r.family for r in full.reports}

    def test_to_dict(self):
        res = empirical_decide("convolution", P(2), (P(2), P(2)), confirm=False)
        d = res.to_dict()
        assert set(d) == {"verdict", "worst", "reports", "confirmations"}
        json.dumps(d)

    def test_deterministic(self):
        a = empirical_decide("convolution", P("4/3", 1), (P(2, -1), P(1, 2))).to_dict()
        b = empirical_decide("convolution", P("4/3", 1), (P(2, -1), P(1, 2))).to_dict()
        assert a == b

    def test_two_dim(self):
        res = empirical_decide("convolution", P(2), (P(2), P(2)), dim=2, confirm=False)
        assert res.verdict is OracleVerdict.BLOW_UP
