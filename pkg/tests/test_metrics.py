import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from cropfuse.errors import DimensionMismatch, EmptyDataset
from cropfuse.imagecore import BinaryMask
from cropfuse.metrics import (
    ConfusionCounts,
    MetricsReport,
    accuracy,
    aggregate,
    aggregate_micro,
    confusion,
    evaluate,
    f1,
    iou,
)

from oracles import count_confusion

mask_pairs = st.tuples(st.integers(1, 12), st.integers(1, 12)).flatmap(
    lambda s: st.tuples(hnp.arrays(np.bool_, s), hnp.arrays(np.bool_, s))
)


def example_pair():
    gt = np.zeros((4, 4), bool)
    pred = np.zeros((4, 4), bool)
    gt[0, :] = True
    gt[1, :2] = True
    pred[0, :] = True
    pred[1, 2:] = True
    return BinaryMask(pred), BinaryMask(gt)


class TestConfusion:
    def test_perfect(self):
        m = np.zeros(16, bool)
        m[:10] = True
        c = confusion(BinaryMask(m.reshape(4, 4)), BinaryMask(m.reshape(4, 4)))
        assert (c.tp, c.tn, c.fp, c.fn) == (10, 6, 0, 0)

    def test_disagreement(self, rng):
        m = rng.random((5, 5)) > 0.5
        c = confusion(BinaryMask(~m), BinaryMask(m))
        assert c.tp == c.tn == 0

    def test_hand_instance(self):
        pred, gt = example_pair()
        c = confusion(pred, gt)
        assert (c.tp, c.fp, c.tn, c.fn) == count_confusion(pred.values, gt.values) == (4, 2, 8, 2)

    def test_mismatch(self):
        with pytest.raises(DimensionMismatch):
            confusion(BinaryMask(np.zeros((2, 2), bool)), BinaryMask(np.zeros((2, 3), bool)))


class TestScores:
    def test_hand_values(self):
        c = ConfusionCounts(tp=4, fp=2, tn=8, fn=2)
        assert accuracy(c) == 0.75
        assert f1(c) == pytest.approx(8 / 12, abs=1e-15)
        pred, gt = example_pair()
        assert iou(pred, gt) == 0.5
        assert 2 * 0.5 / 1.5 == pytest.approx(f1(c), abs=1e-15)

    def test_extremes(self):
        assert accuracy(ConfusionCounts(3, 0, 5, 0)) == 1.0
        assert accuracy(ConfusionCounts(0, 3, 0, 5)) == 0.0
        assert f1(ConfusionCounts(3, 0, 5, 0)) == 1.0

    def test_empty_conventions(self):
        z = BinaryMask(np.zeros((3, 3), bool))
        one = np.zeros((3, 3), bool)
        one[1, 1] = True
        assert f1(confusion(z, z)) == 1.0 and iou(z, z) == 1.0
        assert f1(confusion(BinaryMask(one), z)) == 0.0 and iou(z, BinaryMask(one)) == 0.0

    def test_disjoint(self):
        a = np.zeros((3, 3), bool)
        b = np.zeros((3, 3), bool)
        a[0, 0], b[2, 2] = True, True
        assert iou(BinaryMask(a), BinaryMask(b)) == 0.0

    def test_zero_total(self):
        with pytest.raises(ValueError):
            accuracy(ConfusionCounts(0, 0, 0, 0))

    @given(mask_pairs)
    def test_identity_and_oracle(self, pair):
        a, b = BinaryMask(pair[0]), BinaryMask(pair[1])
        rep = evaluate(a, b)
        tp, fp, tn, fn = count_confusion(pair[0], pair[1])
        assert (rep.counts.tp, rep.counts.fp, rep.counts.tn, rep.counts.fn) == (tp, fp, tn, fn)
        assert abs(rep.f1 - 2 * rep.iou / (1 + rep.iou)) <= 1e-12
        assert 0 <= rep.acc <= 1 and 0 <= rep.f1 <= 1 and 0 <= rep.iou <= 1
        assert iou(a, b) == iou(b, a)
        assert accuracy(confusion(a, b)) == accuracy(confusion(b, a))

    @given(hnp.arrays(np.bool_, (5, 4)))
    def test_self_is_perfect(self, m):
        rep = evaluate(BinaryMask(m), BinaryMask(m))
        assert (rep.acc, rep.f1, rep.iou) == (1.0, 1.0, 1.0)


class TestAggregate:
    def _rep(self, iou_value):
        # pred covers 10 pixels of an all-positive 10 x k gt
        tp = round(10 * iou_value)
        c = ConfusionCounts(tp=tp, fp=0, tn=0, fn=10 - tp)
        return MetricsReport.from_counts(c)

    def test_single(self):
        r = self._rep(0.4)
        assert aggregate([r]) is r

    def test_midpoint(self):
        out = aggregate([self._rep(0.4), self._rep(0.6)])
        assert out.iou == pytest.approx(0.5, abs=1e-15)
        assert out.counts == ConfusionCounts(10, 0, 0, 10)
        assert out.aggregation == "macro"

    def test_macro_differs_from_micro(self):
        # image 1: tiny object missed; image 2: large object found
        a = MetricsReport.from_counts(ConfusionCounts(tp=0, fp=0, tn=99, fn=1))
        b = MetricsReport.from_counts(ConfusionCounts(tp=50, fp=0, tn=50, fn=0))
        macro, micro = aggregate([a, b]), aggregate_micro([a, b])
        assert macro.iou == 0.5
        assert micro.iou == pytest.approx(50 / 51)
        assert micro.aggregation == "micro"

    def test_empty(self):
        with pytest.raises(EmptyDataset):
            aggregate([])
        with pytest.raises(EmptyDataset):
            aggregate_micro([])
