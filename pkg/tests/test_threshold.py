import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from cropfuse.errors import OutOfRange
from cropfuse.imagecore import BinaryMask, LikelihoodMask
from cropfuse.segclassic import apply_threshold, to_likelihood

q_grid = hnp.arrays(np.float32, (5, 5), elements=st.floats(0, 1, width=32))


def test_inclusive():
    assert apply_threshold(LikelihoodMask(np.array([[0.5]])), 0.5).values.tolist() == [[True]]


def test_zero_threshold_all_ones(rng):
    assert apply_threshold(LikelihoodMask(rng.random((4, 4))), 0.0).values.all()


def test_rule():
    q = LikelihoodMask(np.array([[0.2, 0.5, 0.7]]))
    assert apply_threshold(q, 0.6).values.tolist() == [[False, False, True]]


@pytest.mark.parametrize("t", [-0.01, 1.01, float("nan")])
def test_threshold_range(t):
    with pytest.raises(OutOfRange):
        apply_threshold(LikelihoodMask(np.zeros((2, 2))), t)


def test_to_likelihood():
    assert np.all(to_likelihood(BinaryMask(np.zeros((3, 3), bool))).values == 0.0)
    assert np.all(to_likelihood(BinaryMask(np.ones((3, 3), bool))).values == 1.0)


@given(hnp.arrays(np.bool_, (4, 6)))
def test_round_trip(m):
    mask = BinaryMask(m)
    assert apply_threshold(to_likelihood(mask), 0.5) == mask


@given(q_grid, st.floats(0, 1), st.floats(0, 1))
def test_monotone(q, a, b):
    t1, t2 = sorted((a, b))
    qm = LikelihoodMask(q)
    m1, m2 = apply_threshold(qm, t1).values, apply_threshold(qm, t2).values
    assert not (m2 & ~m1).any()
