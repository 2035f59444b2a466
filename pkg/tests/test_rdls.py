import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ssdwt import DecisionSet, FilterAssignment, FilterId, SampleGrid, fixed_variant_decisions, forward_rdls_ssdwt, forward_ssdwt, inverse_rdls_ssdwt
from ssdwt.rdls import FILTER_SLOTS, denoise, denoise_block, rdls_predict_pass, rdls_update_pass
from ssdwt.transform import LEGAL_PAIR_STATES, CostCounters, LevelDecisions, predict_pass, update_pass

FILTERS = list(FilterId)


def test_denoise_none_and_null(rng):
    state = rng.integers(-50, 50, (6, 5))
    assert denoise(FilterId.NONE, state, (3, 2)) == state[3, 2]
    assert denoise(FilterId.NULL, state, (3, 2)) == 0


def test_median_constant():
    state = np.full((7, 6), 11)
    assert denoise(FilterId.MEDIAN5, state, (0, 0)) == 11
    assert denoise(FilterId.MEDIAN5, state, (4, 5), axis=1) == 11


@given(st.integers(1, 9), st.integers(1, 9), st.integers(0, 2**32 - 1))
def test_median_block_matches_pointwise(n, m, seed):
    """Vectorised median over operand rows agrees with the scalar definition."""
    rng = np.random.default_rng(seed)
    state = rng.integers(-20, 20, (n, m))
    for parity in (0, 1):
        operands = state[parity::2]
        if operands.shape[0] == 0:
            continue
        got = denoise_block(FilterId.MEDIAN5, operands)
        for i in range(operands.shape[0]):
            for j in range(m):
                assert got[i, j] == denoise(FilterId.MEDIAN5, state, (2 * i + parity, j))


def test_median_uses_same_parity_only():
    state = np.zeros((9, 5), int)
    state[1::2] = 1000  # odd rows must not leak into even-row medians
    assert all(denoise(FilterId.MEDIAN5, state, (r, 2)) == 0 for r in range(0, 9, 2))


def test_none_equals_plain_passes():
    seg = np.array([[10], [12], [14], [16]])
    rdls_predict_pass(seg, FilterId.NONE)
    assert seg.ravel().tolist() == [10, 0, 14, 2]
    rdls_update_pass(seg, FilterId.NONE)
    assert seg.ravel().tolist() == [10, 0, 15, 2]


def test_null_is_skip():
    seg = np.array([[10], [12], [14], [16]])
    c = CostCounters()
    rdls_predict_pass(seg, FilterId.NULL, c)
    rdls_update_pass(seg, FilterId.NULL, c)
    assert seg.ravel().tolist() == [10, 12, 14, 16] and c.lifting_steps == 0


def test_median_on_constant_region():
    block = np.full((6, 5), 40)
    rdls_predict_pass(block, FilterId.MEDIAN5)
    assert (block[1::2] == 0).all() and (block[0::2] == 40).all()
    rdls_update_pass(block, FilterId.MEDIAN5)
    assert (block[0::2] == 40).all()


def test_special_assignments(rng):
    g = SampleGrid.from_array(rng.integers(0, 256, (19, 14)), 8)
    assert forward_rdls_ssdwt(g, FilterAssignment.uniform(3, FilterId.NONE)) == forward_ssdwt(g, DecisionSet.uniform(3))
    assert forward_rdls_ssdwt(g, FilterAssignment.uniform(3, FilterId.NULL)) == g


@st.composite
def assignments(draw, t=None):
    t = draw(st.integers(0, 4)) if t is None else t
    f = st.sampled_from(FILTERS)
    return FilterAssignment(tuple(tuple(draw(f) for _ in FILTER_SLOTS) for _ in range(t)))


@given(assignments(), st.integers(1, 18), st.integers(1, 18), st.integers(0, 2**32 - 1))
def test_round_trip(assignment, h, w, seed):
    rng = np.random.default_rng(seed)
    g = SampleGrid.from_array(rng.integers(0, 256, (h, w)), 8)
    assert inverse_rdls_ssdwt(forward_rdls_ssdwt(g, assignment), assignment) == g


@st.composite
def derived_decisions(draw):
    """Decision sets whose reorder flags follow the both-skipped rule."""
    states = [s for s in LEGAL_PAIR_STATES if s.skip_reorder == (s.skip_pred and s.skip_upd)]
    t = draw(st.integers(1, 3))
    pick = st.sampled_from(states)
    return DecisionSet(tuple(LevelDecisions(draw(pick), draw(pick), draw(pick)) for _ in range(t)))


@given(derived_decisions(), st.integers(0, 2**32 - 1))
def test_none_null_matches_decisions(ds, seed):
    rng = np.random.default_rng(seed)
    g = SampleGrid.from_array(rng.integers(0, 256, (11, 10)), 8)
    fa = FilterAssignment.from_decisions(ds)
    assert fa.decisions() == ds
    assert forward_rdls_ssdwt(g, fa) == forward_ssdwt(g, ds)


def test_from_decisions_rejects_underived_reorder():
    # both steps skipped but the reorder performed: not expressible with NULL filters
    ds = DecisionSet.uniform(1).with_pair(1, 0, LEGAL_PAIR_STATES[3])
    with pytest.raises(ValueError):
        FilterAssignment.from_decisions(ds)
