"""Reversible denoising and lifting steps (RDLS) combined with step skipping.

An RDLS step is an ordinary lifting step whose two operands are replaced by
denoised copies. Operands of the prediction step are even samples and the
step modifies odd ones (and vice versa for update), so as long as the
denoiser only looks at samples of the operand parity, the inverse step can
recompute exactly the same denoised operands.

Filters:

``NONE``     operands used as-is (a regular lifting step)
``NULL``     operands replaced by 0, i.e. the step is skipped
``MEDIAN5``  median of the 15 same-parity samples of the 5x5 window around
             the operand (3 positions along the transform axis, 5 across),
             clamped at the edges of the block being transformed
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import transform as tf
from .imageio import SampleGrid
from .transform import CostCounters, DecisionSet, LevelDecisions, PairDecision, PairSlot

__all__ = [
    "FilterId",
    "FILTER_SLOTS",
    "FilterAssignment",
    "PairPlan",
    "denoise",
    "denoise_block",
    "rdls_predict_pass",
    "rdls_update_pass",
    "forward_rdls_ssdwt",
    "inverse_rdls_ssdwt",
    "plan_from_decisions",
    "plan_from_assignment",
]


class FilterId(enum.IntEnum):
    NONE = 0
    NULL = 1
    MEDIAN5 = 2


# subband slot order used by assignments and by the container
FILTER_SLOTS = ("H", "L", "HL", "LL", "HH", "LH")


def _identity(operands: np.ndarray) -> np.ndarray:
    return operands


def _null(operands: np.ndarray) -> np.ndarray:
    return np.zeros_like(operands)


def _median5(operands: np.ndarray) -> np.ndarray:
    # operands: same-parity samples, transform axis first
    n, m = operands.shape
    padded = np.pad(operands, ((1, 1), (2, 2)), mode="edge")
    windows = np.stack([padded[i : i + n, j : j + m] for i in range(3) for j in range(5)])
    return np.partition(windows, 7, axis=0)[7]


_DENOISERS: dict[FilterId, Callable[[np.ndarray], np.ndarray]] = {
    FilterId.NONE: _identity,
    FilterId.NULL: _null,
    FilterId.MEDIAN5: _median5,
}


def denoise_block(filter_id, operands: np.ndarray) -> np.ndarray:
    return _DENOISERS[FilterId(filter_id)](operands)


def denoise(filter_id, state: np.ndarray, position: tuple[int, int], axis: int = 0) -> int:
    """Denoised value of one sample of a pass block, computed point-wise.

    ``state`` is the 2-D block the pass works on and ``axis`` the direction
    of the 1-D transform. The block is read, never written.
    """
    filter_id = FilterId(filter_id)
    r, c = position
    if axis == 1:
        state = state.T
        r, c = c, r
    if filter_id is FilterId.NONE:
        return int(state[r, c])
    if filter_id is FilterId.NULL:
        return 0
    rows = state[r % 2 :: 2]
    i = r // 2
    picks = [
        int(rows[min(max(i + di, 0), rows.shape[0] - 1), min(max(c + dj, 0), state.shape[1] - 1)])
        for di in (-1, 0, 1)
        for dj in (-2, -1, 0, 1, 2)
    ]
    return sorted(picks)[7]


def _rdls_predict(block: np.ndarray, filter_id, counters, sign: int = 1) -> None:
    n = block.shape[0]
    if n < 2 or block.shape[1] == 0:
        return
    even, odd = block[0::2], block[1::2]
    d = denoise_block(filter_id, even)
    n_odd = odd.shape[0]
    right = d[1:] if d.shape[0] > n_odd else np.concatenate((d[1:], d[-1:]))
    delta = (d[:n_odd] + right) >> 1
    if sign > 0:
        odd -= delta
        if counters is not None:
            counters.lifting_steps += odd.size
    else:
        odd += delta


def _rdls_update(block: np.ndarray, filter_id, counters, sign: int = 1) -> None:
    n = block.shape[0]
    if n < 2 or block.shape[1] == 0:
        return
    even = block[0::2]
    d = denoise_block(filter_id, block[1::2])
    delta = tf._update_increment(d, even.shape[0])
    if sign > 0:
        even += delta
        if counters is not None:
            counters.lifting_steps += even.size
    else:
        even -= delta


def rdls_predict_pass(block: np.ndarray, filter_id, counters: CostCounters | None = None) -> np.ndarray:
    """RDLS prediction along axis 0 of ``block`` (modified in place).

    With ``NULL`` the block is left untouched and nothing is counted.
    """
    if FilterId(filter_id) is not FilterId.NULL:
        _rdls_predict(block, filter_id, counters)
    return block


def rdls_update_pass(block: np.ndarray, filter_id, counters: CostCounters | None = None) -> np.ndarray:
    if FilterId(filter_id) is not FilterId.NULL:
        _rdls_update(block, filter_id, counters)
    return block


@dataclass(frozen=True)
class FilterAssignment:
    """Filter per lifting slot per level, slots ordered as :data:`FILTER_SLOTS`."""

    levels: tuple[tuple[FilterId, ...], ...] = ()

    def __post_init__(self):
        levels = tuple(tuple(FilterId(f) for f in level) for level in self.levels)
        for level in levels:
            if len(level) != len(FILTER_SLOTS):
                raise ValueError("each level assigns exactly 6 filters")
        object.__setattr__(self, "levels", levels)

    @property
    def t(self) -> int:
        return len(self.levels)

    @classmethod
    def uniform(cls, t: int, filter_id) -> "FilterAssignment":
        return cls(tuple((FilterId(filter_id),) * 6 for _ in range(t)))

    def slot(self, level: int, subband: str) -> FilterId:
        return self.levels[level - 1][FILTER_SLOTS.index(subband)]

    def with_slot(self, level: int, subband: str, filter_id) -> "FilterAssignment":
        levels = [list(lv) for lv in self.levels]
        levels[level - 1][FILTER_SLOTS.index(subband)] = FilterId(filter_id)
        return FilterAssignment(tuple(tuple(lv) for lv in levels))

    def skip_reorder(self, level: int, slot: PairSlot) -> bool:
        pred, upd = tf.PAIR_SUBBANDS[slot]
        return self.slot(level, pred) is FilterId.NULL and self.slot(level, upd) is FilterId.NULL

    def decisions(self) -> DecisionSet:
        """The step-skip decisions implied by NULL slots (reorders derived)."""
        levels = []
        for level in range(1, self.t + 1):
            pairs = []
            for slot in PairSlot:
                pred, upd = tf.PAIR_SUBBANDS[slot]
                sp = self.slot(level, pred) is FilterId.NULL
                su = self.slot(level, upd) is FilterId.NULL
                pairs.append(PairDecision(sp, su, sp and su))
            levels.append(LevelDecisions(*pairs))
        return DecisionSet(tuple(levels))

    @classmethod
    def from_decisions(cls, decisions: DecisionSet) -> "FilterAssignment":
        """NONE/NULL assignment for a decision set whose reorders follow the derived rule."""
        levels = []
        for level in decisions.levels:
            for pair in level.pairs:
                if pair.skip_reorder != (pair.skip_pred and pair.skip_upd):
                    raise ValueError("reorder flag is not derivable from NULL filters")
            levels.append(
                tuple(FilterId.NULL if level.skips(sb) else FilterId.NONE for sb in FILTER_SLOTS)
            )
        return cls(tuple(levels))

    def uses_only(self, filters) -> bool:
        allowed = {FilterId(f) for f in filters}
        return all(f in allowed for level in self.levels for f in level)


class PairPlan(NamedTuple):
    """How one pair pass is executed: filter per step (``None`` = skipped)."""

    pred: FilterId | None
    upd: FilterId | None
    skip_reorder: bool


def plan_from_decisions(decisions: DecisionSet):
    return tuple(
        tuple(
            PairPlan(
                None if p.skip_pred else FilterId.NONE,
                None if p.skip_upd else FilterId.NONE,
                p.skip_reorder,
            )
            for p in level.pairs
        )
        for level in decisions.levels
    )


def plan_from_assignment(assignment: FilterAssignment):
    plan = []
    for level in range(1, assignment.t + 1):
        pairs = []
        for slot in PairSlot:
            pred_sb, upd_sb = tf.PAIR_SUBBANDS[slot]
            pred = assignment.slot(level, pred_sb)
            upd = assignment.slot(level, upd_sb)
            pairs.append(
                PairPlan(
                    None if pred is FilterId.NULL else pred,
                    None if upd is FilterId.NULL else upd,
                    pred is FilterId.NULL and upd is FilterId.NULL,
                )
            )
        plan.append(tuple(pairs))
    return tuple(plan)


def forward_pair(block: np.ndarray, pair: PairPlan, counters: CostCounters | None = None) -> None:
    """Run one pair pass along axis 0 of ``block`` in place."""
    if block.shape[1] == 0 or block.shape[0] < 2:
        return
    if pair.pred is FilterId.NONE:
        tf._predict(block, counters)
    elif pair.pred is not None:
        _rdls_predict(block, pair.pred, counters)
    if pair.upd is FilterId.NONE:
        tf._update(block, counters)
    elif pair.upd is not None:
        _rdls_update(block, pair.upd, counters)
    if not pair.skip_reorder:
        tf._reorder(block)


def inverse_pair(block: np.ndarray, pair: PairPlan) -> None:
    if block.shape[1] == 0 or block.shape[0] < 2:
        return
    if not pair.skip_reorder:
        tf._unreorder(block)
    if pair.upd is not None:
        _rdls_update(block, pair.upd, None, sign=-1)
    if pair.pred is not None:
        _rdls_predict(block, pair.pred, None, sign=-1)


def forward_plan(grid: SampleGrid, plan, counters: CostCounters | None = None) -> np.ndarray:
    out = grid.samples.copy()
    for level, (w, h) in zip(plan, tf.level_dims(grid.width, grid.height, len(plan))):
        for block, pair in zip(tf.level_blocks(out, w, h), level):
            forward_pair(block, pair, counters)
    tf.check_headroom(out, grid.bit_depth, len(plan))
    return out


def inverse_plan(grid: SampleGrid, plan) -> np.ndarray:
    out = grid.samples.copy()
    dims = tf.level_dims(grid.width, grid.height, len(plan))
    for level, (w, h) in reversed(list(zip(plan, dims))):
        for block, pair in reversed(list(zip(tf.level_blocks(out, w, h), level))):
            inverse_pair(block, pair)
    return out


def forward_rdls_ssdwt(grid: SampleGrid, assignment: FilterAssignment, counters: CostCounters | None = None) -> SampleGrid:
    out = forward_plan(grid, plan_from_assignment(assignment), counters)
    return SampleGrid(grid.width, grid.height, grid.bit_depth, out)


def inverse_rdls_ssdwt(grid: SampleGrid, assignment: FilterAssignment) -> SampleGrid:
    out = inverse_plan(grid, plan_from_assignment(assignment))
    return SampleGrid(grid.width, grid.height, grid.bit_depth, out)


def canonical_filters(filters: Sequence) -> tuple[FilterId, ...]:
    return tuple(sorted({FilterId(f) for f in filters}))
