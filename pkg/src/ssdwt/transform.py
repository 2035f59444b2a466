"""Reversible 5x3 lifting DWT and its skipped-steps generalization.

Layout conventions used throughout the package:

* A level-``l`` transform works on the top-left ``w x h`` rectangle of the
  grid, where ``w``/``h`` come from repeatedly ceil-halving the image size.
* Columns are transformed first (the *vertical* pair, producing L over H),
  then the rows of the top ``ceil(h/2)`` band (*low row* pair: LL | HL) and
  the rows of the bottom band (*high row* pair: LH | HH).
* Boundaries use whole-sample symmetric extension. A 1-D segment of length 1
  is left untouched by every step.
* The next level always consumes the nominal top-left quadrant, whether or
  not the reorder steps actually gathered the low-pass samples there.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DynamicRangeError, IllegalDecisions
from .imageio import SampleGrid

__all__ = [
    "StepKind",
    "PairSlot",
    "PairDecision",
    "LevelDecisions",
    "DecisionSet",
    "FixedVariant",
    "Region",
    "CostCounters",
    "Impact",
    "SUBBAND_ORDER",
    "SUBBAND_SLOTS",
    "LEGAL_PAIR_STATES",
    "predict_pass",
    "update_pass",
    "reorder_pass",
    "forward_ssdwt",
    "inverse_ssdwt",
    "level_dims",
    "nominal_regions",
    "affected_regions",
    "regions_affected_by",
    "fixed_variant_decisions",
]


class StepKind(enum.Enum):
    PREDICTION = "prediction"
    UPDATE = "update"
    REORDER = "reorder"


class PairSlot(enum.IntEnum):
    """The three complementary subband pairs produced at every level."""

    VERTICAL = 0  # (L, H)
    LOW_ROW = 1  # (LL, HL)
    HIGH_ROW = 2  # (LH, HH)


# subband -> (pair, step it owns)
SUBBAND_SLOTS = {
    "H": (PairSlot.VERTICAL, StepKind.PREDICTION),
    "L": (PairSlot.VERTICAL, StepKind.UPDATE),
    "HL": (PairSlot.LOW_ROW, StepKind.PREDICTION),
    "LL": (PairSlot.LOW_ROW, StepKind.UPDATE),
    "HH": (PairSlot.HIGH_ROW, StepKind.PREDICTION),
    "LH": (PairSlot.HIGH_ROW, StepKind.UPDATE),
}
SUBBAND_ORDER = ("H", "L", "HL", "HH", "LL", "LH")
PAIR_SUBBANDS = {
    PairSlot.VERTICAL: ("H", "L"),
    PairSlot.LOW_ROW: ("HL", "LL"),
    PairSlot.HIGH_ROW: ("HH", "LH"),
}


@dataclass(frozen=True)
class PairDecision:
    """Skip flags for one complementary pair at one level."""

    skip_pred: bool = False
    skip_upd: bool = False
    skip_reorder: bool = False

    @property
    def legal(self) -> bool:
        return not self.skip_reorder or (self.skip_pred and self.skip_upd)

    def with_step(self, kind: StepKind, skip: bool) -> "PairDecision":
        if kind is StepKind.PREDICTION:
            return replace(self, skip_pred=skip)
        if kind is StepKind.UPDATE:
            return replace(self, skip_upd=skip)
        return replace(self, skip_reorder=skip)

    def skips(self, kind: StepKind) -> bool:
        if kind is StepKind.PREDICTION:
            return self.skip_pred
        if kind is StepKind.UPDATE:
            return self.skip_upd
        return self.skip_reorder


PERFORM_ALL = PairDecision()
SKIP_ALL = PairDecision(True, True, True)

LEGAL_PAIR_STATES = (
    PairDecision(False, False, False),
    PairDecision(True, False, False),
    PairDecision(False, True, False),
    PairDecision(True, True, False),
    PairDecision(True, True, True),
)


@dataclass(frozen=True)
class LevelDecisions:
    vertical: PairDecision = PERFORM_ALL
    low_row: PairDecision = PERFORM_ALL
    high_row: PairDecision = PERFORM_ALL

    @classmethod
    def uniform(cls, pair: PairDecision) -> "LevelDecisions":
        return cls(pair, pair, pair)

    @property
    def pairs(self) -> tuple[PairDecision, PairDecision, PairDecision]:
        return (self.vertical, self.low_row, self.high_row)

    def pair(self, slot: PairSlot) -> PairDecision:
        return self.pairs[slot]

    def with_pair(self, slot: PairSlot, decision: PairDecision) -> "LevelDecisions":
        pairs = list(self.pairs)
        pairs[slot] = decision
        return LevelDecisions(*pairs)

    @property
    def skip_pred(self) -> dict[str, bool]:
        return {"H": self.vertical.skip_pred, "HL": self.low_row.skip_pred, "HH": self.high_row.skip_pred}

    @property
    def skip_upd(self) -> dict[str, bool]:
        return {"L": self.vertical.skip_upd, "LL": self.low_row.skip_upd, "LH": self.high_row.skip_upd}

    @property
    def skip_reorder(self) -> dict[PairSlot, bool]:
        return {slot: self.pair(slot).skip_reorder for slot in PairSlot}

    def skips(self, subband: str) -> bool:
        slot, kind = SUBBAND_SLOTS[subband]
        return self.pair(slot).skips(kind)

    @property
    def legal(self) -> bool:
        return all(p.legal for p in self.pairs)

    def bits(self) -> tuple[bool, ...]:
        """The 9 skip flags: (pred, upd, reorder) for V, low-row, high-row."""
        return tuple(flag for p in self.pairs for flag in (p.skip_pred, p.skip_upd, p.skip_reorder))

    @classmethod
    def from_bits(cls, bits: Sequence[bool]) -> "LevelDecisions":
        b = [bool(x) for x in bits]
        if len(b) != 9:
            raise ValueError("a level needs exactly 9 decision bits")
        return cls(PairDecision(*b[0:3]), PairDecision(*b[3:6]), PairDecision(*b[6:9]))


@dataclass(frozen=True)
class DecisionSet:
    """Per-level skip decisions for a ``t``-level SS-DWT (``t == 0`` is NO-DWT)."""

    levels: tuple[LevelDecisions, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))

    @property
    def t(self) -> int:
        return len(self.levels)

    @classmethod
    def uniform(cls, t: int, pair: PairDecision = PERFORM_ALL) -> "DecisionSet":
        return cls(tuple(LevelDecisions.uniform(pair) for _ in range(t)))

    @property
    def legal(self) -> bool:
        return all(level.legal for level in self.levels)

    def validate(self) -> "DecisionSet":
        for i, level in enumerate(self.levels, 1):
            if not level.legal:
                raise IllegalDecisions(f"level {i} skips a reorder while performing a lifting step")
        return self

    def with_pair(self, level: int, slot: PairSlot, decision: PairDecision) -> "DecisionSet":
        levels = list(self.levels)
        levels[level - 1] = levels[level - 1].with_pair(slot, decision)
        return DecisionSet(tuple(levels))

    def toggled(self, level: int, subband: str, reorder: str = "derive") -> "DecisionSet":
        """Invert one lifting-step decision.

        ``reorder`` selects how the pair's reorder flag follows: ``"derive"``
        skips it iff both steps end up skipped, ``"perform"`` never skips it,
        ``"keep"`` keeps the current flag unless that would be illegal.
        """
        slot, kind = SUBBAND_SLOTS[subband]
        pair = self.levels[level - 1].pair(slot)
        pair = pair.with_step(kind, not pair.skips(kind))
        both = pair.skip_pred and pair.skip_upd
        if reorder == "derive":
            pair = replace(pair, skip_reorder=both)
        elif reorder == "perform":
            pair = replace(pair, skip_reorder=False)
        elif reorder == "keep":
            pair = replace(pair, skip_reorder=pair.skip_reorder and both)
        else:
            raise ValueError(f"unknown reorder rule {reorder!r}")
        return self.with_pair(level, slot, pair)

    def bits(self) -> tuple[bool, ...]:
        return tuple(b for level in self.levels for b in level.bits())

    @classmethod
    def from_bits(cls, bits: Sequence[bool], t: int) -> "DecisionSet":
        return cls(tuple(LevelDecisions.from_bits(bits[9 * i : 9 * i + 9]) for i in range(t)))

    def skipped_count(self) -> int:
        return sum(self.bits())


class FixedVariant(enum.Enum):
    DWT = "DWT"
    ALL_SKIP = "ALL_SKIP"
    FIX1 = "FIX1"
    FIX2 = "FIX2"


def fixed_variant_decisions(variant, t: int) -> DecisionSet:
    variant = FixedVariant(variant)
    if variant is FixedVariant.DWT:
        return DecisionSet.uniform(t, PERFORM_ALL)
    if variant is FixedVariant.ALL_SKIP:
        return DecisionSet.uniform(t, SKIP_ALL)
    skip_update = PairDecision(skip_upd=True)
    high = PairDecision(True, True, True) if variant is FixedVariant.FIX2 else skip_update
    return DecisionSet(tuple(LevelDecisions(skip_update, skip_update, high) for _ in range(t)))


@dataclass
class CostCounters:
    """Operation counts used to check the complexity formulas."""

    lifting_steps: int = 0
    encoded_symbols: int = 0
    entropy_evals: int = 0

    def reset(self) -> None:
        self.lifting_steps = self.encoded_symbols = self.entropy_evals = 0

    def snapshot(self) -> "CostCounters":
        return CostCounters(self.lifting_steps, self.encoded_symbols, self.entropy_evals)

    def __sub__(self, other: "CostCounters") -> "CostCounters":
        return CostCounters(
            self.lifting_steps - other.lifting_steps,
            self.encoded_symbols - other.encoded_symbols,
            self.entropy_evals - other.entropy_evals,
        )


# --------------------------------------------------------------------------
# 1-D lifting along axis 0 of a 2-D view (every column is one segment)


def _predict(block: np.ndarray, counters: CostCounters | None) -> None:
    n = block.shape[0]
    if n < 2:
        return
    even, odd = block[0::2], block[1::2]
    n_odd = odd.shape[0]
    right = even[1:] if even.shape[0] > n_odd else np.concatenate((even[1:], even[-1:]))
    odd -= (even[:n_odd] + right) >> 1
    if counters is not None:
        counters.lifting_steps += n_odd * block.shape[1]


def _unpredict(block: np.ndarray) -> None:
    n = block.shape[0]
    if n < 2:
        return
    even, odd = block[0::2], block[1::2]
    n_odd = odd.shape[0]
    right = even[1:] if even.shape[0] > n_odd else np.concatenate((even[1:], even[-1:]))
    odd += (even[:n_odd] + right) >> 1


def _update_increment(odd: np.ndarray, n_even: int) -> np.ndarray:
    left = np.concatenate((odd[:1], odd[: n_even - 1]))
    right = odd if odd.shape[0] == n_even else np.concatenate((odd, odd[-1:]))
    return (left + right + 2) >> 2


def _update(block: np.ndarray, counters: CostCounters | None) -> None:
    n = block.shape[0]
    if n < 2:
        return
    even = block[0::2]
    even += _update_increment(block[1::2], even.shape[0])
    if counters is not None:
        counters.lifting_steps += even.shape[0] * block.shape[1]


def _unupdate(block: np.ndarray) -> None:
    n = block.shape[0]
    if n < 2:
        return
    even = block[0::2]
    even -= _update_increment(block[1::2], even.shape[0])


def _reorder(block: np.ndarray) -> None:
    if block.shape[0] < 2:
        return
    block[:] = np.concatenate((block[0::2], block[1::2]))


def _unreorder(block: np.ndarray) -> None:
    n = block.shape[0]
    if n < 2:
        return
    tmp = block.copy()
    n_even = (n + 1) // 2
    block[0::2] = tmp[:n_even]
    block[1::2] = tmp[n_even:]


def _as_column(segment):
    arr = np.asarray(segment, dtype=np.int64)
    if arr.ndim != 1:
        raise ValueError("segment must be one-dimensional")
    return arr.reshape(-1, 1).copy()


def _write_back(segment, column: np.ndarray):
    segment[:] = column[:, 0].tolist() if isinstance(segment, list) else column[:, 0]
    return segment


def predict_pass(segment, counters: CostCounters | None = None):
    """Apply the prediction lifting step to the odd samples of ``segment`` in place."""
    col = _as_column(segment)
    _predict(col, counters)
    return _write_back(segment, col)


def update_pass(segment, counters: CostCounters | None = None):
    """Apply the update lifting step to the even samples of ``segment`` in place."""
    col = _as_column(segment)
    _update(col, counters)
    return _write_back(segment, col)


def reorder_pass(segment):
    col = _as_column(segment)
    _reorder(col)
    return _write_back(segment, col)


# --------------------------------------------------------------------------
# 2-D multi-level transform


def level_dims(width: int, height: int, t: int) -> list[tuple[int, int]]:
    """Input rectangle ``(w, h)`` for each level 1..t."""
    dims = []
    w, h = width, height
    for _ in range(t):
        dims.append((w, h))
        w, h = (w + 1) // 2, (h + 1) // 2
    return dims


def level_blocks(array: np.ndarray, w: int, h: int):
    """The three pass views of a level rectangle, each with its transform axis first."""
    rect = array[:h, :w]
    ch = (h + 1) // 2
    return rect, rect[:ch].T, rect[ch:].T


def _forward_pair(block: np.ndarray, pair: PairDecision, counters) -> None:
    if block.shape[1] == 0:
        return
    if not pair.skip_pred:
        _predict(block, counters)
    if not pair.skip_upd:
        _update(block, counters)
    if not pair.skip_reorder:
        _reorder(block)


def _inverse_pair(block: np.ndarray, pair: PairDecision) -> None:
    if block.shape[1] == 0:
        return
    if not pair.skip_reorder:
        _unreorder(block)
    if not pair.skip_upd:
        _unupdate(block)
    if not pair.skip_pred:
        _unpredict(block)


def headroom_bound(bit_depth: int, t: int) -> int:
    return 1 << (bit_depth + t + 2)


def check_headroom(array: np.ndarray, bit_depth: int, t: int) -> None:
    if array.size and int(np.abs(array).max()) >= headroom_bound(bit_depth, t):
        raise DynamicRangeError(
            f"transformed sample exceeds 2^{bit_depth + t + 2}; headroom invariant broken"
        )


def forward_ssdwt(grid: SampleGrid, decisions: DecisionSet, counters: CostCounters | None = None) -> SampleGrid:
    """Forward SS-DWT. Returns a new grid; ``grid`` is not modified."""
    decisions.validate()
    out = grid.samples.copy()
    for level, (w, h) in zip(decisions.levels, level_dims(grid.width, grid.height, decisions.t)):
        for block, pair in zip(level_blocks(out, w, h), level.pairs):
            _forward_pair(block, pair, counters)
    check_headroom(out, grid.bit_depth, decisions.t)
    return SampleGrid(grid.width, grid.height, grid.bit_depth, out)


def inverse_ssdwt(grid: SampleGrid, decisions: DecisionSet, counters: CostCounters | None = None) -> SampleGrid:
    decisions.validate()
    out = grid.samples.copy()
    dims = level_dims(grid.width, grid.height, decisions.t)
    for level, (w, h) in reversed(list(zip(decisions.levels, dims))):
        blocks = level_blocks(out, w, h)
        for block, pair in reversed(list(zip(blocks, level.pairs))):
            _inverse_pair(block, pair)
            if counters is not None and block.shape[0] >= 2:
                counters.lifting_steps += block.shape[1] * (
                    (not pair.skip_pred) * (block.shape[0] // 2)
                    + (not pair.skip_upd) * ((block.shape[0] + 1) // 2)
                )
    return SampleGrid(grid.width, grid.height, grid.bit_depth, out)


# --------------------------------------------------------------------------
# nominal regions and dependency tracing


@dataclass(frozen=True)
class Region:
    level: int
    label: str
    x: int
    y: int
    w: int
    h: int

    @property
    def name(self) -> str:
        return f"{self.label}{self.level}" if self.level else "IMG"

    @property
    def size(self) -> int:
        return self.w * self.h

    @property
    def slices(self) -> tuple[slice, slice]:
        return slice(self.y, self.y + self.h), slice(self.x, self.x + self.w)

    def view(self, array: np.ndarray) -> np.ndarray:
        return array[self.slices]


def nominal_regions(width: int, height: int, t: int) -> list[Region]:
    """The ``3t + 1`` independently coded rectangles, LL_t first."""
    if t == 0:
        return [Region(0, "LL", 0, 0, width, height)]
    dims = level_dims(width, height, t)
    detail = []
    for level in range(t, 0, -1):
        w, h = dims[level - 1]
        cw, ch = (w + 1) // 2, (h + 1) // 2
        detail += [
            Region(level, "HL", cw, 0, w - cw, ch),
            Region(level, "LH", 0, ch, cw, h - ch),
            Region(level, "HH", cw, ch, w - cw, h - ch),
        ]
    w, h = dims[-1]
    return [Region(t, "LL", 0, 0, (w + 1) // 2, (h + 1) // 2)] + detail


def region_index(t: int, level: int, label: str) -> int:
    if label == "LL":
        return 0
    return 1 + 3 * (t - level) + ("HL", "LH", "HH").index(label)


class Impact(NamedTuple):
    """Regions whose payload may change, and the first pass to recompute."""

    regions: frozenset[int]
    recompute_level: int | None
    recompute_pair: PairSlot | None


def _levels_above(t: int, level: int) -> set[int]:
    idx = {0}
    for upper in range(level + 1, t + 1):
        idx.update(region_index(t, upper, lab) for lab in ("HL", "LH", "HH"))
    return idx


def plan_impact(before, after) -> Impact:
    """Dependency tracing between two per-level pair plans.

    Each plan is a sequence of levels, each level a sequence of three
    ``(pred, upd, skip_reorder)`` triples in :class:`PairSlot` order. ``pred``
    and ``upd`` are opaque step identifiers with ``None`` meaning the step is
    skipped; two plans differ at a step when these identifiers differ.
    """
    t = len(after)
    if len(before) != t:
        raise ValueError("plans must have the same number of levels")
    changed: set[int] = set()
    first = None
    for level in range(1, t + 1):
        for slot in PairSlot:
            b = before[level - 1][slot]
            a = after[level - 1][slot]
            if tuple(b) == tuple(a):
                continue
            if first is None:
                first = (level, slot)
            if b[2] != a[2]:
                changed |= _levels_above(t, level - 1)
                continue
            pred_changed = b[0] != a[0]
            low_changed = b[1] != a[1] or (pred_changed and (a[1] is not None or b[1] is not None))
            if slot is PairSlot.VERTICAL:
                if pred_changed:
                    changed |= {region_index(t, level, "LH"), region_index(t, level, "HH")}
                if low_changed:
                    changed |= {region_index(t, level, "HL")} | _levels_above(t, level)
            elif slot is PairSlot.LOW_ROW:
                if pred_changed:
                    changed.add(region_index(t, level, "HL"))
                if low_changed:
                    changed |= _levels_above(t, level)
            else:
                if pred_changed:
                    changed.add(region_index(t, level, "HH"))
                if low_changed:
                    changed.add(region_index(t, level, "LH"))
    if first is None:
        return Impact(frozenset(), None, None)
    return Impact(frozenset(changed), first[0], first[1])


def decision_plan(decisions: DecisionSet):
    return tuple(
        tuple((None if p.skip_pred else True, None if p.skip_upd else True, p.skip_reorder) for p in level.pairs)
        for level in decisions.levels
    )


def regions_affected_by(before: DecisionSet, after: DecisionSet) -> Impact:
    """Regions (indices in :func:`nominal_regions` order) that can differ between two decision sets."""
    return plan_impact(decision_plan(before), decision_plan(after))


def affected_regions(decisions: DecisionSet, level: int, subband: str, reorder: str = "derive") -> Impact:
    """Impact of inverting the ``subband`` step decision at ``level``.

    Widening to every region at levels >= ``level`` happens whenever the
    inversion toggles the pair's reorder flag.
    """
    return plan_impact(decision_plan(decisions), decision_plan(decisions.toggled(level, subband, reorder)))
