"""Greedy step-skip and filter selection, fixed-variant selection, and a brute-force oracle."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction

from ._format import Mode, container_size
from .coding import EvaluationSession, Evaluator, PlanState, encode_region
from .errors import FilterSetTooSmall, TooLarge
from .imageio import SampleGrid
from .rdls import FilterAssignment, FilterId, canonical_filters
from .transform import (
    LEGAL_PAIR_STATES,
    PERFORM_ALL,
    SKIP_ALL,
    SUBBAND_ORDER,
    SUBBAND_SLOTS,
    CostCounters,
    DecisionSet,
    LevelDecisions,
    PairDecision,
    PairSlot,
    nominal_regions,
)

__all__ = [
    "Heuristic",
    "StartClass",
    "ImageClass",
    "SearchConfig",
    "Trial",
    "SearchOutcome",
    "VariantChoice",
    "BruteForceResult",
    "PredictedCost",
    "step_a",
    "bh",
    "rh",
    "h_ss_rdls",
    "run_search",
    "select_variant",
    "brute_force_best",
    "classify",
    "predicted_cost",
    "dwt_lifting_steps",
]


class Heuristic(enum.Enum):
    BH = "bh"
    BH_TR = "bh-tr"
    BH_AR = "bh-ar"
    BH_PW = "bh-pw"
    RH = "rh"
    H_SS_RDLS = "rdls-ss"


class StartClass(enum.Enum):
    ALL_SKIP_START = "AllSkipStart"
    PERFORM_START = "PerformStart"


class ImageClass(enum.Enum):
    NO_PHOTO_A = "NoPhotoA"
    OTHER = "Other"


DEFAULT_FILTERS = (FilterId.NONE, FilterId.NULL, FilterId.MEDIAN5)


@dataclass(frozen=True)
class SearchConfig:
    heuristic: Heuristic = Heuristic.RH
    iterations: int = 1
    evaluator: Evaluator = Evaluator.ACTUAL_BITRATE
    levels: int = 3
    filters: tuple = DEFAULT_FILTERS

    def __post_init__(self):
        object.__setattr__(self, "heuristic", Heuristic(self.heuristic))
        object.__setattr__(self, "evaluator", Evaluator(self.evaluator))
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")


@dataclass(frozen=True)
class Trial:
    """One entry of the search audit log."""

    level: int
    slot: str
    before: float
    after: float | None
    accepted: bool
    note: str = ""


@dataclass
class SearchOutcome:
    decisions: DecisionSet | FilterAssignment
    bpp: float
    classification: StartClass
    counters: CostCounters
    audit: list[Trial]
    state: PlanState = field(repr=False)
    evaluator: Evaluator = Evaluator.ACTUAL_BITRATE

    @property
    def accepted(self) -> int:
        return sum(1 for t in self.audit if t.accepted)


class _Greedy:
    """Shared trial/accept machinery on top of an evaluation session."""

    def __init__(self, image: SampleGrid, evaluator, counters: CostCounters | None):
        self.counters = counters if counters is not None else CostCounters()
        self.start = self.counters.snapshot()
        self.session = EvaluationSession(image, Evaluator(evaluator), self.counters)
        self.audit: list[Trial] = []
        self.config = None
        self.state: PlanState | None = None

    def evaluate(self, config, base=None) -> PlanState:
        return self.session.evaluate(config, base=base)

    def adopt(self, config, state):
        self.config, self.state = config, state

    def trial(self, candidate, level: int, slot: str) -> bool:
        state = self.evaluate(candidate, base=self.state)
        accepted = state.value < self.state.value
        self.audit.append(Trial(level, slot, self.state.value, state.value, accepted))
        if accepted:
            self.adopt(candidate, state)
        return accepted

    def outcome(self, classification: StartClass) -> SearchOutcome:
        return SearchOutcome(
            self.config,
            self.state.value,
            classification,
            self.counters - self.start,
            self.audit,
            self.state,
            self.session.evaluator,
        )


def _step_a(g: _Greedy, t: int, skip_pair: PairDecision = SKIP_ALL) -> StartClass:
    dwt = DecisionSet.uniform(t, PERFORM_ALL)
    skip = DecisionSet.uniform(t, skip_pair)
    s_dwt = g.evaluate(dwt)
    s_skip = g.evaluate(skip)
    g.audit.append(Trial(0, "A", s_dwt.value, s_skip.value, s_skip.value < s_dwt.value, "DWT vs all-skip"))
    if s_skip.value < s_dwt.value:
        g.adopt(skip, s_skip)
        return StartClass.ALL_SKIP_START
    g.adopt(dwt, s_dwt)
    return StartClass.PERFORM_START


def step_a(image: SampleGrid, t: int = 3, evaluator=Evaluator.ACTUAL_BITRATE, counters=None):
    """Pick the better of the unmodified DWT and the all-skipped transform (ties go to DWT)."""
    if t < 1:
        raise ValueError("step A needs at least one transform level")
    g = _Greedy(image, evaluator, counters)
    cls = _step_a(g, t)
    return g.config, cls


def bh(image: SampleGrid, t: int = 3, n: int = 1, flavor: str = "plain", evaluator=Evaluator.ACTUAL_BITRATE, counters=None) -> SearchOutcome:
    """Basic heuristic: step A, then ``n`` passes inverting one subband decision at a time.

    ``flavor`` is ``plain``, ``TR`` (also try the reorder of a fully skipped
    pair), ``AR`` (reorders always performed) or ``PW`` (whole pairs only).
    """
    flavor = flavor.upper() if flavor != "plain" else flavor
    if flavor not in ("plain", "TR", "AR", "PW"):
        raise ValueError(f"unknown BH flavor {flavor!r}")
    g = _Greedy(image, evaluator, counters)
    cls = _step_a(g, t, PairDecision(True, True, False) if flavor == "AR" else SKIP_ALL)
    rule = "perform" if flavor == "AR" else "derive"
    for _ in range(n):
        for level in range(1, t + 1):
            if flavor == "PW":
                for slot in PairSlot:
                    pair = g.config.levels[level - 1].pair(slot)
                    flipped = SKIP_ALL if pair == PERFORM_ALL else PERFORM_ALL
                    g.trial(g.config.with_pair(level, slot, flipped), level, slot.name)
                continue
            for sb in SUBBAND_ORDER:
                g.trial(g.config.toggled(level, sb, rule), level, sb)
                if flavor == "TR":
                    slot = SUBBAND_SLOTS[sb][0]
                    pair = g.config.levels[level - 1].pair(slot)
                    if pair.skip_pred and pair.skip_upd:
                        flipped = replace(pair, skip_reorder=not pair.skip_reorder)
                        g.trial(g.config.with_pair(level, slot, flipped), level, f"reorder:{slot.name}")
    return g.outcome(cls)


def rh(image: SampleGrid, t: int = 3, n: int = 1, evaluator=Evaluator.ACTUAL_BITRATE, counters=None) -> SearchOutcome:
    """Revised heuristic: step A picks which reduced step-B variant runs.

    After an all-skip start only prediction decisions are revisited (H, HL,
    HH). Otherwise L, HH, LL and LH are revisited; a trial that skips HH
    skips LH along with it, and LH is only tried on its own while HH is
    performed.
    """
    g = _Greedy(image, evaluator, counters)
    cls = _step_a(g, t)
    for _ in range(n):
        for level in range(1, t + 1):
            if cls is StartClass.ALL_SKIP_START:
                for sb in ("H", "HL", "HH"):
                    g.trial(g.config.toggled(level, sb), level, sb)
                continue
            for sb in ("L", "HH", "LL", "LH"):
                lv = g.config.levels[level - 1]
                if sb == "HH":
                    cand = g.config.toggled(level, "HH")
                    if cand.levels[level - 1].skips("HH") and not lv.skips("LH"):
                        cand = cand.toggled(level, "LH")
                    g.trial(cand, level, "HH")
                elif sb == "LH":
                    if not lv.skips("HH"):
                        g.trial(g.config.toggled(level, "LH"), level, "LH")
                    elif not lv.skips("LH"):
                        # unreachable when HH skips are coupled; kept for safety
                        cand = g.config.toggled(level, "LH")
                        g.adopt(cand, g.evaluate(cand, base=g.state))
                        g.audit.append(Trial(level, "LH", g.state.value, None, True, "coupled to HH"))
                else:
                    g.trial(g.config.toggled(level, sb), level, sb)
    return g.outcome(cls)


def h_ss_rdls(image: SampleGrid, t: int = 3, n: int = 1, filters=DEFAULT_FILTERS, evaluator=Evaluator.ACTUAL_BITRATE, counters=None) -> SearchOutcome:
    """Filter selection for RDLS with step skipping (NULL filter = skipped step).

    Step A applies each filter to every slot and keeps the best (ties go to
    the lower filter id). Step B revisits each slot and keeps the best other
    filter if it strictly improves. ``{NONE}`` alone yields the plain DWT.
    """
    filters = canonical_filters(filters)
    if not filters:
        raise FilterSetTooSmall("H_SS_RDLS needs at least one filter")
    if FilterId.NONE not in filters:
        raise ValueError("the filter set must contain NONE")
    g = _Greedy(image, evaluator, counters)
    best = None
    for f in filters:
        cand = FilterAssignment.uniform(t, f)
        state = g.evaluate(cand)
        g.audit.append(Trial(0, f"A:{f.name}", best[1].value if best else state.value, state.value, best is None or state.value < best[1].value))
        if best is None or state.value < best[1].value:
            best = (cand, state)
            chosen = f
    g.adopt(*best)
    cls = StartClass.ALL_SKIP_START if chosen is FilterId.NULL and t > 0 else StartClass.PERFORM_START
    for _ in range(n):
        for level in range(1, t + 1):
            for sb in SUBBAND_ORDER:
                current = g.config.slot(level, sb)
                choice = None
                for f in filters:
                    if f is current:
                        continue
                    cand = g.config.with_slot(level, sb, f)
                    state = g.evaluate(cand, base=g.state)
                    if state.value < (choice[1].value if choice else g.state.value):
                        choice = (cand, state)
                g.audit.append(Trial(level, sb, g.state.value, choice[1].value if choice else None, choice is not None))
                if choice is not None:
                    g.adopt(*choice)
    return g.outcome(cls)


def run_search(image: SampleGrid, config: SearchConfig, counters=None) -> SearchOutcome:
    h = config.heuristic
    args = dict(t=config.levels, n=config.iterations, evaluator=config.evaluator, counters=counters)
    if h is Heuristic.RH:
        return rh(image, **args)
    if h is Heuristic.H_SS_RDLS:
        return h_ss_rdls(image, filters=config.filters, **args)
    flavor = {Heuristic.BH: "plain", Heuristic.BH_TR: "TR", Heuristic.BH_AR: "AR", Heuristic.BH_PW: "PW"}[h]
    return bh(image, flavor=flavor, **args)


def classify(image: SampleGrid, t: int = 3, evaluator=Evaluator.ACTUAL_BITRATE, counters=None) -> ImageClass:
    _, cls = step_a(image, t, evaluator, counters)
    return ImageClass.NO_PHOTO_A if cls is StartClass.ALL_SKIP_START else ImageClass.OTHER


# --------------------------------------------------------------------------
# fixed variants

VARIANT_ORDER = (Mode.FIX1, Mode.FIX2, Mode.DWT, Mode.NO_DWT)


@dataclass
class VariantChoice:
    variant: Mode
    estimate: float
    bpp: float
    values: dict
    state: PlanState = field(repr=False)
    payloads: list = field(repr=False, default_factory=list)


def select_variant(image: SampleGrid, candidates=VARIANT_ORDER, evaluator=Evaluator.ACTUAL_BITRATE, counters=None, levels: int = 3) -> VariantChoice:
    """Evaluate each fixed variant and keep the cheapest (ties: FIX1, FIX2, DWT, NO_DWT).

    The chosen variant is then actually encoded; with the bitrate evaluator
    the payloads produced during evaluation are reused instead.
    """
    wanted = {Mode[c.upper().replace("-", "_")] if isinstance(c, str) else Mode(c) for c in candidates}
    if not wanted:
        raise ValueError("no candidate variants")
    if not wanted <= set(VARIANT_ORDER):
        raise ValueError(f"not a fixed variant: {wanted - set(VARIANT_ORDER)}")
    counters = counters if counters is not None else CostCounters()
    session = EvaluationSession(image, Evaluator(evaluator), counters)
    best = None
    values = {}
    for mode in VARIANT_ORDER:
        if mode not in wanted:
            continue
        state = session.evaluate(mode, levels=levels)
        values[mode] = state.value
        if best is None or state.value < best[1].value:
            best = (mode, state)
    mode, state = best
    if state.payloads is not None:
        payloads = state.payloads
    else:
        regions = nominal_regions(image.width, image.height, state.t)
        payloads = [encode_region(r.view(state.grid), counters, r.name).data for r in regions]
    bpp = 8 * container_size(mode, state.t, [len(p) for p in payloads]) / image.pixels
    return VariantChoice(mode, state.value, bpp, values, state, payloads)


# --------------------------------------------------------------------------
# exhaustive oracle


@dataclass
class BruteForceResult:
    decisions: DecisionSet
    bpp: float
    combinations: int


def brute_force_best(image: SampleGrid, t: int = 1, evaluator=Evaluator.ACTUAL_BITRATE, counters=None) -> BruteForceResult:
    """Exhaustively evaluate every legal decision set (5 states per pair per level)."""
    if t > 2 or image.width > 64 or image.height > 64:
        raise TooLarge("brute force is limited to t <= 2 and images up to 64x64")
    session = EvaluationSession(image, Evaluator(evaluator), counters if counters is not None else CostCounters())
    best = None
    state = None
    count = 0
    for combo in itertools.product(LEGAL_PAIR_STATES, repeat=3 * t):
        ds = DecisionSet(tuple(LevelDecisions(*combo[3 * i : 3 * i + 3]) for i in range(t)))
        state = session.evaluate(ds, base=state)
        count += 1
        if best is None or state.value < best[1]:
            best = (ds, state.value)
    return BruteForceResult(best[0], best[1], count)


# --------------------------------------------------------------------------
# complexity accounting


def dwt_lifting_steps(t: int) -> Fraction:
    """Lifting steps of a full t-level DWT per pixel (power-of-two images)."""
    return Fraction(8, 3) * (1 - Fraction(1, 4**t))


@dataclass(frozen=True)
class PredictedCost:
    """Costs in units of one full entropy coding pass (T_E) and one DWT (T_D).

    ``te``/``td`` are the bounds as the level count grows without limit;
    ``symbols``/``lifting`` are per-pixel bounds at the given finite ``t``.
    """

    heuristic: str
    n: int
    t: int
    te: Fraction
    td: Fraction
    symbols: Fraction
    lifting: Fraction

    def relative_time(self, t_d: float, t_e: float, t_r: float, t_h0: float | None = None) -> float:
        """Predicted time relative to one unmodified compression (T_D + T_E + T_R).

        With ``t_h0`` the search evaluations are charged at the entropy
        estimation rate and one final encoding pass is added.
        """
        if t_h0 is None:
            cost = float(self.td) * t_d + float(self.te) * t_e + t_r
        else:
            cost = float(self.td) * t_d + float(self.te) * t_h0 + t_e + t_r
        return cost / (t_d + t_e + t_r)

    def formula(self, estimator: str = "bitrate") -> str:
        if estimator == "h0":
            return f"{float(self.td):.2f} T_D + {float(self.te):.2f} T_H0 + T_E + T_R"
        return f"{float(self.td):.2f} T_D + {float(self.te):.2f} T_E + T_R"


def predicted_cost(heuristic, n: int, t: int = 3) -> PredictedCost:
    heuristic = Heuristic(heuristic)
    n = Fraction(n)
    if heuristic is Heuristic.BH:
        te = 2 + Fraction(16, 3) * n
        td = 1 + Fraction(13, 3) * n
        symbols = 2 + Fraction(16, 3) * (1 - Fraction(1, 4**t)) * n
        per_iter = Fraction(104, 9) - Fraction(1, 3) * Fraction(2) ** (5 - 2 * t) * t - Fraction(13, 9) * Fraction(2) ** (3 - 2 * t)
        lifting = dwt_lifting_steps(t) + per_iter * n
    elif heuristic is Heuristic.RH:
        te = 2 + Fraction(10, 3) * n
        td = 1 + Fraction(29, 12) * n
        symbols = te
        lifting = td * dwt_lifting_steps(t)
    else:
        raise ValueError("cost model exists for BH and RH only")
    return PredictedCost(heuristic.value, int(n), t, te, td, symbols, lifting)
