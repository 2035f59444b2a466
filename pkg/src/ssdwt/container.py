"""The ``.ssd`` container and the end-to-end compress/decompress pipelines.

Layout (version 1, multi-byte integers little-endian)::

    magic "SSDW" | version u8 | mode u8 | width u32 | height u32 | bit depth u8 | levels u8
    decision bits   SSDWT and RDLS_SSDWT: 9 bits per level, MSB first, zero padded
    filter ids      RDLS_SSDWT: one byte per slot, 6 per level
    payloads        per nominal region: length u32, then the coded bytes
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from ._format import HEADER_SIZE, LENGTH_FIELD, MAGIC, MAX_LEVELS, VERSION, Mode, decision_field_size, side_info_size
from .coding import Evaluator, decode_region, encode_region
from .errors import (
    BadMagic,
    BadVersion,
    CodecError,
    CorruptPayload,
    DimensionMismatch,
    IllegalDecisionBits,
    UnsupportedMode,
)
from .imageio import SampleGrid
from .rdls import FILTER_SLOTS, FilterAssignment, FilterId, forward_plan, inverse_plan, plan_from_assignment, plan_from_decisions
from .search import SearchConfig, SearchOutcome, VariantChoice, run_search, select_variant
from .transform import CostCounters, DecisionSet, FixedVariant, fixed_variant_decisions, nominal_regions

__all__ = [
    "CompressConfig",
    "CompressResult",
    "Header",
    "compress",
    "compress_detailed",
    "decompress",
    "read_header",
    "pack_bits",
    "unpack_bits",
]

_HEADER = struct.Struct("<4sBBIIBB")
assert _HEADER.size == HEADER_SIZE

_FIXED = {Mode.DWT: FixedVariant.DWT, Mode.FIX1: FixedVariant.FIX1, Mode.FIX2: FixedVariant.FIX2}


@dataclass(frozen=True)
class CompressConfig:
    """What to compress with.

    ``decisions``/``assignment`` fix the SSDWT/RDLS_SSDWT configuration
    directly; otherwise ``search`` runs the configured heuristic. ``select``
    (a tuple of fixed variants) picks among them with ``select_evaluator``
    and ignores ``mode``.
    """

    mode: Mode = Mode.DWT
    levels: int = 3
    decisions: DecisionSet | None = None
    assignment: FilterAssignment | None = None
    search: SearchConfig | None = None
    select: tuple | None = None
    select_evaluator: Evaluator = Evaluator.ACTUAL_BITRATE


@dataclass
class CompressResult:
    data: bytes
    mode: Mode
    levels: int
    pixels: int
    decisions: DecisionSet | None = None
    assignment: FilterAssignment | None = None
    outcome: SearchOutcome | None = None
    choice: VariantChoice | None = None
    counters: CostCounters = field(default_factory=CostCounters)

    @property
    def bpp(self) -> float:
        return 8 * len(self.data) / self.pixels

    @property
    def side_info_bytes(self) -> int:
        return side_info_size(self.mode, self.levels)

    @property
    def side_info_bpp(self) -> float:
        return 8 * self.side_info_bytes / self.pixels


@dataclass(frozen=True)
class Header:
    mode: Mode
    width: int
    height: int
    bit_depth: int
    levels: int


def pack_bits(bits) -> bytes:
    bits = [1 if b else 0 for b in bits]
    return np.packbits(np.array(bits, np.uint8)).tobytes() if bits else b""


def unpack_bits(data: bytes, count: int) -> list[bool]:
    return [bool(b) for b in np.unpackbits(np.frombuffer(data, np.uint8))[:count]]


def _serialize(grid: SampleGrid, mode: Mode, t: int, side: bytes, payloads) -> bytes:
    parts = [_HEADER.pack(MAGIC, VERSION, int(mode), grid.width, grid.height, grid.bit_depth, t), side]
    for p in payloads:
        parts.append(struct.pack("<I", len(p)))
        parts.append(p)
    return b"".join(parts)


def _side_info(mode: Mode, decisions: DecisionSet | None, assignment: FilterAssignment | None) -> bytes:
    if mode is Mode.SSDWT:
        return pack_bits(decisions.bits())
    if mode is Mode.RDLS_SSDWT:
        return pack_bits(assignment.decisions().bits()) + bytes(int(f) for lv in assignment.levels for f in lv)
    return b""


def _encode_all(array: np.ndarray, t: int, counters: CostCounters) -> list[bytes]:
    h, w = array.shape
    return [encode_region(r.view(array), counters, r.name).data for r in nominal_regions(w, h, t)]


def compress_detailed(image: SampleGrid, config: CompressConfig = CompressConfig(), counters: CostCounters | None = None) -> CompressResult:
    counters = counters if counters is not None else CostCounters()
    if not image.in_range():
        raise CodecError("image samples exceed the declared bit depth")
    if config.select is not None:
        choice = select_variant(image, config.select, config.select_evaluator, counters, config.levels)
        data = _serialize(image, choice.variant, choice.state.t, b"", choice.payloads)
        return CompressResult(data, choice.variant, choice.state.t, image.pixels, choice=choice, counters=counters)

    mode = Mode(config.mode)
    t = config.levels
    if not 0 <= t <= MAX_LEVELS:
        raise DimensionMismatch(f"levels must be in 0..{MAX_LEVELS}")
    decisions = assignment = outcome = None
    payloads = None
    if mode is Mode.NO_DWT:
        t, plan = 0, ()
    elif mode in _FIXED:
        plan = plan_from_decisions(fixed_variant_decisions(_FIXED[mode], t))
    elif mode is Mode.SSDWT:
        if config.decisions is not None:
            decisions = config.decisions.validate()
            t = decisions.t
        else:
            search = config.search or SearchConfig(levels=t)
            if search.heuristic.value == "rdls-ss":
                raise UnsupportedMode("SSDWT mode needs a step-skipping heuristic")
            outcome = run_search(image, _with_levels(search, t), counters)
            decisions = outcome.decisions
        plan = plan_from_decisions(decisions)
    elif mode is Mode.RDLS_SSDWT:
        if config.assignment is not None:
            assignment = config.assignment
            t = assignment.t
        else:
            search = config.search or SearchConfig(heuristic="rdls-ss", levels=t)
            if search.heuristic.value != "rdls-ss":
                raise UnsupportedMode("RDLS_SSDWT mode needs the rdls-ss heuristic")
            outcome = run_search(image, _with_levels(search, t), counters)
            assignment = outcome.decisions
        plan = plan_from_assignment(assignment)
    else:
        raise UnsupportedMode(f"mode {mode!r}")

    if outcome is not None and outcome.state.payloads is not None:
        payloads = outcome.state.payloads
    else:
        payloads = _encode_all(forward_plan(image, plan, counters), t, counters)
    data = _serialize(image, mode, t, _side_info(mode, decisions, assignment), payloads)
    return CompressResult(data, mode, t, image.pixels, decisions, assignment, outcome, None, counters)


def _with_levels(search: SearchConfig, t: int) -> SearchConfig:
    if search.levels == t:
        return search
    return SearchConfig(search.heuristic, search.iterations, search.evaluator, t, search.filters)


def compress(image: SampleGrid, config: CompressConfig = CompressConfig(), counters: CostCounters | None = None) -> bytes:
    """Compress ``image`` into container bytes; the bitrate is ``8 * len / p``."""
    return compress_detailed(image, config, counters).data


def read_header(data: bytes) -> Header:
    data = bytes(data)
    if data[:4] != MAGIC:
        raise BadMagic("not an SSDW container")
    if len(data) < HEADER_SIZE:
        raise CorruptPayload("container header is truncated", len(data))
    _, version, mode, width, height, depth, t = _HEADER.unpack_from(data)
    if version != VERSION:
        raise BadVersion(f"unsupported container version {version}")
    try:
        mode = Mode(mode)
    except ValueError:
        raise UnsupportedMode(f"unknown mode byte {mode}") from None
    if width < 1 or height < 1 or not 1 <= depth <= 16:
        raise DimensionMismatch(f"invalid geometry {width}x{height}, {depth} bits")
    if t > MAX_LEVELS or (mode is Mode.NO_DWT and t != 0):
        raise DimensionMismatch(f"invalid level count {t} for mode {mode.name}")
    return Header(mode, width, height, depth, t)


def _read_side_info(data: bytes, header: Header):
    t = header.levels
    offset = HEADER_SIZE
    n = side_info_size(header.mode, t)
    if len(data) < offset + n:
        raise CorruptPayload("side information is truncated", len(data))
    if header.mode in _FIXED:
        return plan_from_decisions(fixed_variant_decisions(_FIXED[header.mode], t)), offset
    if header.mode is Mode.NO_DWT:
        return (), offset
    nd = decision_field_size(t)
    field_bytes = data[offset : offset + nd]
    bits = np.unpackbits(np.frombuffer(field_bytes, np.uint8))
    if bits[9 * t :].any():
        raise IllegalDecisionBits("non-zero padding in the decision field")
    decisions = DecisionSet.from_bits([bool(b) for b in bits[: 9 * t]], t)
    if not decisions.legal:
        raise IllegalDecisionBits("decision bits skip a reorder of a pair with a performed step")
    if header.mode is Mode.SSDWT:
        return plan_from_decisions(decisions), offset + nd
    raw = data[offset + nd : offset + n]
    try:
        ids = [FilterId(b) for b in raw]
    except ValueError:
        raise IllegalDecisionBits("unknown filter id") from None
    assignment = FilterAssignment(tuple(tuple(ids[6 * i : 6 * i + 6]) for i in range(t)))
    if assignment.decisions() != decisions:
        raise IllegalDecisionBits("decision bits disagree with the filter ids")
    return plan_from_assignment(assignment), offset + n


def decompress(data: bytes) -> SampleGrid:
    """Decode a container. Raises a :class:`CodecError` and returns nothing on any damage."""
    data = bytes(data)
    header = read_header(data)
    plan, offset = _read_side_info(data, header)
    out = np.zeros((header.height, header.width), np.int64)
    for region in nominal_regions(header.width, header.height, header.levels):
        if len(data) < offset + LENGTH_FIELD:
            raise CorruptPayload(f"missing length of region {region.name}", offset)
        (n,) = struct.unpack_from("<I", data, offset)
        offset += LENGTH_FIELD
        if len(data) < offset + n:
            raise CorruptPayload(f"payload of region {region.name} is truncated", offset)
        try:
            out[region.slices] = decode_region(data[offset : offset + n], (region.h, region.w))
        except CorruptPayload as exc:
            raise CorruptPayload(f"region {region.name}: {exc}", offset) from None
        offset += n
    if offset != len(data):
        raise CorruptPayload("trailing bytes after the last region", offset)
    grid = SampleGrid(header.width, header.height, header.bit_depth, out)
    samples = inverse_plan(grid, plan)
    if samples.min() < 0 or samples.max() > (1 << header.bit_depth) - 1:
        raise CorruptPayload("decoded samples fall outside the declared bit depth")
    return SampleGrid(header.width, header.height, header.bit_depth, samples)
