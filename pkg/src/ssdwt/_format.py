"""Container layout constants shared by the evaluator and the container."""

import enum

MAGIC = b"SSDW"
VERSION = 1
# magic, version, mode, width u32, height u32, bit depth, levels
HEADER_SIZE = 16
LENGTH_FIELD = 4
MAX_LEVELS = 16


class Mode(enum.IntEnum):
    DWT = 0
    NO_DWT = 1
    SSDWT = 2
    FIX1 = 3
    FIX2 = 4
    RDLS_SSDWT = 5


def decision_field_size(t: int) -> int:
    return (9 * t + 7) // 8


def side_info_size(mode: Mode, t: int) -> int:
    if mode is Mode.SSDWT:
        return decision_field_size(t)
    if mode is Mode.RDLS_SSDWT:
        return decision_field_size(t) + 6 * t
    return 0


def container_size(mode: Mode, t: int, payload_lengths) -> int:
    return HEADER_SIZE + side_info_size(mode, t) + sum(LENGTH_FIELD + n for n in payload_lengths)
