"""Compiled kernels for the region entropy coder.

Format (version 1), per region, raster order:

* ``u = 2v`` for ``v >= 0``, else ``-2v - 1``; ``n = u + 1`` is written as an
  Elias-gamma code: ``N = bitlen(n) - 1`` zeros, a one, then the low ``N``
  bits of ``n`` MSB first.
* Prefix bins (the zeros and the terminating one) are arithmetic coded with
  an adaptive binary model selected by (context, bin position). Counts start
  at 1/1 and are halved (rounding up) when their total reaches 1024.
* The context is the bucket of ``(|west| + |north|) // 2``, neighbours
  outside the region counting as 0.
* Suffix bits are coded at probability 1/2.

The arithmetic coder is a 32-bit low/high coder with underflow counting; it
terminates by emitting a single 1 bit and zero padding to a byte boundary.
"""

import numpy as np
from numba import njit

N_CONTEXTS = 8
N_POSITIONS = 64
COUNT_LIMIT = 1024

_MASK = (1 << 32) - 1
_TOP = 1 << 31
_SECOND = 1 << 30
_HALF_MASK = _MASK >> 1

# state slots
_LOW, _HIGH, _PENDING, _ACC, _NACC, _POS, _CODE, _BITPOS = range(8)


@njit(cache=True, inline="always")
def _context(v_west, v_north):
    m = (abs(v_west) + abs(v_north)) >> 1
    if m <= 2:
        return m
    b = 0
    x = m - 1
    while x:
        b += 1
        x >>= 1
    c = b + 1
    return c if c < 7 else 7


@njit(cache=True)
def _emit(st, out, bit):
    acc = (st[_ACC] << 1) | bit
    n = st[_NACC] + 1
    if n == 8:
        pos = st[_POS]
        if pos >= out.shape[0]:
            st[_POS] = pos + 1
        else:
            out[pos] = acc
            st[_POS] = pos + 1
        acc = 0
        n = 0
    st[_ACC] = acc
    st[_NACC] = n


@njit(cache=True)
def _encode_bin(st, out, c0, total, bit):
    low = st[_LOW]
    high = st[_HIGH]
    rng = high - low + 1
    split = low + rng * c0 // total
    if bit == 0:
        high = split - 1
    else:
        low = split
    while ((low ^ high) & _TOP) == 0:
        b = low >> 31
        _emit(st, out, b)
        for _ in range(st[_PENDING]):
            _emit(st, out, b ^ 1)
        st[_PENDING] = 0
        low = (low << 1) & _MASK
        high = ((high << 1) & _MASK) | 1
    while (low & ~high & _SECOND) != 0:
        st[_PENDING] += 1
        low = (low << 1) & _HALF_MASK
        high = ((high << 1) & _HALF_MASK) | _TOP | 1
    st[_LOW] = low
    st[_HIGH] = high


@njit(cache=True)
def encode_kernel(values, out):
    """Encode a 2-D int64 region into ``out``.

    Returns the byte count, or -1 if ``out`` was too small.
    """
    h, w = values.shape
    zeros = np.ones((N_CONTEXTS, N_POSITIONS), np.int64)
    ones = np.ones((N_CONTEXTS, N_POSITIONS), np.int64)
    st = np.zeros(8, np.int64)
    st[_HIGH] = _MASK
    for y in range(h):
        for x in range(w):
            v = values[y, x]
            west = values[y, x - 1] if x > 0 else 0
            north = values[y - 1, x] if y > 0 else 0
            ctx = _context(west, north)
            u = 2 * v if v >= 0 else -2 * v - 1
            n = u + 1
            nbits = 0
            t = n
            while t > 1:
                nbits += 1
                t >>= 1
            for pos in range(nbits + 1):
                bit = 1 if pos == nbits else 0
                p = pos if pos < N_POSITIONS else N_POSITIONS - 1
                c0 = zeros[ctx, p]
                c1 = ones[ctx, p]
                _encode_bin(st, out, c0, c0 + c1, bit)
                if bit:
                    c1 += 1
                else:
                    c0 += 1
                if c0 + c1 >= COUNT_LIMIT:
                    c0 = (c0 + 1) >> 1
                    c1 = (c1 + 1) >> 1
                zeros[ctx, p] = c0
                ones[ctx, p] = c1
            for i in range(nbits - 1, -1, -1):
                _encode_bin(st, out, 1, 2, (n >> i) & 1)
    _emit(st, out, 1)
    while st[_NACC] != 0:
        _emit(st, out, 0)
    if st[_POS] > out.shape[0]:
        return -1
    return st[_POS]


@njit(cache=True)
def _read_bit(st, data):
    pos = st[_BITPOS]
    st[_BITPOS] = pos + 1
    byte = pos >> 3
    if byte >= data.shape[0]:
        return 0
    return (data[byte] >> (7 - (pos & 7))) & 1


@njit(cache=True)
def _decode_bin(st, data, c0, total):
    low = st[_LOW]
    high = st[_HIGH]
    code = st[_CODE]
    rng = high - low + 1
    split = low + rng * c0 // total
    if code < split:
        bit = 0
        high = split - 1
    else:
        bit = 1
        low = split
    while ((low ^ high) & _TOP) == 0:
        code = ((code << 1) & _MASK) | _read_bit(st, data)
        low = (low << 1) & _MASK
        high = ((high << 1) & _MASK) | 1
    while (low & ~high & _SECOND) != 0:
        code = (code & _TOP) | ((code << 1) & _HALF_MASK) | _read_bit(st, data)
        low = (low << 1) & _HALF_MASK
        high = ((high << 1) & _HALF_MASK) | _TOP | 1
    st[_LOW] = low
    st[_HIGH] = high
    st[_CODE] = code
    return bit


@njit(cache=True)
def decode_kernel(data, out):
    """Decode into the preallocated 2-D int64 ``out``.

    Returns 0 on success, 1 when the code stream desynchronised (an
    impossible prefix length or reading far past the end of ``data``).
    """
    h, w = out.shape
    zeros = np.ones((N_CONTEXTS, N_POSITIONS), np.int64)
    ones = np.ones((N_CONTEXTS, N_POSITIONS), np.int64)
    st = np.zeros(8, np.int64)
    st[_HIGH] = _MASK
    code = 0
    for _ in range(32):
        code = (code << 1) | _read_bit(st, data)
    st[_CODE] = code
    limit = data.shape[0] * 8 + 64
    for y in range(h):
        for x in range(w):
            west = out[y, x - 1] if x > 0 else 0
            north = out[y - 1, x] if y > 0 else 0
            ctx = _context(west, north)
            nbits = 0
            while True:
                p = nbits if nbits < N_POSITIONS else N_POSITIONS - 1
                c0 = zeros[ctx, p]
                c1 = ones[ctx, p]
                bit = _decode_bin(st, data, c0, c0 + c1)
                if bit:
                    c1 += 1
                else:
                    c0 += 1
                if c0 + c1 >= COUNT_LIMIT:
                    c0 = (c0 + 1) >> 1
                    c1 = (c1 + 1) >> 1
                zeros[ctx, p] = c0
                ones[ctx, p] = c1
                if bit:
                    break
                nbits += 1
                if nbits > 62 or st[_BITPOS] > limit:
                    return 1
            n = 1
            for _ in range(nbits):
                n = (n << 1) | _decode_bin(st, data, 1, 2)
            u = n - 1
            out[y, x] = u >> 1 if (u & 1) == 0 else -((u + 1) >> 1)
            if st[_BITPOS] > limit:
                return 1
    return 0
