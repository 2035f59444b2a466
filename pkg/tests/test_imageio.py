import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ssdwt import SampleGrid, read_pgm, write_pgm
from ssdwt.errors import BadHeader, BadMagic, OutOfRange, Truncated


def test_read_8bit():
    g = read_pgm(b"P5\n2 2\n255\n" + bytes([0, 1, 2, 3]))
    assert (g.width, g.height, g.bit_depth) == (2, 2, 8)
    assert g.samples.tolist() == [[0, 1], [2, 3]]


def test_read_16bit_big_endian():
    g = read_pgm(b"P5\n1 1\n65535\n" + bytes([0x01, 0x00]))
    assert g.samples.tolist() == [[256]]
    assert g.bit_depth == 16


def test_comments_between_tokens():
    g = read_pgm(b"P5 # made by hand\n2 # width\n1\n# maxval next\n255\n" + bytes([7, 9]))
    assert g.samples.tolist() == [[7, 9]]


def test_bit_depth_from_maxval():
    assert read_pgm(b"P5\n1 1\n1\n\x01").bit_depth == 1
    assert read_pgm(b"P5\n1 1\n1023\n\x03\xff").bit_depth == 10


@pytest.mark.parametrize(
    "data, error",
    [
        (b"P6\n1 1\n255\n\x00", BadMagic),
        (b"", BadMagic),
        (b"P5\n0 1\n255\n", BadHeader),
        (b"P5\n1 1\n0\n\x00", BadHeader),
        (b"P5\n1 1\n70000\n\x00\x00", BadHeader),
        (b"P5\nx 1\n255\n\x00", BadHeader),
        (b"P5\n2 2\n255\n\x00\x01\x02", Truncated),
        (b"P5\n2 2", Truncated),
    ],
)
def test_read_errors(data, error):
    with pytest.raises(error):
        read_pgm(data)


def test_write_examples():
    assert write_pgm(SampleGrid.from_array([[0, 1], [2, 3]], 8)) == b"P5\n2 2\n255\n" + bytes([0, 1, 2, 3])
    assert write_pgm(SampleGrid.from_array([[256]], 16)).endswith(bytes([0x01, 0x00]))


def test_write_out_of_range():
    with pytest.raises(OutOfRange):
        write_pgm(SampleGrid.from_array([[-1]], 8))
    with pytest.raises(OutOfRange):
        write_pgm(SampleGrid.from_array([[256]], 8))


def test_grid_validation():
    with pytest.raises(BadHeader):
        SampleGrid(2, 2, 8, np.zeros((3, 2)))
    with pytest.raises(BadHeader):
        SampleGrid(1, 1, 17, np.zeros((1, 1)))


@st.composite
def grids(draw):
    depth = draw(st.integers(1, 16))
    shape = draw(st.tuples(st.integers(1, 12), st.integers(1, 12)))
    a = draw(arrays(np.int64, shape, elements=st.integers(0, (1 << depth) - 1)))
    return SampleGrid.from_array(a, depth)


@given(grids())
def test_round_trip(g):
    data = write_pgm(g)
    assert read_pgm(data) == g
    assert write_pgm(read_pgm(data)) == data
