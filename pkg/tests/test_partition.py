import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vilenkin_rdf.mixed_radix import RadixSequence
from vilenkin_rdf.partition import (
    Rectangle,
    partition_interval,
    partition_rectangle,
    verify_shift_property,
)

DEC = RadixSequence.uniform(10, 4)


def spans(part):
    return {p.label: (p.lo, p.hi) for p in part}


def test_decimal_567_1234():
    part = partition_interval(567, 1234, DEC)
    assert spans(part) == {
        "J1": (1230, 1234), "J2": (1200, 1230), "J3": (1000, 1200),
        "~J0": (567, 568), "~J1": (568, 570), "~J2": (570, 600), "~J3": (600, 1000),
    }
    assert part.excluded == "J4" and part.t == 4
    assert all(verify_shift_property(p, p.base, DEC) for p in part)


def test_singleton():
    part = partition_interval(41, 42, DEC)
    assert spans(part) == {"~J0": (41, 42)}
    assert part[0].lam == (0,)


def test_small_walsh_case():
    part = partition_interval(3, 6, RadixSequence.uniform(2, 3))
    assert spans(part) == {"~J0": (3, 4), "J2": (4, 6)}


def test_shift_examples():
    part = {p.label: p for p in partition_interval(567, 1234, DEC)}
    assert verify_shift_property(part["~J0"], 567, DEC)
    j2 = part["J2"]
    assert j2.lam == (7, 8, 9) and j2.base == 1234
    assert verify_shift_property(j2, 1234, DEC)
    assert not verify_shift_property(j2, 567, DEC)


def test_lambda_ranges():
    for p in partition_interval(567, 1234, DEC):
        if p.label == "~J0":
            assert p.lam == (0,)
        else:
            assert all(1 <= l < 10 for l in p.lam)


@pytest.mark.parametrize("radix", [(2, 3, 4), (2, 2, 2), (3, 2), (5,)])
def test_exhaustive_cover_and_shift(radix):
    r = RadixSequence(radix)
    for a in range(r.size):
        for b in range(a + 1, r.size + 1):
            part = partition_interval(a, b, r)
            cells = sorted(i for p in part for i in p.indices())
            assert cells == list(range(a, b)), (a, b)
            for p in part:
                assert verify_shift_property(p, p.base, r), (a, b, p)


@given(st.sampled_from([(10, 10, 10, 10), (3, 5, 7, 2), (16, 16, 16)]), st.data())
def test_random_cover_and_piece_bound(radix, data):
    r = RadixSequence(radix)
    a = data.draw(st.integers(0, r.size - 1))
    b = data.draw(st.integers(a + 1, r.size))
    part = partition_interval(a, b, r)
    assert sum(len(p) for p in part) == b - a
    # at most t-1 plain pieces plus t+1 tilde pieces
    assert len(part) <= 2 * part.t
    assert all(verify_shift_property(p, p.base, r) for p in part)


def test_interval_errors():
    with pytest.raises(ValueError):
        partition_interval(5, 5, DEC)
    with pytest.raises(ValueError):
        partition_interval(0, 10001, DEC)


def test_rectangle_square_of_small_case():
    w = RadixSequence.uniform(2, 3)
    rp = partition_rectangle(Rectangle(((3, 6), (3, 6))), (w, w))
    got = {(p.rect.bounds, p.corner) for p in rp}
    assert got == {
        (((3, 4), (3, 4)), ("a", "a")),
        (((3, 4), (4, 6)), ("a", "b")),
        (((4, 6), (3, 4)), ("b", "a")),
        (((4, 6), (4, 6)), ("b", "b")),
    }


def test_rectangle_one_dim_reduces():
    rp = partition_rectangle(Rectangle(((567, 1234),)), (DEC,))
    assert [p.rect.bounds[0] for p in rp] == [(p.lo, p.hi) for p in partition_interval(567, 1234, DEC)]


def test_rectangle_corners_follow_kinds():
    rp = partition_rectangle(Rectangle(((567, 1234), (2, 9))), (DEC, RadixSequence.uniform(3, 2)))
    for piece in rp:
        assert piece.corner == tuple("a" if s.kind == "tilde" else "b" for s in piece.sides)
        assert piece.base == tuple(567 if c == "a" else 1234 for c in piece.corner[:1]) + piece.base[1:]


def test_degenerate_rectangle():
    with pytest.raises(ValueError):
        partition_rectangle(Rectangle(((3, 3), (0, 2))), (DEC, DEC))


def test_random_rectangles_cover_exactly():
    rng = np.random.default_rng(11)
    radices = (RadixSequence((2, 3, 4)), RadixSequence((3, 3)))
    for _ in range(1000):
        bounds = []
        for r in radices:
            lo, hi = sorted(rng.choice(r.size + 1, 2, replace=False))
            bounds.append((int(lo), int(hi)))
        rect = Rectangle(tuple(bounds))
        count = np.zeros((24, 9), dtype=int)
        for piece in partition_rectangle(rect, radices):
            (a0, b0), (a1, b1) = piece.rect.bounds
            count[a0:b0, a1:b1] += 1
        expected = np.zeros_like(count)
        expected[bounds[0][0]:bounds[0][1], bounds[1][0]:bounds[1][1]] = 1
        assert np.array_equal(count, expected)
