import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_function
from vilenkin_rdf.isomorphism import InterleavingMap, exotic_interval
from vilenkin_rdf.mixed_radix import CapacityError, RadixSequence
from vilenkin_rdf.partition import Rectangle
from vilenkin_rdf.pipeline import random_family
from vilenkin_rdf.transform import vilenkin_grid, vilenkin_row

W6 = RadixSequence.uniform(2, 6)
WALSH2 = InterleavingMap((W6, W6))
MIXED = InterleavingMap((RadixSequence((2, 3)), RadixSequence((3, 2, 2))))


def test_walsh_examples():
    assert WALSH2.psi_index((0, 0)) == 0
    assert [WALSH2.psi_index((n, 0)) for n in (3, 4, 5, 6)] == [5, 16, 17, 20]


def test_exotic_examples():
    assert exotic_interval(Rectangle(((3, 7), (0, 1))), WALSH2) == {5, 16, 17, 20}
    assert exotic_interval(Rectangle(((0, 1), (0, 1))), WALSH2) == {0}
    small = InterleavingMap((RadixSequence((2, 3)), RadixSequence((2, 2))))
    assert exotic_interval(Rectangle(((0, 6), (0, 4))), small) == set(range(24))


def test_derived_radix_round_robin():
    assert MIXED.derived.radices == (2, 3, 3, 2, 2)
    assert MIXED.positions == ((0, 0), (0, 1), (1, 0), (1, 1), (2, 1))


@pytest.mark.parametrize("imap", [WALSH2, MIXED, InterleavingMap((RadixSequence((2, 2)),) * 3)])
def test_bijections(imap):
    sizes = [r.size for r in imap.radices]
    images = {imap.psi_index(n) for n in itertools.product(*map(range, sizes))}
    assert images == set(range(imap.derived.size))
    grid = imap.phi_grid()
    assert sorted(grid.reshape(-1)) == list(range(imap.derived.size))
    for n in itertools.product(*map(range, sizes)):
        assert imap.psi_inverse(imap.psi_index(n)) == n
    j = tuple(s - 1 for s in sizes)
    assert imap.phi_point(j) == grid[j]
    assert imap.phi_point((0,) * imap.dims) == 0


@given(st.data())
def test_character_transport(data):
    imap = data.draw(st.sampled_from([WALSH2, MIXED]))
    n = tuple(data.draw(st.integers(0, r.size - 1)) for r in imap.radices)
    x = tuple(data.draw(st.integers(0, r.size - 1)) for r in imap.radices)
    lhs = vilenkin_row(imap.psi_index(n), imap.derived)[imap.phi_point(x)]
    rhs = np.prod([vilenkin_row(nd, r)[xd] for nd, xd, r in zip(n, x, imap.radices)])
    assert abs(lhs - rhs) < 1e-12


def test_transport_preserves_norms_and_spectra(rng):
    f = random_function(rng, MIXED.radices)
    g = MIXED.transport(f)
    assert np.allclose(sorted(np.abs(g.values)), sorted(np.abs(f.values).reshape(-1)))
    n = (4, 7)
    moved = MIXED.transport(vilenkin_grid(n, MIXED.radices))
    assert np.abs(moved.values - vilenkin_row(MIXED.psi_index(n), MIXED.derived)).max() < 1e-12


def test_transport_family_keeps_inequality_sides():
    from vilenkin_rdf.martingale import lp_l2_norm, lp_norm

    fam = random_family(3, MIXED.radices, 5)
    sets, moved = MIXED.transport_family(fam)
    assert sum(len(s) for s in sets) == MIXED.derived.size
    for p in (1.1, 1.5):
        assert abs(lp_norm(moved.total(), p) - lp_norm(fam.total(), p)) < 1e-12
        assert abs(lp_l2_norm(moved.functions, p) - lp_l2_norm(fam.functions, p)) < 1e-12


def test_capacity():
    with pytest.raises(CapacityError):
        WALSH2.psi_index((64, 0))
    with pytest.raises(ValueError):
        WALSH2.psi_index((1,))
