"""Tests for locally balanced sparse cuts"""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dynmsf.exceptions import InputError, OracleScaleError
from dynmsf.graph_core import Graph, total_volume
from dynmsf.lbs_cut import (
    LbsInstance,
    NoSparseOverlappingCut,
    SparseCut,
    lbs_cut,
    lbs_parameters,
    opt_overlapping_bruteforce,
    overlap,
)

from .strategies import PROPERTY_SETTINGS, weighted_graphs


def cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n, i + 1) for i in range(n)])


class TestOverlap:
    def test_half_overlap(self):
        assert overlap(cycle(12), {0, 1, 2, 3}, {0, 1}) == Fraction(1, 2)

    def test_zero_volume(self):
        g = Graph(3)
        with pytest.raises(InputError):
            overlap(g, {0}, {0})


class TestValidation:
    def test_a_too_large(self):
        with pytest.raises(InputError):
            LbsInstance.create(cycle(12), range(6), 1, Fraction(1, 2)).validate()

    def test_sigma_below_floor(self):
        sigma = Fraction(1, 10)
        with pytest.raises(InputError):
            LbsInstance.create(cycle(12), {0, 1}, sigma, Fraction(1, 2)).validate()

    def test_alpha_range(self):
        with pytest.raises(InputError):
            LbsInstance.create(cycle(12), {0, 1}, Fraction(1, 2), 0).validate()

    def test_parameters(self):
        assert lbs_parameters(Fraction(1, 2), Fraction(1, 3)) == (2, 3)
        assert lbs_parameters(Fraction(2, 5), Fraction(1, 4)) == (3, 4)


class TestLbsCut:
    def test_cycle_has_no_overlapping_sparse_cut(self):
        g = cycle(12)
        a = {0, 1}
        sigma = Fraction(1, 2)
        alpha = Fraction(1, 2)
        outcome = lbs_cut(LbsInstance.create(g, a, sigma, alpha))
        assert isinstance(outcome, NoSparseOverlappingCut)
        assert outcome.c_con >= 1
        assert opt_overlapping_bruteforce(g, alpha / outcome.c_con, a, sigma) == 0

    @PROPERTY_SETTINGS
    @given(
        g=weighted_graphs(min_nodes=6, max_nodes=10, max_edges=18, connected=True),
        seed=st.integers(0, 9),
    )
    def test_cut_is_the_smaller_side(self, g, seed):
        a = {seed % g.num_nodes()}
        vol_a = g.degree(min(a))
        rest = total_volume(g) - vol_a
        if 2 * vol_a > rest:
            return
        sigma = max(Fraction(2 * vol_a, rest), Fraction(1, 2))
        outcome = lbs_cut(LbsInstance.create(g, a, sigma, Fraction(1, 4)))
        if isinstance(outcome, SparseCut):
            assert 0 < outcome.cut.volume <= total_volume(g) - outcome.cut.volume
            assert outcome.c_size >= 2 / sigma
        else:
            assert outcome.c_con >= 1


class TestBruteforce:
    def test_largest_overlapping_cut(self):
        # arcs through {0, 1} of at most four nodes are half inside A
        assert opt_overlapping_bruteforce(cycle(12), 1, {0, 1}, Fraction(1, 2)) == 8

    def test_cap(self):
        with pytest.raises(OracleScaleError):
            opt_overlapping_bruteforce(cycle(12), 1, {0}, 1, cap=10)
