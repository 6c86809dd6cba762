import random
from fractions import Fraction

import pytest
from mpmath import mp

from gefp_lab.errors import BadIndex, TooLarge, Unsupported
from gefp_lab.oracle import (WeightGrid, YoungProfile, all_profiles,
                             boundary_H_oracle, boundary_distribution_oracle,
                             enumerate_naive, gefp_oracle,
                             modified_domain_partition,
                             partition_function_oracle,
                             reduced_modified_domain_partition,
                             reduced_partition_oracle)
from gefp_lab.params import SpectralData, VertexWeights

ICE = VertexWeights.from_abc(Fraction(1), Fraction(1), Fraction(1))


def rational_weights(seed):
    rng = random.Random(seed)
    return VertexWeights.from_abc(Fraction(rng.randint(1, 6), rng.randint(1, 3)),
                                  Fraction(rng.randint(1, 6), rng.randint(1, 3)),
                                  Fraction(rng.randint(1, 6), rng.randint(1, 3)))


def test_young_profile_validation():
    p = YoungProfile(6, (2, 3, 5))
    assert p.s == 3 and p.mu == (4, 3, 1) and p.mu_size == 8
    assert YoungProfile(3, ()).s == 0
    with pytest.raises(BadIndex):
        YoungProfile(3, (2, 1))
    with pytest.raises(BadIndex):
        YoungProfile(3, (0, 1))
    with pytest.raises(BadIndex):
        YoungProfile(3, (1, 4))


def test_partition_single_vertex_is_c():
    for w in (ICE, rational_weights(1)):
        grid = WeightGrid.from_weights(1, w)
        assert partition_function_oracle(grid) == w.c


def test_partition_two_by_two_closed_form():
    for seed in (1, 2, 3):
        w = rational_weights(seed)
        grid = WeightGrid.from_weights(2, w)
        expect = w.c2 * (w.a ** 2 + w.b ** 2)
        assert partition_function_oracle(grid) == w.c ** 2 * (w.a ** 2 + w.b ** 2)
        assert reduced_partition_oracle(grid) * w.c2 == expect


def test_partition_counts_at_ice_point():
    expected = {1: 1, 2: 2, 3: 7, 4: 42, 5: 429}
    for n, count in expected.items():
        grid = WeightGrid.from_weights(n, ICE)
        assert partition_function_oracle(grid) == count


def test_naive_filter_agrees_with_transfer():
    for n in (1, 2, 3):
        for w in (ICE, rational_weights(n + 10)):
            grid = WeightGrid.from_weights(n, w)
            stats = enumerate_naive(grid)
            assert stats.reduced_sum == reduced_partition_oracle(grid)
            assert stats.parity_ok
    assert enumerate_naive(WeightGrid.from_weights(3, ICE)).config_count == 7


def test_naive_filter_on_inhomogeneous_grid():
    rng = random.Random(4)
    n = 3
    a = [[Fraction(rng.randint(1, 5), rng.randint(1, 3)) for _ in range(n)]
         for _ in range(n)]
    b = [[Fraction(rng.randint(1, 5), rng.randint(1, 3)) for _ in range(n)]
         for _ in range(n)]
    grid = WeightGrid(a, b, Fraction(7, 5))
    assert enumerate_naive(grid).reduced_sum == reduced_partition_oracle(grid)


def test_naive_cap():
    with pytest.raises(TooLarge):
        enumerate_naive(WeightGrid.from_weights(4, ICE))


def test_oracle_cap():
    grid = WeightGrid.from_weights(3, ICE)
    with pytest.raises(TooLarge):
        partition_function_oracle(grid, cap=2)


def test_gefp_forced_and_vanishing():
    grid = WeightGrid.from_weights(2, rational_weights(5))
    assert gefp_oracle(grid, YoungProfile(2, (2,))).value == 1
    assert gefp_oracle(grid, YoungProfile(2, (1, 1))).value == 0


def test_gefp_two_by_two_ice():
    grid = WeightGrid.from_weights(2, ICE)
    assert gefp_oracle(grid, YoungProfile(2, (1,))).value == Fraction(1, 2)


def test_gefp_marked_vs_naive():
    for seed in (3, 8):
        w = rational_weights(seed)
        grid = WeightGrid.from_weights(3, w)
        for prof in all_profiles(3):
            stats = enumerate_naive(grid, marks=list(prof.r))
            expect = stats.reduced_sum / reduced_partition_oracle(grid)
            assert gefp_oracle(grid, prof).value == expect


def test_gefp_positivity_matches_profile_condition():
    w = rational_weights(12)
    for n in (2, 3, 4):
        grid = WeightGrid.from_weights(n, w)
        for prof in all_profiles(n):
            val = gefp_oracle(grid, prof).value
            if all(rj >= j for j, rj in enumerate(prof.r, start=1)):
                assert val > 0
            else:
                assert val == 0


def test_gefp_reduction_at_boundary():
    w = rational_weights(6)
    for n in (2, 3, 4):
        grid = WeightGrid.from_weights(n, w)
        for prof in all_profiles(n):
            if prof.r[-1] == n:
                assert (gefp_oracle(grid, prof).value
                        == gefp_oracle(grid, prof.reduced()).value)


def test_boundary_H_examples():
    assert boundary_H_oracle(WeightGrid.from_weights(1, ICE), 1).value == 1
    grid2 = WeightGrid.from_weights(2, ICE)
    assert boundary_distribution_oracle(grid2) == [Fraction(1, 2), Fraction(1, 2)]
    grid3 = WeightGrid.from_weights(3, ICE)
    assert boundary_distribution_oracle(grid3) == [
        Fraction(2, 7), Fraction(3, 7), Fraction(2, 7)]


def test_boundary_H_closed_form_n2():
    w = rational_weights(7)
    grid = WeightGrid.from_weights(2, w)
    a2, b2 = w.a ** 2, w.b ** 2
    assert boundary_H_oracle(grid, 1).value == a2 / (a2 + b2)
    assert boundary_H_oracle(grid, 2).value == b2 / (a2 + b2)
    with pytest.raises(BadIndex):
        boundary_H_oracle(grid, 3)


def test_boundary_H_normalization_exact():
    for seed in (1, 9):
        w = rational_weights(seed)
        for n in range(1, 7):
            grid = WeightGrid.from_weights(n, w)
            assert sum(boundary_distribution_oracle(grid)) == 1


def test_boundary_H_position_convention():
    # column 1 is rightmost: b -> 0 freezes the c-vertex at the right edge
    w = VertexWeights.from_abc(Fraction(5), Fraction(1), Fraction(1))
    grid = WeightGrid.from_weights(2, w)
    dist = boundary_distribution_oracle(grid)
    assert dist[0] > dist[1]


def test_modified_domain_identities():
    for w in (ICE, rational_weights(2)):
        for n in (1, 2, 3):
            grid = WeightGrid.from_weights(n, w)
            zn = reduced_partition_oracle(grid)
            full = YoungProfile(n, (n,))
            assert (reduced_modified_domain_partition(grid, full) == zn)
            for prof in all_profiles(n):
                zmod = reduced_modified_domain_partition(grid, prof)
                g = gefp_oracle(grid, prof).value
                assert zmod * w.a ** prof.mu_size == g * zn


def test_modified_domain_ice_example():
    grid = WeightGrid.from_weights(2, ICE)
    assert modified_domain_partition(grid, YoungProfile(2, (1,))) == 1


def test_modified_domain_rejects_inhomogeneous():
    with mp.workprec(64):
        spec = SpectralData([0.3, 0.7], [0.1, 0.5], 0.4)
        grid = WeightGrid.from_spectral(spec)
        with pytest.raises(Unsupported):
            modified_domain_partition(grid, YoungProfile(2, (1,)))


def test_partition_requires_concrete_c():
    w = VertexWeights.from_delta_t(Fraction(0), Fraction(1))
    grid = WeightGrid.from_weights(2, w)
    with pytest.raises(Unsupported):
        partition_function_oracle(grid)
    assert reduced_partition_oracle(grid) == w.a ** 2 + w.b ** 2


def test_all_profiles_count():
    # weak compositions: C(N + s - 1, s) profiles of length s
    assert len(all_profiles(5)) == 5 + 15 + 35 + 70 + 126
    assert len(all_profiles(4, 2)) == 10
