from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from padicgrn.network import TransitionMap, constant_map, identity_map
from padicgrn.stability import (BallClass, Ordering, SubsetExpansion, ball_stats, expanding_score,
                                expanding_set, level_counts, level_prefix_lengths, level_stats,
                                permuted_images, scores_via_haar, stability_scores)

from conftest import map_and_perm, oracle_prefix_lengths, oracle_scores


def test_toy_radii(toy4):
    want = {(0, 0): Fraction(1), (1, 0): Fraction(1, 4), (1, 1): Fraction(1, 8),
            (2, 0): Fraction(1, 16), (2, 1): Fraction(1, 8), (2, 2): Fraction(1, 16),
            (2, 3): Fraction(1, 8)}
    want.update({(3, i): Fraction(1, 16) for i in range(8)})
    for (n, m), t in want.items():
        assert ball_stats(toy4, None, n, m).t == t


def test_ball_stats_examples(toy4):
    b = ball_stats(toy4, None, 1, 0)
    assert (b.M, b.t, b.cls) == (2, Fraction(1, 4), BallClass.CONTRACTING)
    assert b.Lambda == Fraction(1, 2)
    b = ball_stats(toy4, None, 3, 5)
    assert (b.M, b.t, b.cls) == (4, Fraction(1, 16), BallClass.CONTRACTING)
    f = identity_map(4, 3)
    for n in range(1, 4):
        for m in range(0, 3 ** n, 5):
            b = ball_stats(f, (3, 1, 0, 2), n, m)
            assert b.M == n and b.cls is BallClass.ISOMETRIC and b.Lambda == 1


def test_level_counts_examples(toy4, ath, pi_star):
    assert level_counts(toy4, None, 3) == (0, 0, 8)
    assert level_counts(ath, pi_star, 2)[0] == 4
    f = constant_map(5, 3, 7)
    for n in range(1, 5):
        assert level_counts(f, None, n) == (0, 0, 3 ** n)


def test_expanding_set_examples(toy4, ath, pi_star):
    assert expanding_set(ath, pi_star, 3) == {2, 3, 6, 7}
    assert expanding_set(ath, pi_star, 2) == {0, 1, 2, 3}
    assert expanding_set(ath, pi_star, 4) == {2, 3, 10, 11}
    for n in range(1, 4):
        assert expanding_set(toy4, None, n) == set()
        assert expanding_set(identity_map(4), (1, 3, 0, 2), n) == set()


def test_score_examples(toy4):
    assert stability_scores(toy4).as_tuple() == (0, 48, 0)
    assert scores_via_haar(toy4).as_tuple() == (0, 48, 0)
    assert stability_scores(constant_map(4)).as_tuple() == (0, 48, 0)


def test_n_equals_one():
    s = stability_scores(TransitionMap(3, 1, [2, 0, 1]))
    assert s.as_tuple() == (0, 0, 0) and s.per_level == ()


def test_toy_all_orderings_control_identity(toy4):
    import itertools
    for perm in itertools.permutations(range(4)):
        s = stability_scores(toy4, perm)
        assert s.mu_E + s.mu_A + s.mu_I == 48
        assert s.as_tuple() == oracle_scores(toy4, perm)


def test_ordering_type():
    o = Ordering((2, 0, 1))
    assert o.names(["a", "b", "c"]) == ["c", "a", "b"]
    with pytest.raises(ValueError):
        Ordering((0, 0, 1))
    assert stability_scores(identity_map(3), o).as_tuple() == stability_scores(identity_map(3), (2, 0, 1)).as_tuple()


@settings(max_examples=60, deadline=None)
@given(map_and_perm())
def test_prefix_lengths_match_oracle(fp):
    f, perm = fp
    g = permuted_images(f, perm)
    for n in range(0, f.N + 1):
        assert list(level_prefix_lengths(g, f.p, f.N, n)) == oracle_prefix_lengths(f, perm, n)


@settings(max_examples=60, deadline=None)
@given(map_and_perm())
def test_scores_match_oracle(fp):
    f, perm = fp
    s = stability_scores(f, perm)
    E, A, I = oracle_scores(f, perm)
    assert (s.mu_E, s.mu_A, s.mu_I) == (E, A, I)
    assert s.mu_E + s.mu_A + s.mu_I == (f.N - 1) * f.p ** f.N
    for n, (e, i, a) in enumerate(s.per_level, start=1):
        assert e + i + a == f.p ** n
    assert scores_via_haar(f, perm) == s
    assert expanding_score(f, perm) == s.mu_E
    assert SubsetExpansion(f).score(perm) == s.mu_E


@settings(max_examples=60, deadline=None)
@given(map_and_perm(max_N=6), st.data())
def test_prefix_dependence(fp, data):
    f, perm = fp
    n = data.draw(st.integers(1, max(1, f.N - 1)))
    tail = list(perm[n:])
    shuffled = tuple(perm[:n]) + tuple(data.draw(st.permutations(tail)))
    assert level_counts(f, perm, n)[0] == level_counts(f, shuffled, n)[0]
    assert expanding_set(f, perm, n) == expanding_set(f, shuffled, n)
    # A/I split at level n needs only the first n+1 positions
    if n + 1 < f.N:
        tail2 = list(perm[n + 1:])
        s2 = tuple(perm[:n + 1]) + tuple(data.draw(st.permutations(tail2)))
        assert level_counts(f, perm, n) == level_counts(f, s2, n)


@settings(max_examples=40, deadline=None)
@given(map_and_perm(max_N=6))
def test_monotonicity_and_power_of_p(fp):
    f, perm = fp
    p, N = f.p, f.N
    prev = None
    for n in range(0, N + 1):
        stats = level_stats(f, perm, n)
        for b in stats:
            assert b.t == Fraction(1, p ** b.M) and 0 <= b.M <= N
            if prev is not None:
                assert b.t <= prev[b.m % p ** (n - 1)].t
        prev = stats


@settings(max_examples=40, deadline=None)
@given(map_and_perm(max_N=6))
def test_intrinsic(fp):
    f, perm = fp
    assert stability_scores(f, perm) == stability_scores(f.relabel(perm), None)


@settings(max_examples=40, deadline=None)
@given(map_and_perm(max_N=6))
def test_tradeoff(fp):
    f, perm = fp
    s = stability_scores(f, perm)
    assert s.mu_A + s.mu_I == (f.N - 1) * f.p ** f.N - s.mu_E


def test_ath_per_level_expanding(ath, pi_star):
    s = stability_scores(ath, pi_star)
    assert s.per_level[1] == (4, 0, 0)
    assert s.per_level[3][0] == 4 and s.per_level[3][2] == 12
