import itertools

import numpy as np
import pytest

from mqap import Rng, Solution, cycle_crossover, swap_mutation, tournament_select
from mqap.genetics import VariationParams
from mqap.ranking import compare_fitness_then_diversity

REF_P1 = [8, 4, 7, 3, 6, 2, 5, 1, 9, 0]
REF_P2 = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9]


def test_cycle_crossover_reference_case():
    c1, c2 = cycle_crossover(REF_P1, REF_P2)
    assert c1.tolist() == [8, 1, 2, 3, 4, 5, 6, 7, 9, 0]
    assert c2.tolist() == [0, 4, 7, 3, 6, 2, 5, 1, 8, 9]


def test_cycle_crossover_identical_parents():
    p = [3, 1, 0, 2]
    c1, c2 = cycle_crossover(p, p)
    assert c1.tolist() == p and c2.tolist() == p


def test_cycle_crossover_length_mismatch():
    with pytest.raises(ValueError):
        cycle_crossover([0, 1, 2], [1, 0])


def test_cycle_crossover_properties(np_rng):
    for _ in range(50):
        p1 = np_rng.permutation(15)
        p2 = np_rng.permutation(15)
        c1, c2 = cycle_crossover(p1, p2)
        assert sorted(c1.tolist()) == list(range(15))
        assert sorted(c2.tolist()) == list(range(15))
        for pos in range(15):
            # Each child keeps one parent's value, and the two children
            # take the two parents' values between them.
            assert {c1[pos], c2[pos]} == {p1[pos], p2[pos]}


def test_swap_mutation_never_fires_at_zero(np_rng):
    perm = np_rng.permutation(8)
    out = swap_mutation(perm, 0.0, Rng(4))
    assert np.array_equal(out, perm)


def test_swap_mutation_two_elements():
    out = swap_mutation(np.array([0, 1]), 1.0, Rng(11))
    assert out.tolist() == [1, 0]


def test_swap_mutation_valid_permutation(np_rng):
    rng = Rng(5)
    for _ in range(100):
        perm = np_rng.permutation(12)
        out = swap_mutation(perm, 0.7, rng)
        assert sorted(out.tolist()) == list(range(12))


def test_swap_mutation_pair_frequencies():
    # pb=1 on n=10: each of the 45 unordered pairs should appear with
    # frequency 1/45 within a 3-sigma band over 10000 trials.
    rng = Rng(123)
    base = np.arange(10)
    counts = {pair: 0 for pair in itertools.combinations(range(10), 2)}
    trials = 10000
    for _ in range(trials):
        out = swap_mutation(base, 1.0, rng)
        moved = tuple(int(i) for i in np.flatnonzero(out != base))
        counts[moved] += 1
    expected = 1 / 45
    sigma = (expected * (1 - expected) / trials) ** 0.5
    for pair, count in counts.items():
        assert abs(count / trials - expected) <= 3 * sigma, pair


def test_determinism_same_seed(np_rng):
    perm = np_rng.permutation(20)
    a = swap_mutation(perm, 0.5, Rng(77))
    b = swap_mutation(perm, 0.5, Rng(77))
    assert np.array_equal(a, b)


def _ranked(rank, diversity=0.0, seed=0):
    sol = Solution(perm=np.arange(4), objectives=(rank, rank))
    sol.rank = rank
    sol.diversity = diversity
    return sol


def test_tournament_single_member_pool():
    only = _ranked(3)
    assert tournament_select([only], 2, compare_fitness_then_diversity, Rng(0)) is only


def test_tournament_better_rank_wins():
    good, bad = _ranked(0), _ranked(2)
    for seed in range(20):
        rng = Rng(seed)
        winner = tournament_select([good, bad], 4, compare_fitness_then_diversity, rng)
        assert winner is good or _drawn_only_bad(seed, 4, 2)


def _drawn_only_bad(seed, k, pool_size):
    rng = Rng(seed)
    return all(rng.randrange(pool_size) == 1 for _ in range(k))


def test_tournament_matches_replayed_draws():
    # Replaying the rng draws gives an exact oracle for the winner.
    pool = [_ranked(rank, diversity=float(rank)) for rank in range(5)]
    for seed in range(60):
        winner = tournament_select(pool, 3, compare_fitness_then_diversity, Rng(seed))
        rng = Rng(seed)
        entrants = [pool[rng.randrange(5)] for _ in range(3)]
        best = entrants[0]
        for challenger in entrants[1:]:
            if compare_fitness_then_diversity(challenger, best) < 0:
                best = challenger
        assert winner is best


def test_tournament_empty_pool():
    with pytest.raises(ValueError):
        tournament_select([], 2, compare_fitness_then_diversity, Rng(0))


def test_variation_params_validation():
    with pytest.raises(ValueError):
        VariationParams(pb_c=1.2)
    with pytest.raises(ValueError):
        VariationParams(pb_m=-0.1)
