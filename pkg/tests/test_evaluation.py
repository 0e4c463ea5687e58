import itertools

import numpy as np
import pytest

from mqap import Instance, apply_swap, evaluate_delta, evaluate_full, make_solution
from mqap.evaluation import DimensionMismatchError, swap_delta_matrix

from conftest import naive_objectives, random_instance


def test_hand_case():
    inst = Instance(n=2, distances=[[0, 1], [1, 0]], flows=([[0, 3], [2, 0]],))
    assert evaluate_full(inst, [0, 1]) == (5,)


def test_zero_flows():
    inst = Instance(n=4, distances=np.arange(16).reshape(4, 4), flows=(np.zeros((4, 4)),) * 2)
    assert evaluate_full(inst, [2, 0, 3, 1]) == (0, 0)


def test_wrong_length_rejected():
    inst = Instance(n=3, distances=np.ones((3, 3)), flows=(np.ones((3, 3)),))
    with pytest.raises(DimensionMismatchError):
        evaluate_full(inst, [0, 1])


def test_matches_naive_oracle(np_rng):
    for _ in range(25):
        n = int(np_rng.integers(2, 9))
        inst = random_instance(np_rng, n, int(np_rng.integers(1, 4)))
        perm = np_rng.permutation(n)
        assert evaluate_full(inst, perm) == naive_objectives(inst, perm)


def test_location_relabel_invariance(np_rng):
    # Relabeling locations consistently in the distance matrix and the
    # permutation leaves every cost unchanged.
    inst = random_instance(np_rng, 6, 2)
    perm = np_rng.permutation(6)
    sigma = np_rng.permutation(6)
    relabeled = Instance(
        n=6, distances=inst.distances[np.ix_(sigma, sigma)], flows=inst.flows
    )
    assert evaluate_full(inst, perm) == evaluate_full(relabeled, perm[sigma])


def test_delta_same_position_is_zero(np_rng):
    inst = random_instance(np_rng, 5, 3)
    sol = make_solution(inst, np_rng.permutation(5))
    assert evaluate_delta(inst, sol, 2, 2) == (0, 0, 0)


def test_delta_out_of_range(np_rng):
    inst = random_instance(np_rng, 5, 1)
    sol = make_solution(inst, np_rng.permutation(5))
    with pytest.raises(DimensionMismatchError):
        evaluate_delta(inst, sol, 0, 5)


def _delta_oracle(inst, sol, i, j):
    swapped = sol.perm.copy()
    swapped[i], swapped[j] = swapped[j], swapped[i]
    after = evaluate_full(inst, swapped)
    return tuple(a - b for a, b in zip(after, sol.objectives))


def test_delta_matches_full_reevaluation(np_rng):
    inst = random_instance(np_rng, 4, 2)
    sol = make_solution(inst, np_rng.permutation(4))
    assert evaluate_delta(inst, sol, 0, 2) == _delta_oracle(inst, sol, 0, 2)


def test_delta_symmetric_instance(np_rng):
    base = np_rng.integers(0, 30, (6, 6))
    sym_d = base + base.T
    fbase = np_rng.integers(0, 30, (6, 6))
    inst = Instance(n=6, distances=sym_d, flows=(fbase + fbase.T,))
    sol = make_solution(inst, np_rng.permutation(6))
    for i, j in itertools.combinations(range(6), 2):
        assert evaluate_delta(inst, sol, i, j) == _delta_oracle(inst, sol, i, j)


def test_delta_matrix_matches_per_pair(np_rng):
    for _ in range(10):
        n = int(np_rng.integers(3, 12))
        inst = random_instance(np_rng, n, int(np_rng.integers(1, 4)))
        sol = make_solution(inst, np_rng.permutation(n))
        deltas = swap_delta_matrix(inst, sol.perm)
        for i, j in itertools.combinations(range(n), 2):
            expected = evaluate_delta(inst, sol, i, j)
            assert tuple(int(deltas[r, i, j]) for r in range(inst.m)) == expected


def test_apply_swap_involution(np_rng):
    inst = random_instance(np_rng, 7, 2)
    sol = make_solution(inst, np_rng.permutation(7))
    delta = evaluate_delta(inst, sol, 1, 4)
    swapped = apply_swap(sol, 1, 4, delta)
    assert swapped.objectives == evaluate_full(inst, swapped.perm)
    back = apply_swap(swapped, 1, 4, evaluate_delta(inst, swapped, 1, 4))
    assert np.array_equal(back.perm, sol.perm)
    assert back.objectives == sol.objectives


def test_delta_scales_roughly_linearly(np_rng):
    # Smoke check, not a strict bound: quadrupling n at fixed m should not
    # cost anywhere near the quadratic factor a full re-evaluation pays.
    import time

    def per_call(n, repeats=300):
        inst = random_instance(np_rng, n, 2)
        sol = make_solution(inst, np_rng.permutation(n))
        best = float("inf")
        for _ in range(5):
            start = time.perf_counter()
            for _ in range(repeats):
                evaluate_delta(inst, sol, 0, n - 1)
            best = min(best, (time.perf_counter() - start) / repeats)
        return best

    small, large = per_call(20), per_call(80)
    assert large / small < 10.0, f"delta cost ratio {large / small:.1f} for 4x n"


def test_apply_swap_same_position(np_rng):
    inst = random_instance(np_rng, 4, 1)
    sol = make_solution(inst, np_rng.permutation(4))
    same = apply_swap(sol, 2, 2, (0,))
    assert np.array_equal(same.perm, sol.perm)
    assert same.objectives == sol.objectives
    assert same.visited is False
