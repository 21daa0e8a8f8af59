"""MIMIC：熵、链的构造与祖先采样"""

import math

import numpy as np
import pytest

from algorithms.mimic import (ChainModel, Mimic, _argmin_with_ties, conditional_entropy, empirical_entropy,
                              mimic_build_chain, mimic_sample, mimic_step)
from algorithms.umda import EdaConfig
from core import EvaluationBudget, Evaluator, InvalidParameter, RngStream, sort_arrays
from fitness import get_fitness, leading_blocks


@pytest.mark.parametrize("ones,total,expected", [(5, 10, 1.0), (10, 10, 0.0), (0, 10, 0.0), (8, 10, 0.7219280948873623)])
def test_empirical_entropy(ones, total, expected):
    assert empirical_entropy(ones, total) == pytest.approx(expected)


def test_empirical_entropy_rejects_empty():
    with pytest.raises(InvalidParameter):
        empirical_entropy(0, 0)


def test_conditional_entropy_identical_variables():
    # table[a][b]：X_i 与 X_j 总相同
    assert conditional_entropy([[6, 0], [0, 4]]) == pytest.approx(0.0)


def test_conditional_entropy_independent_uniform():
    rng = RngStream(1)
    rows = rng.bernoulli(0.5, (1000, 2))
    table = np.zeros((2, 2), dtype=int)
    for a, b in rows:
        table[a, b] += 1
    assert abs(conditional_entropy(table) - 1.0) <= 0.05


def test_conditional_entropy_constant_predecessor():
    table = [[3, 0], [7, 0]]
    assert conditional_entropy(table, n=20) == pytest.approx(empirical_entropy(7, 10))


def test_conditional_entropy_rejects_empty_table():
    with pytest.raises(InvalidParameter):
        conditional_entropy([[0, 0], [0, 0]])


def test_identical_selection_clamps_to_observed_values():
    n = 6
    x = np.array([1, 0, 1, 1, 0, 1], dtype=np.uint8)
    selected = np.tile(x, (4, 1))
    chain = mimic_build_chain(selected, n, RngStream(2))
    assert chain.is_permutation()
    root = chain.pi[0]
    assert chain.root_p == pytest.approx(1 - 1 / n if x[root] else 1 / n)
    for k in range(1, n):
        target = 1 - 1 / n if x[chain.pi[k]] else 1 / n
        assert chain.cond[k, 0] == pytest.approx(target)
        assert chain.cond[k, 1] == pytest.approx(target)


def test_identical_selection_gives_uniform_random_root():
    selected = np.tile(np.array([1, 0, 1, 0], dtype=np.uint8), (3, 1))
    rng = RngStream(3)
    roots = np.array([mimic_build_chain(selected, 4, rng).pi[0] for _ in range(4000)])
    counts = np.bincount(roots, minlength=4)
    sd = math.sqrt(4000 * 0.25 * 0.75)
    assert np.all(np.abs(counts - 1000) <= 4 * sd)


def test_two_complementary_individuals():
    selected = np.array([[1, 1], [0, 0]], dtype=np.uint8)
    chain = mimic_build_chain(selected, 2, RngStream(4))
    # 截断前支撑集恰为 {11, 00}：X_{π_1} 完全复制前驱
    assert chain.root_p == pytest.approx(0.5)
    assert chain.cond[1, 1] == pytest.approx(1 - 1 / 2)
    assert chain.cond[1, 0] == pytest.approx(1 / 2)


def test_two_complementary_individuals_one_sided_keeps_support():
    selected = np.array([[1, 1], [0, 0]] * 5, dtype=np.uint8)
    n = 10
    wide = np.zeros((10, n), dtype=np.uint8)
    wide[:, :2] = selected
    chain = mimic_build_chain(wide, n, RngStream(5), clamp="one_sided")
    pos = {int(v): k for k, v in enumerate(chain.pi)}
    if pos[0] + 1 == pos[1] or pos[1] + 1 == pos[0]:
        k = max(pos[0], pos[1])
        assert chain.cond[k, 1] == pytest.approx(1.0)
        assert chain.cond[k, 0] == pytest.approx(1 / n)


def test_single_individual_is_resampled_with_border_noise():
    n = 20
    x = RngStream(6).bernoulli(0.5, (1, n))
    chain = mimic_build_chain(x, n, RngStream(7))
    samples = mimic_sample(chain, RngStream(8), size=20_000)
    agree = (samples == x).mean()
    assert abs(agree - (1 - 1 / n)) <= 4 * math.sqrt((1 / n) * (1 - 1 / n) / samples.size)


def test_probabilities_within_borders():
    rng = RngStream(9)
    n = 12
    selected = rng.bernoulli(0.3, (7, n))
    chain = mimic_build_chain(selected, n, rng)
    probs = chain.probabilities()
    assert np.all(probs >= 1 / n - 1e-15) and np.all(probs <= 1 - 1 / n + 1e-15)


def test_argmin_order_invariant_under_log_base():
    selected = RngStream(10).bernoulli(0.4, (15, 16))
    a = mimic_build_chain(selected, 16, RngStream(11), base=2.0)
    b = mimic_build_chain(selected, 16, RngStream(11), base=math.e)
    assert np.array_equal(a.pi, b.pi)
    assert np.allclose(a.cond[1:], b.cond[1:])


def test_ancestral_sampling_at_upper_border():
    n = 10
    chain = ChainModel(pi=np.arange(n), root_p=1 - 1 / n, cond=np.full((n, 2), 1 - 1 / n))
    samples = mimic_sample(chain, RngStream(12), size=50_000)
    ones = samples.sum(axis=1)
    sd = math.sqrt(n * (1 / n) * (1 - 1 / n) / samples.size)
    assert abs(ones.mean() - (n - 1)) <= 4 * sd


def test_two_variable_product_rule():
    n = 2
    chain = ChainModel(pi=np.array([1, 0]), root_p=1 - 1 / n,
                       cond=np.array([[np.nan, np.nan], [0.25, 0.8]]))
    samples = mimic_sample(chain, RngStream(13), size=40_000)
    both = samples.all(axis=1).mean()
    expected = 0.5 * 0.8
    assert abs(both - expected) <= 4 * math.sqrt(expected * (1 - expected) / samples.shape[0])


def test_sampling_is_reproducible():
    chain = mimic_build_chain(RngStream(14).bernoulli(0.5, (6, 8)), 8, RngStream(15))
    assert np.array_equal(mimic_sample(chain, RngStream(16), 5), mimic_sample(chain, RngStream(16), 5))


def test_step_with_single_individual():
    n = 10
    evaluate = Evaluator(get_fitness("dlb"), EvaluationBudget(10 ** 6))
    x = np.ones((1, n), dtype=np.uint8)
    rng = RngStream(17)
    ranked = sort_arrays(x, evaluate(x), rng, evaluate.name)
    next_ranked, chain, stats = mimic_step(ranked, EdaConfig("mimic", 1, 1), evaluate, rng)
    assert next_ranked.genomes.shape == (1, n)
    assert chain.is_permutation()
    # 块统计描述的是返回的新种群
    assert stats.Z_star == leading_blocks(next_ranked.genomes)[0]


def test_step_returns_sorted_population():
    n = 10
    evaluate = Evaluator(get_fitness("dlb"), EvaluationBudget(10 ** 6))
    rng = RngStream(21)
    x = rng.bernoulli(0.5, (30, n))
    ranked = sort_arrays(x, evaluate(x), rng, evaluate.name)
    next_ranked, _, stats = mimic_step(ranked, EdaConfig("mimic", 10, 30), evaluate, rng)
    assert len(next_ranked) == 30
    assert np.all(np.diff(next_ranked.fitness) <= 0)
    assert np.array_equal(next_ranked.fitness, get_fitness("dlb").evaluate(next_ranked.genomes))
    assert stats.Z_star == leading_blocks(next_ranked.genomes[:1])[0]


def test_step_keeps_optimum_often():
    n = 10
    evaluate = Evaluator(get_fitness("dlb"), EvaluationBudget(10 ** 7))
    x = np.ones((20, n), dtype=np.uint8)
    rng = RngStream(18)
    ranked = sort_arrays(x, evaluate(x), rng, evaluate.name)
    hits = 0
    steps = 200
    for _ in range(steps):
        next_ranked, _, _ = mimic_step(ranked, EdaConfig("mimic", 10, 20), evaluate, rng)
        hits += int((next_ranked.fitness == n).sum())
    rate = hits / (steps * 20)
    expected = (1 - 1 / n) ** n
    assert rate >= expected - 4 * math.sqrt(expected * (1 - expected) / (steps * 20))


def test_snapshot_matches_block_stats():
    n = 10
    fitness = get_fitness("dlb")
    evaluate = Evaluator(fitness, EvaluationBudget(10 ** 6))
    algo = Mimic(n, fitness, RngStream(22), EdaConfig("mimic", 5, 20))
    algo.initialize(evaluate)
    for _ in range(30):
        snap = algo.snapshot()
        assert snap.Z_star == snap.correct_blocks
        if evaluate.budget.done:
            break
        algo.step(evaluate)


def test_entropies_equal_up_to_rounding_are_tied():
    # 0.1 + 0.2 与 0.3 在数学上相等，只差一个 ulp
    values = np.array([0.3, 0.1 + 0.2, 0.5])
    keys = np.array([[0], [1], [2]])
    candidates = np.array([4, 7, 9])
    rng = RngStream(23)
    picks = np.array([_argmin_with_ties(keys, lambda idx: values[idx], candidates, rng) for _ in range(4000)])
    assert set(np.unique(picks)) == {4, 7}
    sd = math.sqrt(4000 * 0.25)
    assert abs((picks == 4).sum() - 2000) <= 4 * sd


def test_distinct_entropies_are_not_tied():
    values = np.array([0.3, 0.3001])
    keys = np.array([[0], [1]])
    rng = RngStream(24)
    picks = {_argmin_with_ties(keys, lambda idx: values[idx], np.array([2, 5]), rng) for _ in range(200)}
    assert picks == {2}


def test_tied_conditional_candidates_are_chosen_uniformly():
    # 根必为常数位 0；第 1、2 位相对根的计数表相同，第二个位置在两者间均匀选
    selected = np.array([[1, 1, 0], [1, 0, 1], [1, 1, 0], [1, 0, 1]], dtype=np.uint8)
    rng = RngStream(25)
    chains = [mimic_build_chain(selected, 3, rng) for _ in range(3000)]
    assert all(c.pi[0] == 0 for c in chains)
    second = np.array([c.pi[1] for c in chains])
    sd = math.sqrt(3000 * 0.25)
    assert abs((second == 1).sum() - 1500) <= 4 * sd


def test_mimic_solves_small_dlb():
    n = 12
    evaluate = Evaluator(get_fitness("dlb"), EvaluationBudget(10 ** 6))
    algo = Mimic(n, get_fitness("dlb"), RngStream(19), EdaConfig("mimic", n // 2, n))
    algo.initialize(evaluate)
    while not evaluate.budget.done:
        algo.step(evaluate)
    assert evaluate.budget.hit_optimum_at is not None
    assert algo.snapshot().correct_blocks == n // 2
