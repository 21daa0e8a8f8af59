"""块统计、界公式与蒙特卡洛校验"""

import math

import numpy as np
import pytest

from core import InvalidParameter, RngStream, sort_arrays
from fitness import dlb_batch
from oracles import (InapplicableBound, block_stats, check_block_identities, check_formulas,
                     comma_ea_level_params, level_based_bound, pressure_regime,
                     selective_pressure, theta, trap_tail_bound,
                     umda_high_pressure_level_params, verify_binomial_second_moment,
                     verify_block_distributions, verify_initial_leading_blocks,
                     verify_selected_block_laws, verify_trap_frequency,
                     verify_untouched_marginal_dynamics, z0_expectation_bound)


def ranked(rows, rng=None):
    genomes = np.array(rows, dtype=np.uint8)
    return sort_arrays(genomes, dlb_batch(genomes), rng or RngStream(0), "dlb")


# ── 块统计 ──


def test_block_stats_by_hand():
    pop = ranked([
        [1, 1, 1, 1],   # φ=2
        [1, 1, 0, 0],   # φ=1，第 2 块为 00
        [1, 1, 1, 0],   # φ=1，第 2 块为 10
        [0, 1, 1, 1],   # φ=0，第 1 块为 01
    ])
    stats = block_stats(pop, mu=2)
    assert list(stats.C) == [4, 3, 1]
    assert list(stats.D) == [0, 0, 1]
    assert list(stats.E) == [0, 0, 1]
    assert list(stats.F) == [0, 1, 0]
    assert stats.Z_star == 2
    assert stats.Z == 1
    assert check_block_identities(stats) == []


def test_block_stats_requires_dlb():
    genomes = np.zeros((2, 4), dtype=np.uint8)
    pop = sort_arrays(genomes, np.zeros(2), RngStream(0), "one_max")
    with pytest.raises(InvalidParameter):
        block_stats(pop, 1)


def test_identities_on_random_populations():
    rng = RngStream(1)
    for _ in range(200):
        p = rng.random(20)
        genomes = rng.bernoulli(p, (50, 20))
        stats = block_stats(sort_arrays(genomes, dlb_batch(genomes), rng, "dlb"), 10)
        assert check_block_identities(stats) == []
        assert stats.Z <= stats.Z_star


# ── 公式 ──


def test_theta_examples():
    assert theta(200, 1000, 0.1) == pytest.approx(36.0)
    assert theta(50, 50, 0.0) == pytest.approx(50.0)


def test_theta_rejects_bad_epsilon():
    with pytest.raises(InvalidParameter):
        theta(10, 100, 1.0)


@pytest.mark.parametrize("c", [0.01, 0.1, 0.3])
def test_trap_tail_bound_at_half(c):
    assert trap_tail_bound(c, 0.5) == pytest.approx(2 * c)


def test_trap_tail_bound_floors_at_zero():
    assert trap_tail_bound(0.0, 0.2) == 0.0


def test_trap_tail_bound_inapplicable():
    with pytest.raises(InapplicableBound):
        trap_tail_bound(0.1, 0.0)


def test_z0_bounds():
    assert 5.70 <= z0_expectation_bound(1000) <= 5.71
    assert z0_expectation_bound(1, None) == pytest.approx(1 / math.log(4))
    assert z0_expectation_bound(1000, 10) < z0_expectation_bound(1000)
    with pytest.raises(InvalidParameter):
        z0_expectation_bound(0)


def test_level_based_bound_example():
    result = level_based_bound([0.5], 0.5, 1000, gamma0=0.5)
    expected = 8 / 0.25 * (1000 * math.log(6 * 0.5 * 1000 / (4 + 0.5 * 0.5 * 1000)) + 2)
    assert result.bound == pytest.approx(expected, rel=1e-12)
    assert result.bound == pytest.approx(79073.07, abs=0.1)


def test_level_based_g3_flag():
    z = [0.1] * 3
    lambda_min = 4 / (0.5 * 1.0) * math.log(128 * 4 / (0.1 * 1.0))
    assert not level_based_bound(z, 1.0, int(lambda_min) - 1, gamma0=0.5).g3_satisfied
    result = level_based_bound(z, 1.0, int(lambda_min) + 1, gamma0=0.5)
    assert result.g3_satisfied
    assert result.lambda_min == pytest.approx(lambda_min)


def test_level_based_bound_rejects_bad_inputs():
    with pytest.raises(InvalidParameter):
        level_based_bound([], 0.5, 100, gamma0=0.5)
    with pytest.raises(InvalidParameter):
        level_based_bound([0.5], 0.0, 100, gamma0=0.5)
    with pytest.raises(InvalidParameter):
        level_based_bound([0.5, 0.5], 0.5, 100, gamma0=0.5, m=2)


def test_level_params():
    ea = comma_ea_level_params(100, 1.0, 10, 1000)
    assert ea.m == 51 and ea.z.size == 50
    assert ea.z[0] == pytest.approx(math.exp(-1) / 100 ** 2)
    assert ea.delta == 1.0
    umda = umda_high_pressure_level_params(60, 14, 2000)
    assert umda.delta == 1.0
    assert umda_high_pressure_level_params(60, 14, 600).delta == pytest.approx(600 / (math.e * 196) - 1)
    with pytest.raises(InapplicableBound):
        umda_high_pressure_level_params(60, 20, 1000)
    with pytest.raises(InapplicableBound):
        comma_ea_level_params(100, 1.0, 200, 1000)


def test_pressure_regimes():
    assert selective_pressure(10, 1000) == pytest.approx(0.01)
    assert pressure_regime(14, 2000) == "extreme"
    assert pressure_regime(14, 600) == "extreme"
    assert pressure_regime(200, 1000) == "trap"
    assert pressure_regime(10, 1000) == "extreme"
    assert pressure_regime(40, 4000) == "open"


def test_formula_report_passes():
    assert check_formulas().passed


# ── 蒙特卡洛 ──


def test_block_means_from_uniform_model():
    report = verify_block_distributions(np.full(20, 0.5), 50, 200, 10_000, RngStream(2), blocks=1)
    assert report.passed, [c for c in report.failures]
    names = {c.name: c.expected for c in report.checks}
    assert names["block_C1"] == pytest.approx(50.0)
    assert names["block_D1"] == pytest.approx(50.0)
    assert names["block_E1"] == pytest.approx(50.0)


def test_block_means_on_skewed_model():
    p = np.linspace(0.2, 0.9, 12)
    report = verify_block_distributions(p, 10, 100, 5000, RngStream(3), blocks=3)
    assert report.passed, report.failures


def test_selected_block_laws():
    report = verify_selected_block_laws(np.full(20, 0.5), 50, 200, 3000, RngStream(4), block=4)
    assert report.passed, report.failures


def test_untouched_marginals():
    report = verify_untouched_marginal_dynamics(100, 100, 20_000, RngStream(5), record_at=(0, 10, 100))
    assert report.passed, report.failures


def test_binomial_second_moment():
    report = verify_binomial_second_moment(10, 0.5, 1_000_000, RngStream(6))
    assert report.passed
    assert report.checks[1].expected == pytest.approx(27.5)


def test_initial_leading_blocks():
    report = verify_initial_leading_blocks(1000, 300, RngStream(7), mu=10)
    assert report.passed, report.failures


def test_trap_frequency_report():
    # γ* = 1/2 时尾部下界为 2c，严格为正
    report = verify_trap_frequency(500, 1000, 100, 400, RngStream(8), burn_in=150)
    assert len(report.checks) == 1
    check = report.checks[0]
    assert check.name == "trap_frequency"
    assert check.expected > 0.0
    assert check.observed >= check.expected
    assert report.passed


def test_trap_frequency_default_burn_in_leaves_samples():
    report = verify_trap_frequency(500, 1000, 100, 60, RngStream(10))
    assert "预热期内无样本" not in report.checks[0].note


@pytest.mark.slow
def test_untouched_marginals_full_scale():
    report = verify_untouched_marginal_dynamics(100, 292, 100_000, RngStream(9),
                                                record_at=(10, 100, 292))
    assert report.passed, report.failures
