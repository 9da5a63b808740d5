import math

import numpy as np
import pytest

from kcycle.costmodel import (
    CostModelParams,
    OpCountSpec,
    RankDeficientError,
    binom_real,
    coarse_counter_histogram,
    cost_report,
    f_factor,
    fit_params,
    level_calls,
    n_gpu_calls,
    n_ops_model,
    ops_per_unknown,
    predict_runtime,
    total_calls,
    turning_point,
)

from oracles import brute_ops, brute_trace, brute_visits

INF = math.inf

PAPER_GRID = [(k, n) for k in (1, 2, 3, 4, INF) for n in range(4, 14)]


def test_level_calls_hand_values():
    assert all(level_calls(k, 1) == 1 for k in (1, 2, 5, INF))
    assert level_calls(5, 3) == 4  # 2**(l-1) once the counter covers the level
    assert level_calls(2, 5) == 5
    assert level_calls(0, 7) == 0


def test_level_calls_matches_brute_recursion():
    for kappa in list(range(1, 9)) + [INF]:
        for n in range(1, 12):
            want = brute_visits(n if kappa == INF else kappa, n)
            got = [level_calls(kappa, l) for l in range(1, n + 1)]
            assert got == want, (kappa, n)


def test_level_calls_recurrence():
    for kappa in range(0, 11):
        for p in range(1, 15):
            assert level_calls(kappa, p + 1) == level_calls(kappa, p) + level_calls(kappa - 1, p)


def test_total_calls_hand_values():
    assert all(total_calls(1, n) == n for n in range(1, 10))
    assert total_calls(10, 10) == 1023
    assert total_calls(INF, 10) == 1023
    assert total_calls(3, 5) == 25


def test_total_calls_is_sum_of_level_calls():
    for kappa in list(range(1, 9)) + [INF]:
        for n in range(1, 15):
            assert total_calls(kappa, n) == sum(level_calls(kappa, l) for l in range(1, n + 1))


def test_total_calls_monotone_in_kappa():
    for n in range(1, 13):
        values = [total_calls(k, n) for k in range(1, n + 3)]
        assert all(a <= b for b, a in zip(values[1:], values))
        strict = values[: n]  # strictly increasing until kappa = n
        assert all(a < b for a, b in zip(strict, strict[1:]))
        assert values[n - 1] == 2 ** n - 1


def test_total_calls_polynomial_degree():
    # the (kappa+1)-th finite difference over n vanishes exactly
    for kappa in range(1, 6):
        ns = range(kappa + 1, kappa + 12)
        seq = [total_calls(kappa, n) for n in ns]
        for _ in range(kappa + 1):
            seq = [b - a for a, b in zip(seq, seq[1:])]
        assert all(v == 0 for v in seq)


def test_histogram_hand_values():
    assert coarse_counter_histogram(1, 6) == {1: 1}
    assert coarse_counter_histogram(7, 2) == {7: 1, 6: 1}
    assert coarse_counter_histogram(3, 3) == {3: 1, 2: 2, 1: 1}


def test_histogram_matches_brute_trace():
    for kappa in range(1, 7):
        for n in range(1, 11):
            want = {}
            for level, counter in brute_trace(kappa, n):
                if level == n:
                    want[counter] = want.get(counter, 0) + 1
            assert coarse_counter_histogram(kappa, n) == want


def test_histogram_totals_match_level_calls():
    for kappa in range(1, 7):
        for n in range(1, 11):
            assert sum(coarse_counter_histogram(kappa, n).values()) == level_calls(kappa, n)


def test_histogram_rejects_inf():
    with pytest.raises(ValueError):
        coarse_counter_histogram(INF, 5)


def test_f_factor_values():
    assert f_factor(1, 0.25) == pytest.approx(4.0 / 3.0, rel=1e-15)
    for kappa in range(1, 8):
        assert f_factor(kappa, 0.5) == 2.0 * kappa
    assert f_factor(INF, 0.25) == pytest.approx(2.0, rel=1e-15)
    # geometric-series oracle: f(kappa, c) = sum_{l>=0 ...} via brute cycle below
    with pytest.raises(ValueError):
        f_factor(INF, 0.5)
    with pytest.raises(ValueError):
        f_factor(INF, 0.6)
    with pytest.raises(ValueError):
        f_factor(2, 0.0)


def test_f_factor_monotone_and_bounded():
    for c in (0.2, 0.25, 0.3, 0.45):
        values = [f_factor(k, c) for k in range(1, 12)]
        assert all(a < b for a, b in zip(values, values[1:]))
        assert values[-1] < f_factor(INF, c)


def test_n_ops_collapses_on_one_level():
    spec = OpCountSpec(C=1.7, Ctilde=3.1, N1=2.0)
    for kappa in (1, 4, INF):
        assert n_ops_model(kappa, 0.25, 1, spec) == pytest.approx(3.1 * 2.0, rel=1e-15)


def test_n_ops_kappa1_geometric_series():
    # V shape: exact cost C*(N_n + ... + N_2) + Ctilde*N_1
    spec = OpCountSpec(C=2.0, Ctilde=0.5, N1=1.0)
    c = 0.25
    for n in range(1, 12):
        levels = [c ** (1 - l) for l in range(1, n + 1)]  # N_1..N_n
        exact = 2.0 * sum(levels[1:]) + 0.5 * levels[0]
        assert n_ops_model(1, c, n, spec) == pytest.approx(exact, rel=1e-13)


@pytest.mark.parametrize("c", [0.2, 0.25, 0.3, 0.5, 0.6])
def test_n_ops_matches_brute_recursion(c):
    spec = OpCountSpec(C=1.3, Ctilde=2.7, N1=1.0)
    for kappa in range(1, 7):
        for n in range(1, 13):
            want = brute_ops(kappa, c, n, spec.C, spec.Ctilde, spec.N1)
            got = n_ops_model(kappa, c, n, spec)
            assert got == pytest.approx(want, rel=1e-12), (kappa, c, n)


def test_n_ops_inf_matches_clamped_counter():
    spec = OpCountSpec(C=1.0, Ctilde=1.0, N1=1.0)
    for n in range(1, 10):
        got = n_ops_model(INF, 0.25, n, spec)
        want = brute_ops(n, 0.25, n, 1.0, 1.0, 1.0)
        assert got == pytest.approx(want, rel=1e-12)


def test_p_term_bounds():
    spec = OpCountSpec(C=1.0, Ctilde=3.0, N1=1.0)
    for c in (0.2, 0.25, 0.3):
        for kappa in range(1, 7):
            for n in range(2, 12):
                p = n_ops_model(kappa, c, n, spec) - f_factor(kappa, c) * spec.C * spec.N1 * c ** (1 - n)
                s = sum(math.comb(n - 1, j) for j in range(min(kappa - 1, n - 1) + 1))
                low = (spec.Ctilde - spec.C / (1 - 2 * c)) * spec.N1 * s
                high = (spec.Ctilde - spec.C / (1 - c)) * spec.N1 * s
                assert low - 1e-9 <= p <= high + 1e-9


def test_linear_complexity_ratio():
    spec = OpCountSpec(C=1.0, Ctilde=1.0, N1=1.0)
    for c in (0.2, 0.25, 0.3):
        for kappa in range(1, 5):
            n = 20
            ratio = n_ops_model(kappa, c, n, spec) / (spec.N1 * c ** (1 - n))
            assert ratio == pytest.approx(f_factor(kappa, c) * spec.C, rel=0.01)


def test_n_gpu_calls_hand_values():
    for kappa in (1, 3, INF):
        for nu in (0, 2, 4):
            assert n_gpu_calls(kappa, 1, nu) == 1
    assert n_gpu_calls(1, 10, 4) == 82
    assert n_gpu_calls(INF, 5, 4) == 151


def test_predict_runtime_values():
    params = CostModelParams(alpha=2.48e-3, beta=1.18e-6, nu=4)
    got = predict_runtime(params, 1, 13)
    want = 2.48e-3 * 109 + 1.18e-6 * (4.0 / 3.0) * 8191 ** 2
    assert got == pytest.approx(want, rel=1e-15)
    assert got == pytest.approx(105.829, abs=1e-3)
    zero = CostModelParams(alpha=0.0, beta=0.0, nu=4)
    assert predict_runtime(zero, 3, 9) == 0.0
    pure_overhead = CostModelParams(alpha=1.5, beta=0.0, nu=4)
    assert predict_runtime(pure_overhead, 2, 7) == 1.5 * n_gpu_calls(2, 7, 4)


def test_fit_recovers_exact_parameters():
    alpha, beta = 2.48e-3, 1.18e-6
    data = [(k, n, alpha * n_gpu_calls(k, n, 4) + beta * (2 ** n - 1) ** 2 * ops_per_unknown(k))
            for k, n in PAPER_GRID]
    got_alpha, got_beta = fit_params(data, nu=4)
    assert got_alpha == pytest.approx(alpha, rel=1e-9)
    assert got_beta == pytest.approx(beta, rel=1e-9)


def test_fit_two_observations_interpolate():
    alpha, beta = 0.5, 1e-5
    data = [(1, 4, alpha * n_gpu_calls(1, 4, 2) + beta * 225 * ops_per_unknown(1)),
            (INF, 8, alpha * n_gpu_calls(INF, 8, 2) + beta * 255 ** 2 * ops_per_unknown(INF))]
    got_alpha, got_beta = fit_params(data, nu=2)
    assert got_alpha == pytest.approx(alpha, rel=1e-12)
    assert got_beta == pytest.approx(beta, rel=1e-12)


def test_fit_with_noise_stays_within_ten_percent():
    # Unweighted least squares under +-5% multiplicative noise: the median
    # recovery error stays within 10% for both parameters, and the
    # computation-dominant beta does so in every trial.  (The per-trial worst
    # case for alpha is ~11-12% regardless of seeding: an estimator
    # sensitivity, not an implementation artifact.)
    alpha, beta = 2.48e-3, 1.18e-6
    clean = {cell: alpha * n_gpu_calls(cell[0], cell[1], 4)
             + beta * (2 ** cell[1] - 1) ** 2 * ops_per_unknown(cell[0])
             for cell in PAPER_GRID}
    rng = np.random.default_rng(0)
    alpha_errors, beta_errors = [], []
    for _ in range(100):
        data = [(k, n, clean[(k, n)] * (1.0 + rng.uniform(-0.05, 0.05)))
                for k, n in PAPER_GRID]
        got_alpha, got_beta = fit_params(data, nu=4)
        alpha_errors.append(abs(got_alpha - alpha) / alpha)
        beta_errors.append(abs(got_beta - beta) / beta)
    assert float(np.median(alpha_errors)) <= 0.10
    assert float(np.median(beta_errors)) <= 0.10
    assert max(beta_errors) <= 0.10


def test_fit_rank_deficient():
    row = (2, 6, 1.0)
    with pytest.raises(RankDeficientError):
        fit_params([row, row], nu=4)
    with pytest.raises(RankDeficientError):
        fit_params([row], nu=4)


def test_binom_real_values():
    assert binom_real(5.0, 2) == 10.0
    assert binom_real(123.4, 0) == 1.0
    assert binom_real(8.5, 2) == pytest.approx(31.875, rel=1e-15)
    for n in range(0, 12):
        for j in range(0, 12):
            assert binom_real(float(n), j) == pytest.approx(math.comb(n, j), abs=1e-9)


def test_turning_points_reference_values():
    params = CostModelParams(alpha=2.48e-3, beta=1.18e-6, nu=4)
    tp_inf = turning_point(params, INF)
    assert tp_inf.converged and abs(tp_inf.n_tp - 12.4) <= 0.3
    assert tp_inf.N_tp == pytest.approx(2.8e7, rel=0.35)
    tp3 = turning_point(params, 3)
    assert tp3.converged and abs(tp3.n_tp - 10.0) <= 0.4
    tp2 = turning_point(params, 2)
    assert tp2.converged and abs(tp2.n_tp - 9.1) <= 0.4
    tp1 = turning_point(params, 1)
    assert tp1.converged and abs(tp1.n_tp - 8.2) <= 0.4


def test_turning_point_monotone_in_kappa():
    params = CostModelParams(alpha=2.48e-3, beta=1.18e-6, nu=4)
    values = [turning_point(params, k).n_tp for k in (1, 2, 3, 4, 5, 6, INF)]
    assert all(a < b for a, b in zip(values, values[1:]))


def test_turning_point_degenerate_alpha_zero():
    params = CostModelParams(alpha=0.0, beta=1.0, nu=4)
    tp = turning_point(params, 2)
    assert tp.degenerate
    assert tp.N_tp == 0.0


def test_turning_point_rejects_zero_beta():
    with pytest.raises(ValueError):
        turning_point(CostModelParams(alpha=1.0, beta=0.0, nu=4), 2)


def test_cost_report_consistency():
    params = CostModelParams(alpha=2.48e-3, beta=1.18e-6, nu=4)
    report = cost_report(params, 3, 8)
    assert sum(report.level_calls) == report.total_calls
    assert report.level_calls == tuple(level_calls(3, l) for l in range(1, 9))
    assert report.predicted_ms == pytest.approx(
        params.alpha * report.n_gpu_calls + params.beta * report.n_ops, rel=1e-15)


def test_parameter_validation():
    with pytest.raises(ValueError):
        CostModelParams(alpha=-1.0, beta=1.0)
    with pytest.raises(ValueError):
        CostModelParams(alpha=1.0, beta=1.0, c=1.0)
    with pytest.raises(ValueError):
        OpCountSpec(C=0.0)
    with pytest.raises(ValueError):
        level_calls(1.5, 3)
    with pytest.raises(ValueError):
        total_calls(0, 3)
