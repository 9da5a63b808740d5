"""Closed-form cycle combinatorics and the two-parameter run-time model.

The recursive cycle with counter kappa makes one call inheriting kappa and,
while kappa exceeds one, a second call with kappa - 1.  The number of
routine calls this generates is

    level_calls(kappa, l) = sum_{j=0}^{min(kappa-1, l-1)} C(l-1, j)
    total_calls(kappa, n) = sum_{j=1}^{min(kappa, n)} C(n, j)

so the total is a polynomial of degree kappa in the level count n while
kappa < n, and 2**n - 1 (the W-cycle) once kappa >= n.  The coarsest level
is reached C(n-1, j) times with counter kappa - j.

With a constant coarsening factor c (coarse unknowns / fine unknowns), cost
C per unknown per call above the coarsest and Ctilde per coarsest unknown,
the operations in one cycle are

    n_ops = f(kappa, c) * C * N_n + P(kappa, c, n)
    f(kappa, c) = (1 - (c/(1-c))**kappa) / (1 - 2c)    (2*kappa at c = 1/2)
    P = sum_j [Ctilde - f(kappa - j, c) * C] * N_1 * C(n-1, j)

where N_n = c**(1-n) * N_1 is the finest-level unknown count.  `math.inf`
is accepted for kappa throughout and handled symbolically (f(inf, c) =
1/(1-2c) for c < 1/2, total_calls = 2**n - 1).

Predicted wall time per cycle is the linear combination

    T = alpha * n_gpu_calls + beta * n_ops

with n_gpu_calls = (5 + nu) * total_calls(kappa, n-1) + total_calls(kappa, n)
- total_calls(kappa, n-1): each call above the coarsest dispatches nu
relaxation kernels plus residual, restrict, zero, prolong and correction
add; a coarsest call dispatches one.  The turning point, where the two cost
components balance, is located by the fixed-point iteration

    n <- log2(1 + sqrt((alpha/beta) * n_gpu_calls(kappa, n) / C(kappa)))

with C(kappa) = 2*(1 - 3**-kappa) (the c = 1/4 operation factor), starting
from n = 2 and running 20 iterations; total_calls is evaluated at real n
through the falling-factorial binomial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "CostModelParams",
    "OpCountSpec",
    "CostReport",
    "TurningPoint",
    "RankDeficientError",
    "level_calls",
    "total_calls",
    "coarse_counter_histogram",
    "f_factor",
    "n_ops_model",
    "n_gpu_calls",
    "ops_per_unknown",
    "predict_runtime",
    "fit_params",
    "binom_real",
    "turning_point",
    "cost_report",
]


class RankDeficientError(ValueError):
    """The least-squares design matrix does not determine both parameters."""


@dataclass(frozen=True)
class CostModelParams:
    """Run-time model parameters: ms per launch, ms per op unit, relaxations
    per routine call, and the coarsening factor."""

    alpha: float
    beta: float
    nu: int = 4
    c: float = 0.25

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be nonnegative")
        if not 0.0 < self.c < 1.0:
            raise ValueError(f"coarsening factor must lie in (0, 1), got {self.c}")


@dataclass(frozen=True)
class OpCountSpec:
    """Operation-count constants: per-unknown cost C above the coarsest,
    Ctilde on the coarsest solve, and the coarsest unknown count N1."""

    C: float = 1.0
    Ctilde: float = 1.0
    N1: float = 1.0

    def __post_init__(self):
        if self.C <= 0:
            raise ValueError("C must be positive")
        if self.N1 < 1:
            raise ValueError("N1 must be at least 1")


@dataclass(frozen=True)
class TurningPoint:
    """Fixed-point result: fractional level count and unknown count where the
    launch-overhead cost equals the computation cost."""

    n_tp: float
    N_tp: float
    converged: bool
    degenerate: bool = False


@dataclass(frozen=True)
class CostReport:
    level_calls: tuple[int, ...]
    total_calls: int
    n_gpu_calls: int
    n_ops: float
    predicted_ms: float
    turning_point: TurningPoint


def _check_kappa(kappa, minimum: int = 1):
    if kappa == math.inf:
        return
    if isinstance(kappa, float) and not kappa.is_integer():
        raise ValueError(f"kappa must be an integer or inf, got {kappa}")
    if kappa < minimum:
        raise ValueError(f"kappa must be >= {minimum}, got {kappa}")


def level_calls(kappa, level: int) -> int:
    """Routine calls on `level` (1 = finest) in one cycle with counter kappa.

    Zero for kappa <= 0: the routine is never entered with a non-positive
    counter, which also closes the recurrence
    level_calls(k, p+1) == level_calls(k, p) + level_calls(k-1, p).
    """
    if kappa != math.inf:
        if isinstance(kappa, float) and not kappa.is_integer():
            raise ValueError(f"kappa must be an integer or inf, got {kappa}")
        if kappa < 1:
            return 0
    if level < 1:
        raise ValueError(f"level must be >= 1, got {level}")
    top = int(min(kappa - 1, level - 1))
    return sum(math.comb(level - 1, j) for j in range(top + 1))


def total_calls(kappa, n: int) -> int:
    """Routine calls over all levels in one cycle of n levels."""
    _check_kappa(kappa)
    if n < 0:
        raise ValueError(f"level count must be >= 0, got {n}")
    if n == 0:
        return 0
    top = int(min(kappa, n))
    return sum(math.comb(n, j) for j in range(1, top + 1))


def coarse_counter_histogram(kappa: int, n: int) -> dict[int, int]:
    """Multiset of counters seen at the coarsest level: kappa - j occurs
    C(n-1, j) times for j = 0..min(kappa-1, n-1).  Requires finite kappa
    (clamp inf to n first, as the cycle driver does)."""
    if kappa == math.inf:
        raise ValueError("histogram needs a finite counter; clamp inf to the level count")
    _check_kappa(kappa)
    if n < 1:
        raise ValueError(f"level count must be >= 1, got {n}")
    return {kappa - j: math.comb(n - 1, j) for j in range(min(kappa - 1, n - 1) + 1)}


def f_factor(kappa, c: float) -> float:
    """Geometric work factor: per-cycle operations above the coarsest level
    equal f(kappa, c) * C * N_n when the coarsest solve is cost-adjusted."""
    _check_kappa(kappa)
    if not 0.0 < c < 1.0:
        raise ValueError(f"coarsening factor must lie in (0, 1), got {c}")
    if kappa == math.inf:
        if c >= 0.5:
            raise ValueError("f(inf, c) is undefined for c >= 0.5")
        return 1.0 / (1.0 - 2.0 * c)
    if c == 0.5:
        return 2.0 * kappa
    return (1.0 - (c / (1.0 - c)) ** kappa) / (1.0 - 2.0 * c)


def n_ops_model(kappa, c: float, n: int, spec: OpCountSpec = OpCountSpec()) -> float:
    """Exact per-cycle operation count under constant-factor coarsening."""
    if n < 1:
        raise ValueError(f"level count must be >= 1, got {n}")
    nn = spec.N1 * c ** (1 - n)
    linear = f_factor(kappa, c) * spec.C * nn
    top = int(min(kappa - 1, n - 1))
    correction = 0.0
    for j in range(top + 1):
        kj = kappa - j  # stays inf when kappa is inf
        correction += (spec.Ctilde - f_factor(kj, c) * spec.C) * spec.N1 * math.comb(n - 1, j)
    return linear + correction


def n_gpu_calls(kappa, n: int, nu: int) -> int:
    """Kernel-equivalent launches in one cycle: (5 + nu) per call above the
    coarsest level plus one per coarsest call."""
    if n < 1:
        raise ValueError(f"level count must be >= 1, got {n}")
    if nu < 0:
        raise ValueError(f"nu must be >= 0, got {nu}")
    below = total_calls(kappa, n - 1)
    return (5 + nu) * below + total_calls(kappa, n) - below


def ops_per_unknown(kappa) -> float:
    """Operation factor 2*(1 - 3**-kappa): f(kappa, c) at c = 1/4."""
    _check_kappa(kappa)
    if kappa == math.inf:
        return 2.0
    return 2.0 * (1.0 - 3.0 ** -kappa)


def predict_runtime(params: CostModelParams, kappa, n: int) -> float:
    """Predicted ms per cycle on a standard-coarsened square grid with
    (2**n - 1)**2 finest-level unknowns."""
    n_unknowns = (2 ** n - 1) ** 2
    return params.alpha * n_gpu_calls(kappa, n, params.nu) + params.beta * n_unknowns * ops_per_unknown(kappa)


def fit_params(observations, nu: int) -> tuple[float, float]:
    """Least-squares (alpha, beta) from (kappa, levels, measured_ms) rows."""
    rows = list(observations)
    if len(rows) < 2:
        raise RankDeficientError("at least two observations are required")
    design = np.array(
        [[n_gpu_calls(k, n, nu), (2 ** n - 1) ** 2 * ops_per_unknown(k)] for k, n, _ in rows],
        dtype=float,
    )
    y = np.array([ms for _, _, ms in rows], dtype=float)
    solution, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < 2:
        raise RankDeficientError("design matrix is rank deficient: launches and op counts are collinear")
    alpha, beta = solution
    return float(alpha), float(beta)


def binom_real(x: float, j: int) -> float:
    """Falling-factorial binomial x(x-1)...(x-j+1)/j!, defined for real x."""
    if j < 0:
        raise ValueError(f"j must be >= 0, got {j}")
    out = 1.0
    for i in range(j):
        out *= (x - i) / (i + 1)
    return out


def _total_calls_real(kappa, n: float) -> float:
    """Continuous extension of total_calls for the turning-point iteration."""
    if kappa == math.inf:
        return 2.0 ** n - 1.0
    return sum(binom_real(n, j) for j in range(1, int(kappa) + 1))


def _n_gpu_calls_real(kappa, n: float, nu: int) -> float:
    below = _total_calls_real(kappa, n - 1.0)
    return (5 + nu) * below + _total_calls_real(kappa, n) - below


_TP_ITERATIONS = 20
_TP_TOL = 1e-4  # well below the 0.1-level precision the result is read at


def turning_point(params: CostModelParams, kappa) -> TurningPoint:
    """Problem size where launch overhead and computation cost balance.

    Fixed-point iteration from n = 2, 20 iterations; with alpha = 0 there is
    no overhead and no turning point, flagged as degenerate.
    """
    _check_kappa(kappa)
    if params.alpha == 0.0:
        return TurningPoint(n_tp=0.0, N_tp=0.0, converged=True, degenerate=True)
    if params.beta == 0.0:
        raise ValueError("beta must be positive to locate a turning point")
    ratio = params.alpha / params.beta
    ck = ops_per_unknown(kappa)
    n = 2.0
    delta = math.inf
    for _ in range(_TP_ITERATIONS):
        g = _n_gpu_calls_real(kappa, n, params.nu)
        n_next = math.log2(1.0 + math.sqrt(ratio * g / ck))
        delta = abs(n_next - n)
        n = n_next
    return TurningPoint(n_tp=n, N_tp=(2.0 ** n - 1.0) ** 2, converged=delta < _TP_TOL)


def cost_report(params: CostModelParams, kappa, n: int) -> CostReport:
    """All model quantities for one (kappa, n) cell."""
    return CostReport(
        level_calls=tuple(level_calls(kappa, l) for l in range(1, n + 1)),
        total_calls=total_calls(kappa, n),
        n_gpu_calls=n_gpu_calls(kappa, n, params.nu),
        n_ops=(2 ** n - 1) ** 2 * ops_per_unknown(kappa),
        predicted_ms=predict_runtime(params, kappa, n),
        turning_point=turning_point(params, kappa),
    )
