"""Distinct-coupon statistics: exact moments, waiting times, Chebyshev tail.

``Q`` is the number of distinct indices hit by ``N = round(c M)`` uniform
draws from ``M``.  The tail bound controls ``P(Q >= (1 - e^-c + delta) M)``
through the waiting time ``T`` for the ``alpha M``-th distinct coupon,
``alpha = 1 - e^-c + delta``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BoundUndefinedError, ParameterDomainError
from .model import map_trials, round_half_up
from .rng import draw_indices

EULER_GAMMA = 0.5772156649015329
HARMONIC_DIRECT_MAX = 10**6


def expected_distinct(M: int, N: int) -> float:
    """``M (1 - (1 - 1/M)^N)``."""
    if M < 1 or N < 0:
        raise ParameterDomainError(f"need M >= 1, N >= 0 (M={M}, N={N})")
    if N == 0:
        return 0.0
    if M == 1:
        return 1.0
    return -M * math.expm1(N * math.log1p(-1.0 / M))


def harmonic(n: int) -> float:
    if n < 1:
        raise ParameterDomainError(f"harmonic needs n >= 1, got {n}")
    if n <= HARMONIC_DIRECT_MAX:
        return math.fsum(1.0 / np.arange(n, 0, -1, dtype=float))
    return math.log(n) + EULER_GAMMA + 1 / (2 * n) - 1 / (12 * n * n)


def collected_count(M: int, alpha: float) -> int:
    """Smallest integer ``a >= alpha M``; ``Q >= alpha M`` iff ``Q >= a``.

    A 1e-9 allowance absorbs float noise just above an integer.
    """
    return math.ceil(alpha * M - 1e-9)


def expected_waiting_time(M: int, alpha: float) -> float:
    """Exact mean number of draws to collect ``ceil(alpha M)`` distinct coupons."""
    if not 0 < alpha <= 1:
        raise ParameterDomainError(f"alpha must lie in (0, 1], got {alpha}")
    a = collected_count(M, alpha)
    rest = M - a
    if a < 1:
        raise ParameterDomainError(f"alpha*M = {alpha * M} collects no coupon")
    if rest < 1:
        raise ParameterDomainError("(1 - alpha) M < 1: full collection is outside this regime")
    if M <= HARMONIC_DIRECT_MAX:
        return M * math.fsum(1.0 / np.arange(M, rest, -1, dtype=float))
    return M * (harmonic(M) - harmonic(rest))


@dataclass(frozen=True)
class VarianceBounds:
    exact: float
    alpha_bound: float  # M alpha / (2 (1 - alpha)^2)
    coverage_bound: float | None  # 2 M e^{2c}, when c is given

    @property
    def ordered(self) -> bool:
        ok = self.exact <= self.alpha_bound
        if self.coverage_bound is not None:
            ok = ok and self.alpha_bound <= self.coverage_bound
        return ok


def variance_upper_bound(M: int, alpha: float, c: float | None = None) -> VarianceBounds:
    if not 0 < alpha < 1:
        raise ParameterDomainError(f"alpha must lie in (0, 1), got {alpha}")
    a = collected_count(M, alpha)
    i = np.arange(a, dtype=float)
    exact = math.fsum(i * M / (M - i) ** 2)
    alpha_bound = M * alpha / (2 * (1 - alpha) ** 2)
    cov = None if c is None else 2 * M * math.exp(2 * c)
    return VarianceBounds(exact, alpha_bound, cov)


@dataclass(frozen=True)
class TailBoundInputs:
    M: int
    c: float
    delta: float

    def __post_init__(self):
        if self.M < 1:
            raise ParameterDomainError(f"M must be >= 1, got {self.M}")
        if not (math.isfinite(self.c) and self.c > 0):
            raise ParameterDomainError(f"c must be finite and > 0, got {self.c}")
        half = math.exp(-self.c) / 2
        if not 0 < self.delta <= half:
            raise ParameterDomainError(
                f"delta must lie in (0, e^-c/2] = (0, {half:.10g}], got {self.delta}"
            )

    @property
    def alpha(self) -> float:
        return -math.expm1(-self.c) + self.delta

    @property
    def xi(self) -> float:
        """``ln(e^-c / (e^-c - delta))``."""
        return -math.log1p(-self.delta * math.exp(self.c))


def chebyshev_tail_bound(inputs: TailBoundInputs, displayed_form: bool = False) -> float:
    """Upper bound on ``P(Q >= (1 - e^-c + delta) M)``.

    Default is ``2 e^{2c} / (M (xi - e^c / M)^2)``, the inequality the
    Chebyshev argument actually establishes.  ``displayed_form=True`` puts
    an extra factor 2 in the denominator, i.e. returns half that value.
    """
    M, c = inputs.M, inputs.c
    gap = inputs.xi - math.exp(c) / M
    if gap <= 0:
        raise BoundUndefinedError(
            f"xi - e^c/M = {gap:.6g} <= 0: M={M} too small for delta={inputs.delta}"
        )
    bound = 2 * math.exp(2 * c) / (M * gap * gap)
    return bound / 2 if displayed_form else bound


def distinct_count(M: int, N: int, seed: int) -> int:
    idx = draw_indices(M, N, seed)
    return int(np.count_nonzero(np.bincount(idx, minlength=M)))


@dataclass(frozen=True)
class TailRow:
    delta: float
    empirical: float
    bound: float | None  # None where the bound is undefined at this M


@dataclass(frozen=True)
class DistinctSummary:
    M: int
    N: int
    c: float
    mean: float  # mean fraction Q/M
    std: float  # sample std of Q/M
    tails: list[TailRow]
    q: np.ndarray = field(repr=False)

    def to_json(self) -> str:
        return json.dumps(
            {
                "mean": self.mean,
                "std": self.std,
                "tails": [{"delta": t.delta, "empirical": t.empirical, "bound": t.bound} for t in self.tails],
            },
            indent=2,
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["trial", "M", "N", "Q", "fraction"])
        for t, q in enumerate(self.q.tolist()):
            w.writerow([t, self.M, self.N, q, format(q / self.M, ".10g")])
        return buf.getvalue()


def simulate_distinct(
    M: int,
    c: float,
    trials: int,
    seed: int,
    deltas=(),
    workers: int | None = None,
) -> DistinctSummary:
    if trials < 1:
        raise ParameterDomainError(f"trials must be >= 1, got {trials}")
    if M < 1 or not (math.isfinite(c) and c > 0):
        raise ParameterDomainError(f"need M >= 1 and c > 0 (M={M}, c={c})")
    N = round_half_up(c * M)
    q = np.array(map_trials(lambda s: distinct_count(M, N, s), seed, trials, workers), dtype=np.int64)
    frac = q / M
    std = float(frac.std(ddof=1)) if trials > 1 else 0.0
    tails = []
    for d in deltas:
        inputs = TailBoundInputs(M, c, d)
        thresh = inputs.alpha * M
        emp = float(np.count_nonzero(q >= thresh - 1e-9)) / trials
        try:
            bound = chebyshev_tail_bound(inputs)
        except BoundUndefinedError:
            bound = None
        tails.append(TailRow(d, emp, bound))
    return DistinctSummary(M, N, c, float(frac.mean()), std, tails, q)
