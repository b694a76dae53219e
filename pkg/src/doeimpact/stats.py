"""Descriptive statistics, rank correlations and the Wilcoxon signed-rank test."""

from __future__ import annotations

import math
import statistics
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Hashable, Sequence

from scipy import stats as sps

from .errors import AllZeroDifferences, DegenerateInput, DegenerateRanking, EmptyInput

QUARTILE_METHOD = "linear interpolation between closest ranks (inclusive)"
EXACT_WILCOXON_MAX_N = 25


@dataclass(frozen=True)
class QuartileSummary:
    q1: float
    q2: float
    q3: float
    mean: float
    n: int

    def to_dict(self) -> dict[str, float | int | str]:
        return {**asdict(self), "method": QUARTILE_METHOD}


def quartile_summary(values: Sequence[float]) -> QuartileSummary:
    data = sorted(float(v) for v in values)
    if not data:
        raise EmptyInput("quartile summary of an empty sample")
    if len(data) == 1:
        q1 = q2 = q3 = data[0]
    else:
        q1, q2, q3 = statistics.quantiles(data, n=4, method="inclusive")
    return QuartileSummary(q1=q1, q2=q2, q3=q3, mean=statistics.fmean(data), n=len(data))


def _rank_positions(ranking: Sequence[Hashable] | dict[Hashable, float]) -> dict[Hashable, float]:
    if isinstance(ranking, dict):
        return dict(ranking)
    return {item: float(pos) for pos, item in enumerate(ranking, 1)}


def kendall_tau(rank_a: Sequence[Hashable] | dict[Hashable, float], rank_b: Sequence[Hashable] | dict[Hashable, float]) -> float:
    """Tau-b between two rankings of the same ids.

    Each ranking is either an ordered list of ids (position = rank) or a
    mapping id -> rank, which allows tied ranks.
    """
    a, b = _rank_positions(rank_a), _rank_positions(rank_b)
    if set(a) != set(b):
        raise DegenerateRanking("rankings cover different ids")
    ids = sorted(a, key=repr)
    if len(ids) < 2:
        raise DegenerateRanking("need at least two ids")
    xs = [a[i] for i in ids]
    ys = [b[i] for i in ids]
    if len(set(xs)) == 1 or len(set(ys)) == 1:
        raise DegenerateRanking("all ranks tied in one of the rankings")
    tau = sps.kendalltau(xs, ys, variant="b").statistic
    return max(-1.0, min(1.0, float(tau)))


class Sidedness(str, Enum):
    TWO_SIDED = "two_sided"
    GREATER = "greater"
    LESS = "less"


@dataclass(frozen=True)
class PairedSample:
    pairs: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if not self.pairs:
            raise EmptyInput("paired sample needs at least one pair")

    @classmethod
    def from_differences(cls, diffs: Sequence[float]) -> PairedSample:
        return cls(tuple((float(d), 0.0) for d in diffs))

    @property
    def differences(self) -> list[float]:
        return [before - after for before, after in self.pairs]


@dataclass(frozen=True)
class WilcoxonResult:
    statistic: float
    p_value: float
    n: int
    exact: bool

    def __iter__(self):
        return iter((self.statistic, self.p_value))


def average_ranks(values: Sequence[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _exact_signed_rank_counts(doubled_ranks: Sequence[int]) -> list[int]:
    """Number of sign assignments reaching each doubled positive-rank sum."""
    total = sum(doubled_ranks)
    counts = [0] * (total + 1)
    counts[0] = 1
    reach = 0
    for r in doubled_ranks:
        reach += r
        for s in range(reach, r - 1, -1):
            counts[s] += counts[s - r]
    return counts


def wilcoxon_signed_rank(sample: PairedSample | Sequence[float], sidedness: Sidedness | str = Sidedness.TWO_SIDED) -> WilcoxonResult:
    """Signed-rank test on before - after differences.

    Zero differences are dropped; ties get average ranks. W is the sum of the
    ranks of positive differences. Exact p-values for up to 25 non-zero
    differences, otherwise a normal approximation with tie-corrected variance
    and continuity correction.
    """
    side = Sidedness(sidedness)
    diffs = sample.differences if isinstance(sample, PairedSample) else [float(d) for d in sample]
    nonzero = [d for d in diffs if d != 0]
    if not nonzero:
        raise AllZeroDifferences("every difference is zero")
    n = len(nonzero)
    ranks = average_ranks([abs(d) for d in nonzero])
    w = sum(r for r, d in zip(ranks, nonzero) if d > 0)

    if n <= EXACT_WILCOXON_MAX_N:
        doubled = [int(round(2 * r)) for r in ranks]
        counts = _exact_signed_rank_counts(doubled)
        w2 = int(round(2 * w))
        denom = 2**n
        p_le = sum(counts[: w2 + 1]) / denom
        p_ge = sum(counts[w2:]) / denom
        exact = True
    else:
        mean = n * (n + 1) / 4
        tie_term = 0.0
        for value in set(ranks):
            t = ranks.count(value)
            tie_term += t**3 - t
        var = n * (n + 1) * (2 * n + 1) / 24 - tie_term / 48
        sd = math.sqrt(var)
        norm = statistics.NormalDist()
        p_ge = 1 - norm.cdf((w - mean - 0.5) / sd)
        p_le = norm.cdf((w - mean + 0.5) / sd)
        exact = False

    if side is Sidedness.GREATER:
        p = p_ge
    elif side is Sidedness.LESS:
        p = p_le
    else:
        p = 2 * min(p_le, p_ge)
    return WilcoxonResult(statistic=w, p_value=min(1.0, p), n=n, exact=exact)


def pearson_r(x: Sequence[float], y: Sequence[float]) -> float:
    if len(x) != len(y):
        raise DegenerateInput("x and y differ in length")
    if len(x) < 2:
        raise DegenerateInput("need at least two observations")
    mx, my = statistics.fmean(x), statistics.fmean(y)
    sxy = math.fsum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = math.fsum((a - mx) ** 2 for a in x)
    syy = math.fsum((b - my) ** 2 for b in y)
    if sxx == 0 or syy == 0:
        raise DegenerateInput("zero variance")
    return max(-1.0, min(1.0, sxy / math.sqrt(sxx * syy)))


def spearman_rho(x: Sequence[float], y: Sequence[float]) -> float:
    if len(x) != len(y):
        raise DegenerateInput("x and y differ in length")
    return pearson_r(average_ranks(list(x)), average_ranks(list(y)))
