"""Choice between lotteries: utility factors, attraction ordering, quarter-law prediction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import AmbiguousRankingError, InvariantViolation, NormalizationError
from .events import UncertainUnion
from .linalg import DEFAULT_TOL, HilbertSpace

QUARTER = 0.25
DEFAULT_THETA = 0.1
PROB_TOL = 1e-9


@dataclass(frozen=True)
class Lottery:
    """Payoff/probability pairs ``{x_i, p(x_i)}``."""

    label: str
    outcomes: tuple[tuple[float, float], ...]

    def __post_init__(self):
        outs = tuple((float(x), float(p)) for x, p in self.outcomes)
        if not outs:
            raise ValueError(f"lottery {self.label!r} has no outcomes")
        for x, p in outs:
            if not math.isfinite(x):
                raise ValueError(f"lottery {self.label!r} has a non-finite payoff")
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"lottery {self.label!r} has probability {p} outside [0, 1]")
        total = math.fsum(p for _, p in outs)
        if abs(total - 1.0) > PROB_TOL:
            raise NormalizationError(
                f"probabilities of lottery {self.label!r} sum to {total:.12g}, not 1"
            )
        object.__setattr__(self, "label", str(self.label))
        object.__setattr__(self, "outcomes", outs)

    @property
    def certainty(self) -> float:
        """Largest probability attached to a strictly positive payoff."""
        return max((p for x, p in self.outcomes if x > 0), default=0.0)

    @property
    def max_gain(self) -> float:
        return max(x for x, _ in self.outcomes)


@dataclass(frozen=True)
class UtilityFunction:
    """``u(x) = c x`` or ``u(x) = c sign(x) |x|^k`` with ``0 < k <= 1``."""

    kind: str = "linear"
    scale: float = 1.0
    exponent: float = 1.0

    def __post_init__(self):
        if self.kind not in ("linear", "power"):
            raise ValueError(f"unknown utility kind {self.kind!r}")
        if not self.scale > 0:
            raise ValueError(f"utility scale must be positive, got {self.scale}")
        if self.kind == "power" and not 0 < self.exponent <= 1:
            raise ValueError(f"power exponent must be in (0, 1], got {self.exponent}")

    def __call__(self, x: float) -> float:
        if self.kind == "linear":
            return self.scale * x
        return self.scale * math.copysign(abs(x) ** self.exponent, x)

    def rescaled(self, c: float) -> "UtilityFunction":
        return UtilityFunction(self.kind, self.scale * c, self.exponent)


@dataclass(frozen=True)
class BeliefState:
    """Belief / disbelief pair ``B = {B_1, B_2}`` used as the shared uncertainty."""

    amplitudes: tuple[complex, complex] = (1 / math.sqrt(2), 1 / math.sqrt(2))

    def __post_init__(self):
        if len(self.amplitudes) != 2:
            raise ValueError("a belief state has exactly two modes")

    def union(self) -> UncertainUnion:
        return UncertainUnion.normalized(HilbertSpace.labelled("belief", "disbelief"), self.amplitudes)


@dataclass(frozen=True)
class LotteryPrediction:
    label: str
    expected_utility: float
    f: float
    q: float
    p: float


@dataclass(frozen=True)
class PredictionReport:
    records: tuple[LotteryPrediction, ...]
    attraction_ranking: tuple[str, ...]
    empirical: Mapping[str, float] | None = None
    deviations: Mapping[str, float] | None = field(default=None)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(r.label for r in self.records)

    @property
    def p(self) -> tuple[float, ...]:
        return tuple(r.p for r in self.records)

    @property
    def f(self) -> tuple[float, ...]:
        return tuple(r.f for r in self.records)

    @property
    def q(self) -> tuple[float, ...]:
        return tuple(r.q for r in self.records)

    @property
    def max_deviation(self) -> float | None:
        return None if self.deviations is None else max(self.deviations.values())

    @property
    def predicted_choice(self) -> str:
        return self.records[int(np.argmax(self.p))].label

    def consistency(self, tol: float = DEFAULT_TOL) -> list[tuple[str, float, bool]]:
        """``(name, residual, passed)`` rows for the measure identities."""
        rows = [
            ("sum_f", abs(math.fsum(self.f) - 1.0)),
            ("sum_p", abs(math.fsum(self.p) - 1.0)),
            ("sum_q", abs(math.fsum(self.q))),
            ("p_eq_f_plus_q", max(abs(r.p - r.f - r.q) for r in self.records)),
            ("p_in_unit", max(max(-r.p, r.p - 1.0, 0.0) for r in self.records)),
        ]
        return [(name, res, res <= tol) for name, res in rows]


def expected_utility(lottery: Lottery, u: UtilityFunction) -> float:
    return math.fsum(u(x) * p for x, p in lottery.outcomes)


def utility_factors(lotteries: Sequence[Lottery], u: UtilityFunction) -> list[float]:
    """``f_n = U_n / sum_m U_m``; requires nonnegative utilities with a positive sum."""
    if len(lotteries) < 2:
        raise ValueError("utility factors need at least two lotteries")
    us = [expected_utility(lot, u) for lot in lotteries]
    negative = [lot.label for lot, val in zip(lotteries, us) if val < 0]
    if negative:
        raise ValueError(f"negative expected utility for {negative}; loss lotteries are not supported")
    total = math.fsum(us)
    if total <= 0.0:
        raise NormalizationError("all expected utilities are zero; utility factors undefined")
    return [val / total for val in us]


def _more_attractive(a: Lottery, b: Lottery, theta: float) -> int:
    """+1 if ``a`` beats ``b``, -1 if ``b`` beats ``a``, 0 for a tie."""
    dc = a.certainty - b.certainty
    if abs(dc) > theta:
        return 1 if dc > 0 else -1
    dg = a.max_gain - b.max_gain
    if dg != 0:
        return 1 if dg > 0 else -1
    return 0


def attraction_ranking(
    lotteries: Sequence[Lottery],
    theta: float = DEFAULT_THETA,
    override: Sequence[str] | None = None,
) -> tuple[int, ...]:
    """Indices of ``lotteries``, most attractive first.

    Heuristic: a lottery whose certainty of a gain exceeds the other's by
    more than ``theta`` is more attractive; otherwise the larger maximum gain
    wins. More than two lotteries are ordered by pairwise wins. Ties, and
    intransitive cycles, raise unless ``override`` (a list of labels) is given.
    """
    labels = [lot.label for lot in lotteries]
    if len(lotteries) < 2:
        raise ValueError("ranking needs at least two lotteries")
    if override is not None:
        override = list(override)
        if sorted(override) != sorted(labels) or len(set(override)) != len(override):
            raise ValueError(f"ranking {override} is not a permutation of {labels}")
        return tuple(labels.index(x) for x in override)
    wins = [0] * len(lotteries)
    for i in range(len(lotteries)):
        for j in range(i + 1, len(lotteries)):
            c = _more_attractive(lotteries[i], lotteries[j], theta)
            if c == 0:
                raise AmbiguousRankingError(
                    f"{labels[i]!r} and {labels[j]!r} are equally attractive; give an explicit ranking"
                )
            wins[i if c > 0 else j] += 1
    if len(set(wins)) != len(wins):
        raise AmbiguousRankingError("attraction comparisons are cyclic; give an explicit ranking")
    return tuple(sorted(range(len(lotteries)), key=lambda k: -wins[k]))


def attraction_pattern(n: int) -> list[float]:
    """Rank coefficients: linear from +1 to -1, zero sum, mean magnitude one."""
    if n == 2:
        return [1.0, -1.0]
    c = np.linspace(1.0, -1.0, n)
    c -= c.mean()
    return list(c / np.mean(np.abs(c)))


def _rebalance(p: list[float]) -> list[float]:
    p = list(p)
    clipped: set[int] = set()
    for _ in range(len(p) + 1):
        for i, x in enumerate(p):
            if x < 0.0 or x > 1.0:
                p[i] = min(max(x, 0.0), 1.0)
                clipped.add(i)
        excess = 1.0 - math.fsum(p)
        free = [i for i in range(len(p)) if i not in clipped]
        if excess == 0.0 or not free:
            break
        weights = [p[i] for i in free]
        wsum = math.fsum(weights)
        if wsum <= 0.0:
            weights, wsum = [1.0] * len(free), float(len(free))
        for i, w in zip(free, weights):
            p[i] += excess * w / wsum
        if all(0.0 <= x <= 1.0 for x in p):
            break
    return p


def quarter_law_predict(
    fs: Sequence[float], ranking: Sequence[int], quarter: float = QUARTER
) -> tuple[list[float], list[float]]:
    """Shift utility factors by ``+-quarter`` according to attraction.

    Returns ``(p, q)``. Entries pushed outside [0, 1] are clamped and the
    lost mass spread proportionally over the entries left inside.
    """
    fs = [float(f) for f in fs]
    n = len(fs)
    if sorted(ranking) != list(range(n)):
        raise ValueError(f"ranking {list(ranking)} is not a permutation of 0..{n - 1}")
    if abs(math.fsum(fs) - 1.0) > PROB_TOL:
        raise NormalizationError(f"utility factors sum to {math.fsum(fs)!r}")
    shift = [0.0] * n
    for pos, c in zip(ranking, attraction_pattern(n)):
        shift[pos] = quarter * c
    p = _rebalance([f + s for f, s in zip(fs, shift)])
    return p, [pi - fi for pi, fi in zip(p, fs)]


def compare_to_empirical(
    report: PredictionReport, empirical: Mapping[str, float]
) -> dict[str, float]:
    """Absolute deviation ``|p_predicted - p_empirical|`` per lottery label."""
    if sorted(empirical) != sorted(report.labels):
        raise ValueError(
            f"empirical labels {sorted(empirical)} do not match lotteries {sorted(report.labels)}"
        )
    total = math.fsum(empirical.values())
    if abs(total - 1.0) > PROB_TOL:
        raise NormalizationError(f"empirical frequencies sum to {total:.12g}, not 1")
    return {r.label: abs(r.p - float(empirical[r.label])) for r in report.records}


def predict(
    lotteries: Sequence[Lottery],
    utility: UtilityFunction = UtilityFunction(),
    theta: float = DEFAULT_THETA,
    ranking: Sequence[str] | None = None,
    empirical: Mapping[str, float] | None = None,
    tol: float = DEFAULT_TOL,
) -> PredictionReport:
    """Full pipeline: expected utilities, utility factors, quarter-law probabilities."""
    labels = [lot.label for lot in lotteries]
    if len(set(labels)) != len(labels):
        raise ValueError(f"lottery labels are not unique: {labels}")
    us = [expected_utility(lot, utility) for lot in lotteries]
    fs = utility_factors(lotteries, utility)
    order = attraction_ranking(lotteries, theta, ranking)
    ps, qs = quarter_law_predict(fs, order)
    report = PredictionReport(
        records=tuple(
            LotteryPrediction(lab, u, f, q, p) for lab, u, f, q, p in zip(labels, us, fs, qs, ps)
        ),
        attraction_ranking=tuple(labels[k] for k in order),
    )
    bad = [row for row in report.consistency(tol) if not row[2]]
    if bad:
        raise InvariantViolation(f"prediction violates {bad}")
    if empirical is not None:
        devs = compare_to_empirical(report, empirical)
        report = PredictionReport(report.records, report.attraction_ranking, dict(empirical), devs)
    return report
