"""Exact evaluators for strongly Pigou-Dalton inequality criteria.

Every score is a Python value with a total order where *lower is better*:
ints and Fractions for the real-valued criteria, tuples for the
lexicographic ones, and :class:`EntropyScore` for the entropy order.

LexiMin and LexiMax are compared directly as sorted vectors rather than
through the scalarisations ``sum m**(m - h_i)`` and ``sum m**h_i``; the
two agree whenever the base exceeds the number of agents, and the
comparator form needs no huge integers.
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction
from functools import reduce, total_ordering
from typing import Sequence

import mpmath


class Criterion(enum.Enum):
    NSW = "nsw"
    GINI = "gini"
    ENVYSUM = "envysum"
    CONGESTION = "congestion"
    ENTROPY = "entropy"
    LEXIMAX = "leximax"
    LEXIMIN = "leximin"
    POTENTIAL_SQ = "potential-sq"
    POTENTIAL_BINOM = "potential-binom"

    @classmethod
    def parse(cls, name: str) -> Criterion:
        try:
            return cls(name.strip().lower())
        except ValueError:
            known = ", ".join(c.value for c in cls)
            raise ValueError(f"unknown criterion {name!r} (known: {known})") from None


# Potential-binom coincides with Congestion, so it is not counted separately.
BUILTIN_CRITERIA = (
    Criterion.NSW,
    Criterion.GINI,
    Criterion.ENVYSUM,
    Criterion.CONGESTION,
    Criterion.ENTROPY,
    Criterion.LEXIMAX,
    Criterion.LEXIMIN,
    Criterion.POTENTIAL_SQ,
)


class Ordering(enum.IntEnum):
    P_BETTER = -1
    EQUAL = 0
    Q_BETTER = 1


def _exact(p) -> tuple:
    out = []
    for x in p:
        x = Fraction(x)
        if x < 0:
            raise ValueError(f"negative income {x}")
        out.append(int(x) if x.denominator == 1 else x)
    return tuple(out)


def _xlogx_surrogate(values: Sequence[int]) -> int:
    # prod h**h with 0**0 == 1
    return reduce(lambda acc, h: acc * h**h if h else acc, values, 1)


@total_ordering
class EntropyScore:
    """Order of ``sum h_i ln h_i`` evaluated without floating point when possible.

    Integral profiles compare through the big integer ``prod h_i**h_i``.
    Rational profiles are rescaled to a common denominator D; with equal
    sums the ``ln D`` terms cancel and the comparison is again an exact
    integer one.  Rational profiles with different sums fall back to
    100-digit mpmath evaluation.
    """

    __slots__ = ("incomes",)

    def __init__(self, incomes: Sequence):
        self.incomes = tuple(sorted(incomes))

    def _cmp(self, other: EntropyScore) -> int:
        a, b = self.incomes, other.incomes
        den = math.lcm(*(Fraction(x).denominator for x in a + b)) if a or b else 1
        ia = [int(x * den) for x in a]
        ib = [int(x * den) for x in b]
        if den == 1 or sum(ia) == sum(ib):
            sa, sb = _xlogx_surrogate(ia), _xlogx_surrogate(ib)
            return (sa > sb) - (sa < sb)
        with mpmath.workdps(100):
            fa = mpmath.fsum(mpmath.mpf(x.numerator) / x.denominator * mpmath.log(mpmath.mpf(x.numerator) / x.denominator) for x in map(Fraction, a) if x)
            fb = mpmath.fsum(mpmath.mpf(x.numerator) / x.denominator * mpmath.log(mpmath.mpf(x.numerator) / x.denominator) for x in map(Fraction, b) if x)
            return (fa > fb) - (fa < fb)

    def __eq__(self, other):
        if not isinstance(other, EntropyScore):
            return NotImplemented
        return self._cmp(other) == 0

    def __lt__(self, other):
        if not isinstance(other, EntropyScore):
            return NotImplemented
        return self._cmp(other) < 0

    def __hash__(self):
        return hash(self.incomes)

    def __repr__(self):
        return f"EntropyScore({list(self.incomes)})"


def gini_index(p) -> int | Fraction:
    """Sum of rank-weighted ascending incomes, ranks starting at 1."""
    return sum((k * h for k, h in enumerate(sorted(p), start=1)), 0)


def envy_sum(p) -> int | Fraction:
    """Sum over ordered pairs of the positive income gaps."""
    s = sorted(p)
    n = len(s)
    # each sorted position k is subtracted (n-1-k) times and added k times
    return sum(((2 * k - (n - 1)) * h for k, h in enumerate(s)), 0)


def congestion(p) -> int | Fraction:
    """Sum of h(h-1)/2; integral profiles give the sum of binomial(h, 2)."""
    total = sum((h * (h - 1) for h in p), 0)
    return total // 2 if isinstance(total, int) else Fraction(total) / 2


def score(c: Criterion, p: Sequence):
    """Score of profile *p* under criterion *c* (lower is better)."""
    c = Criterion.parse(c) if isinstance(c, str) else c
    p = _exact(p)
    if c is Criterion.GINI:
        return gini_index(p)
    if c is Criterion.ENVYSUM:
        return envy_sum(p)
    if c in (Criterion.CONGESTION, Criterion.POTENTIAL_BINOM):
        return congestion(p)
    if c is Criterion.POTENTIAL_SQ:
        return sum((h * h for h in p), 0)
    if c is Criterion.NSW:
        positive = [h for h in p if h > 0]
        return (len(p) - len(positive), -reduce(lambda a, b: a * b, positive, 1))
    if c is Criterion.LEXIMIN:
        return tuple(-h for h in sorted(p))
    if c is Criterion.LEXIMAX:
        return tuple(sorted(p, reverse=True))
    if c is Criterion.ENTROPY:
        return EntropyScore(p)
    raise ValueError(f"unsupported criterion {c}")


def compare(c: Criterion, p: Sequence, q: Sequence) -> Ordering:
    if len(p) != len(q):
        raise ValueError(f"profiles differ in length: {len(p)} vs {len(q)}")
    sp, sq = score(c, p), score(c, q)
    if sp < sq:
        return Ordering.P_BETTER
    if sq < sp:
        return Ordering.Q_BETTER
    return Ordering.EQUAL


def more_balanced(p: Sequence, q: Sequence) -> bool:
    """True iff q differs from p only at two agents j, k with both q_j, q_k strictly inside (p_j, p_k)."""
    if len(p) != len(q):
        return False
    diff = [i for i, (a, b) in enumerate(zip(p, q)) if a != b]
    if len(diff) != 2:
        return False
    j, k = diff
    lo, hi = sorted((p[j], p[k]))
    return lo < hi and lo < q[j] < hi and lo < q[k] < hi


def format_score(s) -> str:
    """Plain-text rendering used by the CLI."""
    if isinstance(s, Fraction):
        return str(s.numerator) if s.denominator == 1 else f"{s.numerator}/{s.denominator}"
    if isinstance(s, EntropyScore):
        if all(Fraction(x).denominator == 1 for x in s.incomes):
            return str(_xlogx_surrogate([int(x) for x in s.incomes]))
        return "prod-xlogx(" + ",".join(str(x) for x in s.incomes) + ")"
    if isinstance(s, tuple):
        return "(" + ",".join(format_score(x) for x in s) + ")"
    return str(s)
