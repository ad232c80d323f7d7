"""Ground-truth weights by direct enumeration, in exact rational arithmetic.

The weight at index n for order k is the sum over all tuples
(n_1, ..., n_k) of nonnegative integers with n_1 + 2*n_2 + ... + k*n_k = n
of lam**(n_1+...+n_k) / (n_1! * ... * n_k!).  Tuples are in bijection with
partitions of n into parts of size at most k (n_i = multiplicity of part i).

This module exists to be obviously correct, not fast: it certifies the
recurrence paths in :mod:`poisson_order_k.pmf`.  Everything is exact; floats
are accepted as rate inputs but converted to the binary rational they
represent, so comparisons against float pipelines are well defined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "DEFAULT_TUPLE_BUDGET",
    "WeightPolynomial",
    "count_tuples",
    "enumerate_tuples",
    "weight_polynomial",
    "weight_exact",
    "lambda2_coefficient",
]

# Paper-scale certification (k <= 5, n <= 15) needs a few hundred tuples;
# the budget guards against accidental combinatorial blow-ups only.
DEFAULT_TUPLE_BUDGET = 10_000_000

Rational = Fraction | int | float


def _check_kn(k: int, n: int) -> None:
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise ValueError(f"order k must be an integer >= 1, got {k!r}")
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise ValueError(f"index n must be an integer >= 0, got {n!r}")


def count_tuples(k: int, n: int) -> int:
    """Number of solution tuples = partitions of n into parts of size <= k."""
    _check_kn(k, n)
    counts = [1] + [0] * n
    for part in range(1, k + 1):
        for m in range(part, n + 1):
            counts[m] += counts[m - part]
    return counts[n]


def enumerate_tuples(
    k: int, n: int, budget: int = DEFAULT_TUPLE_BUDGET
) -> list[tuple[int, ...]]:
    """Every multiplicity tuple exactly once, in a fixed deterministic order.

    Recursive descent on part sizes from k down to 1, taking the multiplicity
    of each part from high to low.  n = 0 yields the single all-zero tuple.
    Refuses (RuntimeError) when the solution count exceeds ``budget``.
    """
    total = count_tuples(k, n)
    if total > budget:
        raise RuntimeError(
            f"{total} tuples for k={k}, n={n} exceeds the budget of {budget}"
        )
    out: list[tuple[int, ...]] = []
    counts = [0] * k

    def descend(part: int, rem: int) -> None:
        if part == 1:
            counts[0] = rem
            out.append(tuple(counts))
            counts[0] = 0
            return
        for c in range(rem // part, -1, -1):
            counts[part - 1] = c
            descend(part - 1, rem - part * c)
        counts[part - 1] = 0

    descend(k, n)
    return out


@dataclass(frozen=True)
class WeightPolynomial:
    """Exact coefficients of the weight at index n as a polynomial in the rate.

    ``coeffs`` maps the power of the rate to its Fraction coefficient; powers
    with zero coefficient are absent.  Treat instances as read-only.
    """

    k: int
    n: int
    coeffs: dict[int, Fraction]

    @property
    def degree(self) -> int:
        return max(self.coeffs)

    def evaluate(self, lam: Rational) -> Fraction:
        """Exact value at a rational rate (floats taken at their binary value)."""
        x = Fraction(lam)
        return sum((c * x**d for d, c in self.coeffs.items()), Fraction(0))


def weight_polynomial(
    k: int, n: int, budget: int = DEFAULT_TUPLE_BUDGET
) -> WeightPolynomial:
    """Exact polynomial of the weight at index n: coefficient of power d is
    the sum of 1/(n_1! ... n_k!) over tuples with n_1 + ... + n_k = d."""
    coeffs: dict[int, Fraction] = {}
    for t in enumerate_tuples(k, n, budget=budget):
        d = sum(t)
        denom = 1
        for c in t:
            denom *= math.factorial(c)
        coeffs[d] = coeffs.get(d, Fraction(0)) + Fraction(1, denom)
    return WeightPolynomial(k=k, n=n, coeffs=coeffs)


def weight_exact(
    k: int, n: int, lam: Rational, budget: int = DEFAULT_TUPLE_BUDGET
) -> Fraction:
    """Exact weight value at a rational rate lam > 0."""
    x = Fraction(lam)
    if x <= 0:
        raise ValueError(f"rate must be > 0, got {lam!r}")
    return weight_polynomial(k, n, budget=budget).evaluate(x)


def lambda2_coefficient(k: int, j: int) -> Fraction:
    """Quadratic coefficient of the weight at index k+j, for 1 <= j <= k.

    For orders k >= 2 this equals (k+1-j)/2: the square-term tuples pair a
    part j+i with a part k-i, and there are floor((k+1-j)/2) of them except
    that j = k leaves the single doubled part (0, ..., 0, 2).
    """
    if not isinstance(k, int) or k < 2:
        raise ValueError(f"order k must be an integer >= 2, got {k!r}")
    if not isinstance(j, int) or not 1 <= j <= k:
        raise ValueError(f"offset j must be an integer in [1, {k}], got {j!r}")
    return weight_polynomial(k, k + j).coeffs.get(2, Fraction(0))
