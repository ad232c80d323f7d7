"""Recurrence evaluation of the Poisson distribution of order k.

The distribution of order k >= 1 with rate lam > 0 puts probability
exp(-k*lam) * w_n on each integer n >= 0, where the weights w_n are
polynomials in lam with w_0 = 1.  Everything here works with the weights;
``normalize`` applies the exponential factor.  Two independent recurrences
are provided (a k-term form and a four-term form) so each can certify the
other, plus the two difference identities they induce.

Weights are evaluated in 64-bit floating point.  They are unnormalized and
can overflow for very large ``k*lam`` (roughly k*lam > 300 with deep
tables); builders detect this and report the first offending index.
Exactness lives in :mod:`poisson_order_k.oracle`.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "Params",
    "PmfTable",
    "DiffIdentityReport",
    "build_table",
    "build_table_km",
    "build_adaptive_table",
    "adaptive_n_max",
    "normalize",
    "diff_forward",
    "diff_km",
]


@dataclass(frozen=True)
class Params:
    """Order ``k >= 1`` and rate ``lam > 0`` of the distribution."""

    k: int
    lam: float

    def __post_init__(self) -> None:
        if not isinstance(self.k, int) or isinstance(self.k, bool) or self.k < 1:
            raise ValueError(f"order k must be an integer >= 1, got {self.k!r}")
        lam = float(self.lam)
        if not math.isfinite(lam) or lam <= 0.0:
            raise ValueError(f"rate lam must be finite and > 0, got {self.lam!r}")
        object.__setattr__(self, "lam", lam)

    @property
    def kappa(self) -> int:
        """k*(k+1)/2; the mean of the distribution is ``kappa * lam``."""
        return self.k * (self.k + 1) // 2

    @property
    def mean(self) -> float:
        return self.kappa * self.lam


@dataclass(frozen=True)
class PmfTable:
    """Weights w_0..w_n_max at fixed (k, lam).

    ``values[n]`` is the unnormalized pmf value at n (``values[0]`` is exactly
    1); ``mass_captured`` is the normalized mass the table accounts for,
    ``exp(-k*lam) * sum(values)``.  Instances are immutable and safe to share
    across threads.
    """

    params: Params
    values: tuple[float, ...]
    mass_captured: float

    @property
    def n_max(self) -> int:
        return len(self.values) - 1

    def at(self, n: int) -> float:
        """Weight at index n; negative indices contribute exactly 0."""
        if n < 0:
            return 0.0
        if n > self.n_max:
            raise IndexError(f"index {n} beyond table n_max={self.n_max}")
        return self.values[n]


@dataclass(frozen=True)
class DiffIdentityReport:
    """One consecutive difference computed two ways.

    ``lhs`` is the difference by direct subtraction of table entries, ``rhs``
    the same difference assembled from an identity, ``abs_gap`` their absolute
    discrepancy.
    """

    n: int
    lhs: float
    rhs: float
    abs_gap: float


def _check_n_max(n_max: int) -> None:
    if not isinstance(n_max, int) or isinstance(n_max, bool) or n_max < 0:
        raise ValueError(f"n_max must be an integer >= 0, got {n_max!r}")


def _overflow(n: int, params: Params) -> OverflowError:
    return OverflowError(
        f"weight overflowed at index n={n} for k={params.k}, lam={params.lam}; "
        f"the float table is only usable for roughly k*lam <= 300"
    )


def _finish(params: Params, values: list[float]) -> PmfTable:
    scale = math.exp(-params.k * params.lam)
    mass = scale * math.fsum(values)
    return PmfTable(params=params, values=tuple(values), mass_captured=mass)


def _extend_kp(w: list[float], k: int, lam: float, n: int) -> float:
    """Append w_n to a k-term-recurrence table of length n; return it."""
    s = 0.0
    for j in range(1, min(n, k) + 1):
        s += j * w[n - j]
    x = lam * s / n
    w.append(x)
    return x


def build_table(params: Params, n_max: int) -> PmfTable:
    """Weights by the k-term recurrence w_n = (lam/n) * sum_{j=1..k} j*w_{n-j}.

    Terms with negative indices are zero and w_0 is seeded as exactly 1.
    Raises OverflowError at the first non-finite entry.
    """
    _check_n_max(n_max)
    k, lam = params.k, params.lam
    w = [1.0]
    for n in range(1, n_max + 1):
        if not math.isfinite(_extend_kp(w, k, lam, n)):
            raise _overflow(n, params)
    return _finish(params, w)


def build_table_km(params: Params, n_max: int) -> PmfTable:
    """Weights by the four-term recurrence; independent cross-check of build_table.

    w_n = (2 + (lam-2)/n) w_{n-1} - (1 - 2/n) w_{n-2}
          - ((k+1)/n) lam w_{n-k-1} + (k/n) lam w_{n-k-2}

    with negative-index terms zero.  Unlike the k-term form, this recurrence
    has mixed signs and admits non-decaying parasitic solutions, so running
    it in floating point destroys the (recessive) true solution once it
    decays below roughly 1e-16 of the table peak.  It is therefore recursed
    in exact rational arithmetic on the binary value of lam and each entry is
    rounded to float once, which keeps it an honest certification path for
    build_table at every index.
    """
    _check_n_max(n_max)
    k = params.k
    lam = Fraction(params.lam)
    # the step only reaches back k+2 indices; keep that window exact
    window: deque[Fraction] = deque([Fraction(1)], maxlen=k + 2)
    out = [1.0]
    for n in range(1, n_max + 1):
        x = (2 + (lam - 2) / n) * window[-1]
        if n >= 2:
            x -= Fraction(n - 2, n) * window[-2]
        if n - k - 1 >= 0:
            x -= Fraction(k + 1, n) * lam * window[-(k + 1)]
        if n - k - 2 >= 0:
            x += Fraction(k, n) * lam * window[-(k + 2)]
        try:
            fx = float(x)
        except OverflowError:
            raise _overflow(n, params) from None
        if not math.isfinite(fx):
            raise _overflow(n, params)
        window.append(x)
        out.append(fx)
    return _finish(params, out)


def build_adaptive_table(
    params: Params, epsilon: float, cap: int = 1_000_000
) -> PmfTable:
    """Grow a table until truncation can no longer distort shape analysis.

    Stops at the smallest n_max such that, simultaneously,

    * the captured normalized mass is at least 1 - epsilon,
    * the last normalized value is itself at most epsilon (the truncation
      point sits in the negligible zone, not merely past a small deficit), and
    * the final k+1 weights decrease strictly, so the table is past its last
      peak: once k+1 consecutive weights decrease, every later weight is
      smaller still, hence no mode can hide beyond the cut.

    Raises RuntimeError when ``cap`` indices are exhausted first.
    """
    if not (0.0 < epsilon < 1.0):
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon!r}")
    k, lam = params.k, params.lam
    scale = math.exp(-k * lam)
    if scale == 0.0:
        raise OverflowError(
            f"exp(-k*lam) underflows for k={k}, lam={lam}; "
            f"normalized-mass truncation is unusable at this scale"
        )
    w = [1.0]
    mass = scale
    dec_run = 0
    n = 0
    while not (mass >= 1.0 - epsilon and scale * w[n] <= epsilon and dec_run >= k):
        if n >= cap:
            raise RuntimeError(
                f"adaptive truncation exceeded its cap of {cap} indices "
                f"at k={k}, lam={lam}, epsilon={epsilon}"
            )
        n += 1
        x = _extend_kp(w, k, lam, n)
        if not math.isfinite(x):
            raise _overflow(n, params)
        mass += scale * x
        dec_run = dec_run + 1 if x < w[n - 1] else 0
    return PmfTable(params=params, values=tuple(w), mass_captured=mass)


def adaptive_n_max(params: Params, epsilon: float, cap: int = 1_000_000) -> int:
    """Smallest table length satisfying the build_adaptive_table stopping rule."""
    return build_adaptive_table(params, epsilon, cap=cap).n_max


def normalize(table: PmfTable) -> list[float]:
    """Probabilities exp(-k*lam) * w_n.

    Values may underflow to 0.0 for huge k*lam; that is documented behaviour,
    not an error.  Their sum equals ``table.mass_captured`` up to rounding.
    """
    scale = math.exp(-table.params.k * table.params.lam)
    return [scale * v for v in table.values]


def diff_forward(table: PmfTable, n: int) -> DiffIdentityReport:
    """w_{n+1} - w_n two ways: directly and via the k-term-recurrence identity.

    rhs = (lam/(n(n+1))) * sum_{j=0..k-1} (n-j) w_{n-j} - (k/n) lam w_{n-k},
    negative indices zero.  Valid for 1 <= n <= n_max - 1.
    """
    k, lam = table.params.k, table.params.lam
    if not 1 <= n <= table.n_max - 1:
        raise IndexError(f"need 1 <= n <= {table.n_max - 1}, got {n}")
    lhs = table.values[n + 1] - table.values[n]
    s = 0.0
    for j in range(min(n, k - 1) + 1):
        s += (n - j) * table.values[n - j]
    rhs = lam * s / (n * (n + 1)) - k / n * lam * table.at(n - k)
    return DiffIdentityReport(n=n, lhs=lhs, rhs=rhs, abs_gap=abs(lhs - rhs))


def diff_km(table: PmfTable, n: int) -> DiffIdentityReport:
    """w_n - w_{n-1} two ways: directly and via the four-term-recurrence identity.

    rhs = (lam/n) w_{n-1} + ((n-2)/n)(w_{n-1} - w_{n-2})
          - ((k+1)/n) lam w_{n-k-1} + (k/n) lam w_{n-k-2},
    negative indices zero.  Valid for 2 <= n <= n_max.
    """
    k, lam = table.params.k, table.params.lam
    if not 2 <= n <= table.n_max:
        raise IndexError(f"need 2 <= n <= {table.n_max}, got {n}")
    v = table.values
    lhs = v[n] - v[n - 1]
    rhs = (
        lam / n * v[n - 1]
        + (n - 2) / n * (v[n - 1] - v[n - 2])
        - (k + 1) / n * lam * table.at(n - k - 1)
        + k / n * lam * table.at(n - k - 2)
    )
    return DiffIdentityReport(n=n, lhs=lhs, rhs=rhs, abs_gap=abs(lhs - rhs))
