"""Rate thresholds defined by level crossings of the weights.

For fixed k >= 1 and n >= 1 the map lam -> w(n; lam) is a polynomial with
all-positive coefficients and no constant term, hence strictly increasing on
lam > 0 and unbounded: each level c > 0 is crossed at exactly one positive
rate.  Crossings are solved by regula falsi with Illinois safeguarding inside
an a-priori bracket given by closed-form upper bounds.

From the n = k crossings at levels 1 and 2 this module derives the constants
that delimit the distribution's shape regimes: the proved monotone-tail
bound, the closed-form rise threshold, and the shoulder rate at which the two
weights just past k are equal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .pmf import Params, _extend_kp

__all__ = [
    "RootResult",
    "BoundsRecord",
    "weight_value",
    "root_upper_bound",
    "solve_weight_equals",
    "closed_form_root_n2",
    "rise_threshold",
    "monotone_tail_bound",
    "shoulder_lambda",
    "bounds_record",
]

SQRT5_MINUS_1 = math.sqrt(5.0) - 1.0

_MAX_ITER = 200


@dataclass(frozen=True)
class RootResult:
    """A solved crossing w(n; root) = c with its bracket and effort."""

    k: int
    n: int
    c: float
    root: float
    bracket_low: float
    bracket_high: float
    tol: float
    iterations: int


@dataclass(frozen=True)
class BoundsRecord:
    """Threshold constants for one order k, each with its closed-form bound.

    root1 / root2 are the rates where the weight at index k reaches 1 / 2;
    rise_threshold is the rate above which the weight at k+1 is at least the
    weight at k; tail_bound = min(root2, k!/(2k)^k) is the proved rate below
    which the weights are strictly decreasing for all n >= k; shoulder is the
    rate at which the weights at k+1 and k+2 are equal.  Fields that are only
    defined for k >= 2 are None at k = 1.
    """

    k: int
    root1: float
    root1_upper: float
    root2: float
    root2_upper: float
    rise_threshold: float | None
    tail_bound: float | None
    shoulder: float | None


def _check_k(k: int, minimum: int = 1) -> None:
    if not isinstance(k, int) or isinstance(k, bool) or k < minimum:
        raise ValueError(f"order k must be an integer >= {minimum}, got {k!r}")


def weight_value(k: int, n: int, lam: float) -> float:
    """Weight at a single index, via the k-term recurrence."""
    Params(k, lam)  # validate
    w = [1.0]
    for m in range(1, n + 1):
        _extend_kp(w, k, lam, m)
    return w[n]


def root_upper_bound(k: int, n: int, c: float) -> float:
    """Tightest applicable closed-form upper bound for the crossing rate.

    Candidates: the degree-n term alone gives (c*n!)^(1/n); when k divides n
    the lowest term gives (c*(n/k)!)^(k/n); when n = k the quadratic
    truncation gives 2c/(sqrt(2c(k-1)+1)+1).  All are evaluated in the log
    domain where factorials could overflow.
    """
    _check_k(k)
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"index n must be an integer >= 1, got {n!r}")
    if not (c > 0.0 and math.isfinite(c)):
        raise ValueError(f"level c must be finite and > 0, got {c!r}")
    logc = math.log(c)
    bounds = [math.exp((logc + math.lgamma(n + 1)) / n)]
    if n % k == 0:
        bounds.append(math.exp(k * (logc + math.lgamma(n // k + 1)) / n))
    if n == k:
        bounds.append(2.0 * c / (math.sqrt(2.0 * c * (k - 1) + 1.0) + 1.0))
    return min(bounds)


def _illinois(f, lo, flo, hi, fhi, is_done) -> tuple[float, int]:
    """Regula falsi with the Illinois cut, on a bracket with flo < 0 <= fhi.

    Returns (root, evaluations).  ``is_done(x, fx, lo, hi)`` decides
    convergence.  The secant proposal is clipped to the open bracket, falling
    back to the midpoint, so progress is always made.
    """
    side = 0
    for it in range(1, _MAX_ITER + 1):
        denom = fhi - flo
        x = (lo * fhi - hi * flo) / denom if denom != 0.0 else 0.5 * (lo + hi)
        if not lo < x < hi:
            x = 0.5 * (lo + hi)
        fx = f(x)
        if is_done(x, fx, lo, hi):
            return x, it
        if fx < 0.0:
            lo, flo = x, fx
            if side == -1:
                fhi *= 0.5
            side = -1
        else:
            hi, fhi = x, fx
            if side == 1:
                flo *= 0.5
            side = 1
    raise RuntimeError(
        f"root solve did not converge within {_MAX_ITER} iterations "
        f"(bracket [{lo}, {hi}]); this indicates an internal inconsistency"
    )


def solve_weight_equals(k: int, n: int, c: float, tol: float = 1e-13) -> RootResult:
    """The unique positive rate at which the weight at index n equals c.

    The initial bracket is (0, root_upper_bound(k, n, c)]; the upper end is
    nudged up by tiny factors in the (equality) cases where the bound is the
    root itself and float rounding puts the evaluated weight just below c.
    """
    _check_k(k)
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"index n must be an integer >= 1, got {n!r}")
    if not (c > 0.0 and math.isfinite(c)):
        raise ValueError(f"level c must be finite and > 0, got {c!r}")
    if not (tol > 0.0):
        raise ValueError(f"tol must be > 0, got {tol!r}")

    def f(lam: float) -> float:
        return weight_value(k, n, lam) - c

    hi = root_upper_bound(k, n, c)
    fhi = f(hi)
    grown = 0
    while fhi < 0.0:
        hi *= 1.0 + 1e-9
        fhi = f(hi)
        grown += 1
        if grown > 64:
            raise RuntimeError(
                f"could not re-establish the bracket above {hi} for "
                f"k={k}, n={n}, c={c}"
            )
    target = tol * max(1.0, c)

    def is_done(x: float, fx: float, lo: float, hi_: float) -> bool:
        return abs(fx) <= target or hi_ - lo <= 4.0 * math.ulp(max(1.0, x))

    root, iterations = _illinois(f, 0.0, -c, hi, fhi, is_done)
    return RootResult(
        k=k,
        n=n,
        c=c,
        root=root,
        bracket_low=0.0,
        bracket_high=hi,
        tol=tol,
        iterations=iterations + grown + 1,
    )


def closed_form_root_n2(c: float) -> float:
    """Closed form sqrt(2c+1) - 1 for the n = 2 crossing, any order k >= 2.

    The weight at n = 2 is lam**2/2 + lam for every such k, so the crossing
    solves a plain quadratic.
    """
    if not (c >= 0.0 and math.isfinite(c)):
        raise ValueError(f"level c must be finite and >= 0, got {c!r}")
    return math.sqrt(2.0 * c + 1.0) - 1.0


def rise_threshold(k: int) -> float:
    """Rate above which the weight at k+1 is at least the weight at k.

    Closed form 4/(sqrt(5 - 4/kappa) + 1) with kappa = k(k+1)/2; strictly
    decreasing in k, from (sqrt(33)-3)/2 at k = 2 down to the limit
    sqrt(5) - 1.  A sufficient, not necessary, threshold.
    """
    _check_k(k, minimum=2)
    kappa = k * (k + 1) // 2
    return 4.0 / (math.sqrt(5.0 - 4.0 / kappa) + 1.0)


def _log_factorial_over_power(k: int) -> float:
    # k!/(2k)^k in the log domain; underflows to 0.0 harmlessly for huge k
    return math.exp(math.lgamma(k + 1) - k * math.log(2.0 * k))


def monotone_tail_bound(k: int, tol: float = 1e-13) -> float:
    """Proved sufficient rate bound for a monotone tail: min(root2, k!/(2k)^k).

    For rates at or below it, the weights decrease strictly for every
    n >= k.  The factorial term is the smaller one for all k >= 2.
    """
    _check_k(k, minimum=2)
    root2 = solve_weight_equals(k, k, 2.0, tol=tol).root
    return min(root2, _log_factorial_over_power(k))


def shoulder_lambda(
    k: int, tol: float = 1e-13, scan_high: float = 2.0
) -> float:
    """Rate at which the weights at k+1 and k+2 are equal (the shoulder).

    The gap g(lam) = w(k+2) - w(k+1) is negative for small rates (the
    quadratic coefficients just past k drop by 1/2 per index) and positive by
    lam = 2, so a sign change is bracketed by a geometric scan of (0, 2] and
    then solved to ``|g| <= tol * w(k+1)``.  Raises RuntimeError, reporting
    the scanned range, if no sign change is found.
    """
    _check_k(k, minimum=2)
    if not (tol > 0.0):
        raise ValueError(f"tol must be > 0, got {tol!r}")

    def pair(lam: float) -> tuple[float, float]:
        w = [1.0]
        for m in range(1, k + 3):
            _extend_kp(w, k, lam, m)
        return w[k + 1], w[k + 2]

    def g(lam: float) -> float:
        a, b = pair(lam)
        return b - a

    lo = 1e-3
    flo = g(lo)
    if flo >= 0.0:
        raise RuntimeError(
            f"no negative start for the shoulder gap at lam={lo}, k={k}"
        )
    hi = lo
    fhi = flo
    while fhi < 0.0:
        if hi >= scan_high:
            raise RuntimeError(
                f"no shoulder sign change for k={k} in the scanned range "
                f"({lo}, {scan_high}]"
            )
        lo, flo = hi, fhi
        hi = min(hi * 1.5, scan_high)
        fhi = g(hi)

    def is_done(x: float, fx: float, lo_: float, hi_: float) -> bool:
        ref = pair(x)[0]
        return abs(fx) <= tol * ref or hi_ - lo_ <= 4.0 * math.ulp(x)

    root, _ = _illinois(g, lo, flo, hi, fhi, is_done)
    return root


def bounds_record(
    k: int, tol: float = 1e-13, with_shoulder: bool = True
) -> BoundsRecord:
    """All threshold constants for one order, with their closed-form bounds."""
    _check_k(k)
    root1 = solve_weight_equals(k, k, 1.0, tol=tol).root
    root2 = solve_weight_equals(k, k, 2.0, tol=tol).root
    if k >= 2:
        rise = rise_threshold(k)
        tail = min(root2, _log_factorial_over_power(k))
        shoulder = shoulder_lambda(k, tol=tol) if with_shoulder else None
    else:
        rise = tail = shoulder = None
    return BoundsRecord(
        k=k,
        root1=root1,
        root1_upper=2.0 / (math.sqrt(2.0 * k - 1.0) + 1.0),
        root2=root2,
        root2_upper=4.0 / (math.sqrt(4.0 * k - 3.0) + 1.0),
        rise_threshold=rise,
        tail_bound=tail,
        shoulder=shoulder,
    )
