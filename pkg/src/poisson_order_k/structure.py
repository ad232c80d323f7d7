"""Shape analysis of weight tables: modes, local maxima, monotone stretches.

All analyses are pure functions of an immutable table.  Mode finding refuses
tables that are not past their last peak (see ``build_adaptive_table``), so a
reported mode can never be an artifact of truncation.  The audits compare the
observed shape against the proved mode bounds and against the conjectured
sharper floor; conjecture violations are reported, never raised, because a
conjecture under test is not an invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from .pmf import Params, PmfTable

__all__ = [
    "ModeSet",
    "TailCheck",
    "BlockCheck",
    "StructureReport",
    "find_modes",
    "local_maxima",
    "check_initial_increase",
    "check_monotone_tail",
    "audit_mode_bounds",
    "check_block_assumption",
    "mean_mode_gap",
    "find_triple_ties",
    "build_report",
]

DEFAULT_TIE_TOL = 1e-9


@dataclass(frozen=True)
class ModeSet:
    """Indices attaining the global maximum of the table, within tie_tol."""

    indices: tuple[int, ...]
    tie_tol: float

    @property
    def top(self) -> int:
        return self.indices[-1]

    @property
    def bottom(self) -> int:
        return self.indices[0]


class TailCheck(NamedTuple):
    """Verdict of a nonincreasing-from-k check.

    ``ok`` allows ties within tolerance; ``strict`` records whether the run
    was strictly decreasing; ``first_violation`` is the first index whose
    value exceeds its predecessor beyond tolerance (None when ok).
    """

    ok: bool
    first_violation: Optional[int]
    strict: bool


class BlockCheck(NamedTuple):
    """Nonincreasing check over the k+1 entries starting at a mode.

    ``nonincreasing`` is the full-chain condition; ``last_at_most_min`` is the
    weaker single-point condition that the final entry not exceed any of the
    k entries before it, which is all the mean-gap derivation needs.
    """

    nonincreasing: bool
    last_at_most_min: bool


@dataclass(frozen=True)
class StructureReport:
    """Shape summary and bound audits for one (k, lam) point."""

    params: Params
    mode_set: ModeSet
    local_maxima: tuple[int, ...]
    initial_increase_ok: bool
    monotone_tail_from_k: bool
    first_tail_violation: Optional[int]
    mean: float
    mean_mode_gap: float
    thm_bounds_ok: bool
    conj_floor_ok: bool
    block_assumption_ok: Optional[bool]
    triple_tie_found: bool


def _require_settled(table: PmfTable) -> None:
    k = table.params.k
    v = table.values
    tail = v[-(k + 1):]
    if len(tail) < k + 1 or any(tail[i + 1] >= tail[i] for i in range(len(tail) - 1)):
        raise ValueError(
            f"table (k={k}, lam={table.params.lam}, n_max={table.n_max}) is not "
            f"past its last peak: the final {k + 1} weights are not strictly "
            f"decreasing; build with build_adaptive_table"
        )


def _close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * max(abs(a), abs(b))


def find_modes(table: PmfTable, tie_tol: float = DEFAULT_TIE_TOL) -> ModeSet:
    """All indices within relative tie_tol of the table maximum.

    Refuses tables whose tail is still rising at the cut, since the true
    maximum could then lie beyond it.
    """
    _require_settled(table)
    peak = max(table.values)
    floor = (1.0 - tie_tol) * peak
    idx = tuple(n for n, v in enumerate(table.values) if v >= floor)
    return ModeSet(indices=idx, tie_tol=tie_tol)


def local_maxima(table: PmfTable, tie_tol: float = DEFAULT_TIE_TOL) -> list[int]:
    """Indices of local maxima, with near-flat runs collapsed to their left end.

    An index is a peak when its value is at least both neighbours'; index 0
    needs only the right condition.  Neighbouring values equal within tie_tol
    form one plateau counted once, at its left endpoint.
    """
    _require_settled(table)
    v = table.values
    last = len(v) - 1
    peaks: list[int] = []
    n = 0
    while n <= last:
        m = n
        while m < last and _close(v[m + 1], v[m], tie_tol):
            m += 1
        left_ok = n == 0 or v[n] > v[n - 1]
        right_ok = m == last or v[m] > v[m + 1]
        if left_ok and right_ok:
            peaks.append(n)
        n = m + 1
    return peaks


def check_initial_increase(table: PmfTable) -> bool:
    """True iff the weights at 1..k increase strictly and the first equals lam.

    Vacuously true at k = 1.  This always holds for k >= 2 and any positive
    rate; a False here means a broken table, not an interesting rate.
    """
    k, lam = table.params.k, table.params.lam
    if table.n_max < k:
        raise ValueError(f"table ends at {table.n_max}, need at least k={k}")
    v = table.values
    if not math.isclose(v[1], lam, rel_tol=1e-12, abs_tol=0.0):
        return False
    return all(v[n] < v[n + 1] for n in range(1, k))


def check_monotone_tail(table: PmfTable, tol: float = 1e-12) -> TailCheck:
    """Nonincreasing check for all indices from k to the end of the table.

    A violation is an index whose value exceeds its predecessor's by more
    than relative ``tol``; ties within tolerance keep ``ok`` true but clear
    the ``strict`` flag.
    """
    k = table.params.k
    if table.n_max < k:
        raise ValueError(f"table ends at {table.n_max}, need at least k={k}")
    v = table.values
    strict = True
    for n in range(k, table.n_max):
        if v[n + 1] > v[n] * (1.0 + tol):
            return TailCheck(ok=False, first_violation=n + 1, strict=False)
        if v[n + 1] >= v[n]:
            strict = False
    return TailCheck(ok=True, first_violation=None, strict=strict)


def audit_mode_bounds(params: Params, modes: ModeSet) -> tuple[bool, bool]:
    """(proved-bounds verdict, conjectured-floor verdict) for a mode set.

    Proved: every mode lies in [floor(kappa*lam) - kappa + 1 - [k=1],
    floor(kappa*lam)].  Conjectured floor: when 0 is not a mode, every mode
    is at least floor(kappa*lam) - k; vacuously true otherwise.  Equality at
    the floor does occur (it is sharp), so the check is non-strict.
    """
    fl = math.floor(params.kappa * params.lam)
    low = fl - params.kappa + 1 - (1 if params.k == 1 else 0)
    thm_ok = all(low <= m <= fl for m in modes.indices)
    if 0 in modes.indices:
        conj_ok = True
    else:
        conj_ok = all(m >= fl - params.k for m in modes.indices)
    return thm_ok, conj_ok


def check_block_assumption(table: PmfTable, mode_index: int) -> BlockCheck:
    """Nonincreasing check over the k+1 entries from a (nonzero) mode upward.

    Requires mode_index >= k (a nonzero mode is never below k) and a table
    reaching mode_index + k.
    """
    k = table.params.k
    m = mode_index
    if m < k:
        raise ValueError(
            f"block check applies to nonzero modes only: mode {m} < k={k}"
        )
    if m + k > table.n_max:
        raise ValueError(
            f"table ends at {table.n_max}, need index {m + k} for the block check"
        )
    seg = table.values[m : m + k + 1]
    nonincreasing = all(seg[i] >= seg[i + 1] for i in range(k))
    last_at_most_min = seg[-1] <= min(seg[:-1])
    return BlockCheck(nonincreasing=nonincreasing, last_at_most_min=last_at_most_min)


def mean_mode_gap(params: Params, modes: ModeSet) -> float:
    """Mean minus the highest mode, kappa*lam - max(modes)."""
    return params.kappa * params.lam - modes.top


def find_triple_ties(
    table: PmfTable, tie_tol: float = DEFAULT_TIE_TOL
) -> list[tuple[int, int]]:
    """Maximal runs of >= 3 consecutive indices pairwise equal within tie_tol.

    Returned as inclusive (start, end) pairs.  Expected empty everywhere: no
    such run has ever been observed for this family.
    """
    v = table.values
    runs: list[tuple[int, int]] = []
    start = 0
    lo = hi = v[0]
    for n in range(1, len(v)):
        x = v[n]
        new_lo, new_hi = min(lo, x), max(hi, x)
        # pairwise closeness of positive values == spread within tolerance
        if new_hi - new_lo <= tie_tol * new_hi:
            lo, hi = new_lo, new_hi
            continue
        if n - start >= 3:
            runs.append((start, n - 1))
        start = n
        lo = hi = x
    if len(v) - start >= 3:
        runs.append((start, len(v) - 1))
    return runs


def build_report(
    table: PmfTable,
    tie_tol: float = DEFAULT_TIE_TOL,
    tail_tol: float = 1e-12,
) -> StructureReport:
    """Full shape summary for one table (see StructureReport fields).

    The block assumption is evaluated at the lowest mode, the index the
    mean-gap derivation selects for multi-mode sets; it is None when the mode
    is zero or the table is too short to span the block.
    """
    params = table.params
    modes = find_modes(table, tie_tol)
    maxima = tuple(local_maxima(table, tie_tol))
    tail = check_monotone_tail(table, tail_tol)
    thm_ok, conj_ok = audit_mode_bounds(params, modes)
    block: Optional[bool] = None
    if modes.bottom >= params.k and modes.bottom + params.k <= table.n_max:
        block = check_block_assumption(table, modes.bottom).nonincreasing
    return StructureReport(
        params=params,
        mode_set=modes,
        local_maxima=maxima,
        initial_increase_ok=check_initial_increase(table),
        monotone_tail_from_k=tail.ok,
        first_tail_violation=tail.first_violation,
        mean=params.kappa * params.lam,
        mean_mode_gap=mean_mode_gap(params, modes),
        thm_bounds_ok=thm_ok,
        conj_floor_ok=conj_ok,
        block_assumption_ok=block,
        triple_tie_found=bool(find_triple_ties(table, tie_tol)),
    )
