"""Tests for mode finding, local maxima, and the shape audits."""

import dataclasses
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from poisson_order_k.pmf import Params, build_adaptive_table, build_table
from poisson_order_k.structure import (
    audit_mode_bounds,
    build_report,
    check_block_assumption,
    check_initial_increase,
    check_monotone_tail,
    find_modes,
    find_triple_ties,
    local_maxima,
    mean_mode_gap,
)


def table(k, lam, eps=1e-10):
    return build_adaptive_table(Params(k, lam), eps)


def scaled(t, factor):
    return dataclasses.replace(t, values=tuple(v * factor for v in t.values))


class TestFindModes:
    def test_single_mode_case(self):
        assert find_modes(table(2, 4 / 3)).indices == (2,)

    def test_near_tie_becomes_bimodal_at_loose_tolerance(self):
        t = table(2, 4.02373 / 3)
        assert find_modes(t, tie_tol=1e-4).indices == (2, 4)
        assert find_modes(t, tie_tol=1e-9).indices == (4,)

    def test_tiny_rate_concentrates_at_zero(self):
        assert find_modes(table(3, 0.01)).indices == (0,)

    def test_refuses_truncated_table(self):
        # n_max=2 cuts the table while it is still rising
        t = build_table(Params(2, 4 / 3), 2)
        with pytest.raises(ValueError, match="past its last peak"):
            find_modes(t)

    @given(st.floats(1e-8, 1e8))
    @settings(max_examples=50, deadline=None)
    def test_invariant_under_positive_scaling(self, factor):
        t = table(2, 4 / 3)
        assert find_modes(scaled(t, factor)).indices == find_modes(t).indices


class TestLocalMaxima:
    def test_near_tied_double_peak(self):
        assert local_maxima(table(2, 4.02373 / 3), tie_tol=1e-4) == [2, 4]

    def test_decaying_standard_poisson(self):
        assert local_maxima(table(1, 0.5)) == [0]

    def test_small_rate_has_peaks_at_zero_and_k(self):
        assert local_maxima(table(4, 0.3)) == [0, 4]

    def test_plateau_collapses_to_left_endpoint(self):
        t = table(1, 3.0)  # consecutive equal weights at 2 and 3
        assert local_maxima(t) == [2]


class TestInitialIncrease:
    @pytest.mark.parametrize("k, lam", [(5, 0.05), (2, 10.0), (3, 1.0)])
    def test_holds_for_any_rate(self, k, lam):
        assert check_initial_increase(table(k, lam))

    def test_vacuous_at_order_one(self):
        assert check_initial_increase(table(1, 0.7))


class TestMonotoneTail:
    def test_rise_after_k_is_located(self):
        res = check_monotone_tail(table(2, 4 / 3))
        assert not res.ok
        assert res.first_violation == 4

    def test_small_rate_tail_decreases(self):
        res = check_monotone_tail(table(4, 0.05))
        assert res.ok and res.first_violation is None and res.strict

    def test_mean_k_rule_small_orders(self):
        for k in range(2, 31):
            assert check_monotone_tail(table(k, 2 / (k + 1))).ok


class TestModeBoundAudits:
    def test_equality_case_of_the_floor(self):
        p = Params(2, 4 / 3)
        modes = find_modes(table(2, 4 / 3))
        thm_ok, conj_ok = audit_mode_bounds(p, modes)
        assert thm_ok and conj_ok
        assert math.floor(p.kappa * p.lam) - p.k == 2 == modes.indices[0]

    def test_bimodal_case_floor_and_strict(self):
        lam = 4.02373 / 3
        p = Params(2, lam)
        modes = find_modes(table(2, lam), tie_tol=1e-4)
        thm_ok, conj_ok = audit_mode_bounds(p, modes)
        assert thm_ok and conj_ok
        floor_bound = math.floor(p.kappa * p.lam) - p.k
        assert modes.indices[0] == floor_bound  # attains equality
        assert modes.indices[1] > floor_bound

    def test_standard_poisson_window(self):
        p = Params(1, 2.5)
        modes = find_modes(table(1, 2.5))
        assert modes.indices == (2,)
        assert audit_mode_bounds(p, modes) == (True, True)

    def test_zero_mode_makes_floor_vacuous(self):
        p = Params(3, 0.01)
        assert audit_mode_bounds(p, find_modes(table(3, 0.01))) == (True, True)


class TestBlockAssumption:
    def test_fails_in_the_equality_example(self):
        t = table(2, 4 / 3)
        res = check_block_assumption(t, 2)
        assert not res.nonincreasing
        assert not res.last_at_most_min  # p4 exceeds both p2's successors

    def test_consecutive_double_mode_is_nonincreasing(self):
        t = table(1, 3.0)
        res = check_block_assumption(t, 2)
        assert res.nonincreasing and res.last_at_most_min

    def test_requires_nonzero_mode_and_room(self):
        t = table(2, 4 / 3)
        with pytest.raises(ValueError, match="nonzero"):
            check_block_assumption(t, 1)
        with pytest.raises(ValueError, match="ends at"):
            check_block_assumption(t, t.n_max)

    def test_block_implies_mean_at_most_top_plus_k(self):
        # wherever the chain holds at the top mode, the mean-gap bound follows
        for k in (2, 3, 5):
            for lam in (1.0, 2.0, 4.0):
                t = table(k, lam)
                modes = find_modes(t)
                if modes.indices[0] < k:
                    continue
                if check_block_assumption(t, modes.indices[-1]).nonincreasing:
                    p = t.params
                    assert p.kappa * p.lam <= modes.indices[-1] + k + 1e-9


class TestMeanModeGap:
    def test_equality_case_value(self):
        p = Params(2, 4 / 3)
        assert mean_mode_gap(p, find_modes(table(2, 4 / 3))) == 2.0

    def test_standard_poisson_case(self):
        p = Params(1, 3.5)
        assert mean_mode_gap(p, find_modes(table(1, 3.5))) == pytest.approx(0.5)

    def test_bimodal_uses_the_top_mode(self):
        lam = 4.02373 / 3
        gap = mean_mode_gap(Params(2, lam), find_modes(table(2, lam), tie_tol=1e-4))
        assert gap == pytest.approx(3 * lam - 4, abs=1e-12)
        assert gap < 2


class TestTripleTies:
    def test_none_in_the_reference_cases(self):
        assert find_triple_ties(table(2, 4 / 3)) == []
        assert find_triple_ties(table(4, 0.6026076)) == []
        assert find_triple_ties(table(1, 3.0)) == []  # a pair, not a triple

    def test_synthetic_run_is_detected(self):
        t = table(1, 0.5)
        forged = dataclasses.replace(
            t, values=(1.0, 0.5, 0.5 * (1 + 1e-12), 0.5, 0.2, 0.1)
        )
        assert find_triple_ties(forged, tie_tol=1e-9) == [(1, 3)]


class TestBuildReport:
    def test_equality_case_report(self):
        rep = build_report(table(2, 4 / 3))
        assert rep.mode_set.indices == (2,)
        assert rep.local_maxima == (2, 4)
        assert rep.initial_increase_ok
        assert not rep.monotone_tail_from_k
        assert rep.first_tail_violation == 4
        assert rep.mean == 4.0
        assert rep.mean_mode_gap == 2.0
        assert rep.thm_bounds_ok and rep.conj_floor_ok
        assert rep.block_assumption_ok is False
        assert not rep.triple_tie_found

    def test_zero_mode_report_leaves_block_undefined(self):
        rep = build_report(table(3, 0.05))
        assert rep.mode_set.indices == (0,)
        assert rep.block_assumption_ok is None

    def test_shoulder_case_is_clean(self):
        rep = build_report(table(4, 0.6026076))
        assert rep.mode_set.indices == (4,)
        assert rep.monotone_tail_from_k
        assert not rep.triple_tie_found
