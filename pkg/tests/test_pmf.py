"""Tests for the recurrence tables, normalization, and difference identities."""

import math
import sys
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from poisson_order_k.oracle import weight_exact
from poisson_order_k.pmf import (
    Params,
    PmfTable,
    adaptive_n_max,
    build_adaptive_table,
    build_table,
    build_table_km,
    diff_forward,
    diff_km,
    normalize,
)

FLOAT_MIN = sys.float_info.min


def rel_gap(a: float, b: float) -> float:
    m = max(a, b)
    return abs(a - b) / m if m else 0.0


class TestParams:
    def test_kappa_and_mean(self):
        p = Params(4, 0.5)
        assert p.kappa == 10
        assert p.mean == 5.0

    @pytest.mark.parametrize("k, lam", [(0, 1.0), (-2, 1.0), (2, 0.0), (2, -1.0), (2, math.inf)])
    def test_rejects_bad_parameters(self, k, lam):
        with pytest.raises(ValueError):
            Params(k, lam)


class TestBuildTable:
    def test_order_one_is_standard_poisson(self):
        t = build_table(Params(1, 1.0), 3)
        assert t.values == (1.0, 1.0, 0.5, 1 / 6)

    def test_quadratic_weight(self):
        assert build_table(Params(2, 1.0), 2).values[2] == 1.5

    def test_matches_exact_oracle(self):
        # independent evaluation of the defining tuple sum at the same rate
        t = build_table(Params(3, 0.5), 9)
        for n, got in enumerate(t.values):
            exact = float(weight_exact(3, n, Fraction(1, 2)))
            assert rel_gap(got, exact) <= 1e-12

    def test_seed_and_first_weight_are_exact(self):
        for k in (1, 2, 5):
            for lam in (0.01, 0.3, 7.25):
                t = build_table(Params(k, lam), 3)
                assert t.values[0] == 1.0
                assert abs(t.values[1] - lam) <= 1e-14 * lam

    def test_values_all_positive(self):
        t = build_table(Params(4, 2.5), 60)
        assert all(v > 0.0 for v in t.values)

    def test_initial_strict_increase_for_k_at_least_two(self):
        for k in (2, 3, 6):
            for lam in (0.02, 1.0, 9.0):
                v = build_table(Params(k, lam), k).values
                assert all(v[n] < v[n + 1] for n in range(1, k))

    def test_overflow_reports_first_offending_index(self):
        with pytest.raises(OverflowError, match=r"n="):
            build_table(Params(1, 800.0), 900)

    def test_rejects_negative_n_max(self):
        with pytest.raises(ValueError):
            build_table(Params(2, 1.0), -1)


class TestBuildTableKm:
    def test_quadratic_weight(self):
        assert build_table_km(Params(2, 1.0), 2).values[2] == 1.5

    def test_order_one_power_value(self):
        # 2**4/4! = 2/3
        t = build_table_km(Params(1, 2.0), 4)
        assert rel_gap(t.values[4], 2 / 3) <= 1e-15

    def test_agrees_with_k_term_recurrence(self):
        a = build_table(Params(4, 0.6026076), 12).values
        b = build_table_km(Params(4, 0.6026076), 12).values
        assert all(rel_gap(x, y) <= 1e-10 for x, y in zip(a, b))

    def test_agrees_deep_into_the_tail(self):
        # mixed-sign recurrence stays faithful where values shrink fast;
        # below the normal-float range only absolute agreement is possible
        a = build_table(Params(2, 0.1), 150).values
        b = build_table_km(Params(2, 0.1), 150).values
        for x, y in zip(a, b):
            if max(x, y) >= FLOAT_MIN:
                assert rel_gap(x, y) <= 1e-12
            else:
                assert abs(x - y) < FLOAT_MIN

    def test_overflow_reports_first_offending_index(self):
        with pytest.raises(OverflowError, match=r"n="):
            build_table_km(Params(1, 800.0), 900)

    @given(
        st.integers(1, 6),
        st.floats(0.05, 3.0, allow_nan=False, allow_infinity=False),
    )
    @settings(max_examples=25, deadline=None)
    def test_cross_recurrence_property(self, k, lam):
        a = build_table(Params(k, lam), 40).values
        b = build_table_km(Params(k, lam), 40).values
        assert all(rel_gap(x, y) <= 1e-10 for x, y in zip(a, b))


class TestNormalize:
    def test_standard_poisson_probabilities(self):
        t = build_table(Params(1, 1.0), 12)
        probs = normalize(t)
        for n, f in enumerate(probs):
            assert rel_gap(f, math.exp(-1) / math.factorial(n)) <= 1e-14

    def test_zero_index_probability(self):
        t = build_table(Params(2, 1.0), 5)
        assert normalize(t)[0] == math.exp(-2)

    def test_sum_matches_mass_captured(self):
        t = build_adaptive_table(Params(2, 4 / 3), 1e-10)
        assert abs(math.fsum(normalize(t)) - t.mass_captured) <= 1e-13
        assert 1 - 1e-10 <= t.mass_captured <= 1 + 1e-12


class TestAdaptiveTruncation:
    def test_standard_poisson_unit_rate(self):
        # mass alone is satisfied at 12 (deficit ~6.4e-11), but the value
        # at 12 is ~7.7e-10 > epsilon; the negligible-last-term rule moves
        # the cut to 13, where the value is ~5.9e-11
        assert adaptive_n_max(Params(1, 1.0), 1e-10) == 13

    def test_tail_is_past_the_last_peak(self):
        t = build_adaptive_table(Params(2, 4 / 3), 1e-10)
        k = t.params.k
        assert t.n_max >= 4
        tail = t.values[-(k + 1):]
        assert all(tail[i] > tail[i + 1] for i in range(k))

    def test_tight_epsilon(self):
        t = build_adaptive_table(Params(5, 0.1), 1e-12)
        assert t.mass_captured >= 1 - 1e-12

    def test_cap_is_reported(self):
        with pytest.raises(RuntimeError, match="cap of 5"):
            build_adaptive_table(Params(2, 4 / 3), 1e-10, cap=5)

    def test_rejects_bad_epsilon(self):
        with pytest.raises(ValueError):
            build_adaptive_table(Params(2, 1.0), 0.0)

    def test_huge_rate_fails_fast(self):
        with pytest.raises(OverflowError, match="underflow"):
            build_adaptive_table(Params(3, 400.0), 1e-10)


class TestDifferenceIdentities:
    def test_forward_small_case(self):
        t = build_table(Params(2, 1.0), 4)
        rep = diff_forward(t, 2)
        assert rep.abs_gap <= 1e-13

    def test_forward_standard_poisson_exact(self):
        t = build_table(Params(1, 1.0), 3)
        rep = diff_forward(t, 1)
        assert rep.lhs == rep.rhs == -0.5

    def test_forward_deeper_case(self):
        t = build_table(Params(3, 0.2), 8)
        assert diff_forward(t, 5).abs_gap <= 1e-13

    def test_km_small_case(self):
        t = build_table(Params(2, 1.0), 4)
        assert diff_km(t, 2).abs_gap <= 1e-13

    def test_km_with_zeroed_negative_indices(self):
        t = build_table(Params(2, 0.5), 5)
        assert diff_km(t, 3).abs_gap <= 1e-13

    def test_km_standard_poisson_exact(self):
        t = build_table(Params(1, 1.0), 3)
        rep = diff_km(t, 2)
        assert rep.lhs == rep.rhs == -0.5

    @pytest.mark.parametrize("k", [1, 2, 5])
    def test_grid_of_gaps(self, k):
        for lam in (0.3, 2.0):
            t = build_table(Params(k, lam), 50)
            for n in range(1, 50):
                assert diff_forward(t, n).abs_gap <= 1e-12 * max(1.0, t.values[n])
            for n in range(2, 51):
                assert diff_km(t, n).abs_gap <= 1e-12 * max(1.0, t.values[n])

    def test_index_range_is_enforced(self):
        t = build_table(Params(2, 1.0), 5)
        with pytest.raises(IndexError):
            diff_forward(t, 0)
        with pytest.raises(IndexError):
            diff_forward(t, 5)
        with pytest.raises(IndexError):
            diff_km(t, 1)
        with pytest.raises(IndexError):
            diff_km(t, 6)


class TestPmfTable:
    def test_negative_indices_read_as_zero(self):
        t = build_table(Params(2, 1.0), 3)
        assert t.at(-1) == 0.0
        assert t.at(2) == t.values[2]
        with pytest.raises(IndexError):
            t.at(4)

    def test_tables_are_immutable(self):
        t = build_table(Params(2, 1.0), 3)
        with pytest.raises(AttributeError):
            t.values = (1.0,)
        assert isinstance(t.values, tuple)
