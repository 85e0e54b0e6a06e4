"""Node-count bounds in exact integer arithmetic."""

from fractions import Fraction
from math import ceil

import pytest
from hypothesis import given
from hypothesis import strategies as st

from curvequad.bounds import (
    format_table,
    improvement_over_rs,
    lower_bound,
    plane_bound,
    rational_even_bound,
    rational_odd_bound,
    rs_baseline,
    upper_bounds,
    xd_curve_bound,
)
from curvequad.errors import HypothesisViolated


def by_setting(rows):
    return {r.setting: r for r in rows}


class TestTable:
    # reference rows for the curves y = x^d
    @pytest.mark.parametrize(
        "s, d, expected", [(3, 3, (4, 5, 5)), (9, 9, (40, 41, 28))]
    )
    def test_xd_rows(self, s, d, expected):
        rows = by_setting(upper_bounds("xd", s, d=d))
        got = (rows["zalar-baseline"].value, rows["rational-odd"].value, rows["xd-curve"].value)
        assert got == expected

    def test_xd_needs_s_at_least_d(self):
        with pytest.raises(HypothesisViolated):
            xd_curve_bound(5, 4)
        assert not by_setting(upper_bounds("xd", 4, d=5))["xd-curve"].applicable

    def test_format_table_lists_every_row(self):
        rows = upper_bounds("plane", 5, d=3, t=1)
        text = format_table(rows)
        assert len(text.splitlines()) == len(rows) + 1


class TestOracle:
    @given(st.integers(1, 12), st.integers(1, 30))
    def test_lower_bound_ceiling(self, d, strength):
        assert lower_bound(d, strength).value == ceil(Fraction(d * strength + 1, 2))

    @given(st.integers(2, 12), st.integers(2, 20))
    def test_xd_formula(self, d, extra):
        s = d + extra - 2
        oracle = ceil(Fraction(d * s - 1, 2) - Fraction(d * (d - 3), 4)) + 1
        assert xd_curve_bound(d, s) == oracle

    @given(st.integers(1, 12), st.integers(1, 15), st.integers(0, 4))
    def test_even_formula(self, D, s, p):
        assert rational_even_bound(D, 2 * s, p) == D * s + p + 1


class TestConsistency:
    @pytest.mark.parametrize("d", range(1, 11))
    def test_lower_never_exceeds_upper(self, d):
        for s in range(d, 13):
            assert lower_bound(d, 2 * s - 1).value <= rational_odd_bound(d, 2 * s - 1, 0)

    @pytest.mark.parametrize("d", range(1, 11))
    @pytest.mark.parametrize("t", [0, 1, 2])
    def test_improvement_independent_of_strength(self, d, t):
        gap = improvement_over_rs(d, t)
        for s in range(d, 13):
            diff = rs_baseline(d, 2 * s - 1) - plane_bound(d, 2 * s - 1, t)
            assert diff == gap

    @pytest.mark.parametrize("s", range(1, 21))
    def test_line_collapse(self, s):
        assert rational_odd_bound(1, 2 * s - 1, 0) == s

    def test_advisory_below_d(self):
        rep = lower_bound(5, 3)
        assert rep.advisory and rep.value == 8

    def test_plane_compact_not_applicable_with_places(self):
        rows = by_setting(upper_bounds("plane", 5, d=2, t=2))
        assert not rows["plane-compact"].applicable
        assert rows["plane"].value == 2 * 3 - 1 + 1 + 4

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            upper_bounds("surface", 3, d=2)
