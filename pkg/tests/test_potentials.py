"""Unit tests for the potential models and their geometric operations."""

import io
import math

import numpy as np
import pytest

from vdw_otoc.errors import (
    ArgumentError,
    BracketError,
    DomainError,
    NoInflectionError,
    NoMinimumError,
    NoRootError,
    OrderError,
    ParseError,
    TooFewPointsError,
)
from vdw_otoc.potentials import (
    HarmonicPotential,
    InvertedHarmonicPotential,
    LennardJonesPotential,
    TabulatedPotential,
    curvature_inflection,
    dissociation_limit,
    evaluate_with_derivs,
    lj_c12_for_depth,
    load_tabulated,
    outer_turning_point,
    potential_minimum,
)


def lj_table_text(c6=1.0, c12=1.0, r_lo=0.9, r_hi=3.0, n=5000, header=True):
    r = np.linspace(r_lo, r_hi, n)
    v = c12 / r**12 - c6 / r**6
    lines = ["# r[bohr]  V[hartree]"] if header else []
    lines += [f"{float(ri)!r} {float(vi)!r}" for ri, vi in zip(r, v)]
    return "\n".join(lines) + "\n"


class TestEvaluate:
    def test_lj_minimum_value(self):
        m = LennardJonesPotential(1.0, 1.0)
        v, _, _ = evaluate_with_derivs(m, 2.0 ** (1.0 / 6.0))
        assert v == pytest.approx(-0.25, abs=1e-14)

    def test_lj_stationary_at_minimum(self):
        m = LennardJonesPotential(1.0, 1.0)
        _, vp, _ = evaluate_with_derivs(m, 2.0 ** (1.0 / 6.0))
        assert abs(vp) < 1e-14

    def test_harmonic_identities(self):
        m = HarmonicPotential(center=10.0, k=1.0)
        v, vp, vpp = evaluate_with_derivs(m, 11.0)
        assert (v, vp, vpp) == (0.5, 1.0, 1.0)

    def test_lj_rejects_nonpositive_radius(self):
        m = LennardJonesPotential(1.0, 1.0)
        with pytest.raises(DomainError):
            m.value(0.0)

    def test_lj_requires_positive_coefficients(self):
        with pytest.raises(ArgumentError):
            LennardJonesPotential(-1.0, 1.0)
        with pytest.raises(ArgumentError):
            LennardJonesPotential(1.0, 0.0)


class TestDepthInversion:
    def test_basic(self):
        assert lj_c12_for_depth(1.0, 0.25) == pytest.approx(1.0)
        assert lj_c12_for_depth(2.0, 0.25) == pytest.approx(4.0)

    def test_round_trip(self):
        c12 = lj_c12_for_depth(1.0, 1.0)
        assert c12 == pytest.approx(0.25)
        m = LennardJonesPotential(1.0, c12)
        r_min = (2.0 * c12) ** (1.0 / 6.0)
        assert m.value(r_min) == pytest.approx(-1.0, rel=1e-14)

    def test_depth_recovered_to_1e12(self):
        for c6 in (0.5, 1.0, 4707.0):
            for depth in (1e-3, 0.25, 3.7):
                m = LennardJonesPotential(c6, lj_c12_for_depth(c6, depth))
                _, v_min = potential_minimum(m)
                assert abs(-v_min - depth) <= 1e-12 * depth

    def test_rejects_nonpositive(self):
        with pytest.raises(ArgumentError):
            lj_c12_for_depth(0.0, 0.25)
        with pytest.raises(ArgumentError):
            lj_c12_for_depth(1.0, -1.0)


class TestMinimum:
    def test_lj_closed_form(self):
        r_min, v_min = potential_minimum(LennardJonesPotential(1.0, 1.0))
        assert r_min == pytest.approx(2.0 ** (1.0 / 6.0), abs=1e-12)
        assert v_min == pytest.approx(-0.25, abs=1e-14)

    def test_harmonic(self):
        assert potential_minimum(HarmonicPotential(10.0, 1.0)) == (10.0, 0.0)

    def test_tabulated_lj_2000_points(self):
        model = load_tabulated(io.StringIO(lj_table_text(n=2000)))
        r_min, v_min = potential_minimum(model)
        assert abs(r_min - 1.12246) < 1e-4
        # V'(r_min) = 0 within the documented tolerance of the operation
        assert abs(model.derivative(r_min)) < 1e-10

    def test_inverted_has_no_minimum(self):
        with pytest.raises(NoMinimumError):
            potential_minimum(InvertedHarmonicPotential(0.0, 1.0))


class TestOuterTurningPoint:
    def test_harmonic_closed_form(self):
        tp = outer_turning_point(HarmonicPotential(0.0, 1.0), 2.0)
        assert tp.r_c == pytest.approx(2.0, abs=1e-10)
        assert tp.branch == "outer"

    def test_degenerate_at_minimum(self):
        tp = outer_turning_point(LennardJonesPotential(1.0, 1.0), -0.25)
        assert tp.r_c == pytest.approx(2.0 ** (1.0 / 6.0), abs=1e-12)

    def test_lj_outer_root_against_quadratic_oracle(self):
        # V = E is quadratic in u = r^-6; outer root u = (1 - sqrt(1/2)) / 2
        m = LennardJonesPotential(1.0, 1.0)
        tp = outer_turning_point(m, -0.125)
        u = (1.0 - math.sqrt(0.5)) / 2.0
        assert tp.r_c == pytest.approx(u ** (-1.0 / 6.0), rel=1e-10)
        assert abs(m.value(tp.r_c) - (-0.125)) <= 1e-12

    def test_bisection_oracle(self):
        # plain fixed-step bisection, independent of the implementation
        m = LennardJonesPotential(1.0, 1.0)
        e = -0.125
        lo, hi = 2.0 ** (1.0 / 6.0), 10.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if (m.value(mid) - e) * (m.value(lo) - e) <= 0:
                hi = mid
            else:
                lo = mid
        assert outer_turning_point(m, e).r_c == pytest.approx(lo, abs=1e-9)

    def test_monotone_in_energy(self):
        m = LennardJonesPotential(1.0, 1.0)
        energies = np.linspace(-0.24, -0.01, 12)
        radii = [outer_turning_point(m, e).r_c for e in energies]
        assert all(r1 < r2 for r1, r2 in zip(radii, radii[1:]))

    def test_inverted_harmonic_root(self):
        tp = outer_turning_point(InvertedHarmonicPotential(0.0, 4.0), -2.0)
        assert tp.r_c == pytest.approx(1.0, abs=1e-10)

    def test_no_root_errors(self):
        m = LennardJonesPotential(1.0, 1.0)
        with pytest.raises(NoRootError):
            outer_turning_point(m, -0.3)
        with pytest.raises(NoRootError):
            outer_turning_point(m, 0.0)
        with pytest.raises(NoRootError):
            outer_turning_point(HarmonicPotential(0.0, 1.0), -1.0)

    def test_bracket_error_short_table(self):
        # true asymptote far above the last table value: the root for a
        # weakly bound energy lies beyond the domain edge
        model = load_tabulated(
            io.StringIO(lj_table_text(r_lo=0.9, r_hi=1.3, n=200)), asymptote=0.0
        )
        with pytest.raises(BracketError):
            outer_turning_point(model, -1e-4)


class TestInflection:
    def test_lj_closed_form(self):
        r = curvature_inflection(LennardJonesPotential(1.0, 1.0))
        assert r == pytest.approx((26.0 / 7.0) ** (1.0 / 6.0), rel=1e-12)

    def test_defining_condition(self):
        m = LennardJonesPotential(1.0, 1.0)
        assert abs(m.second_derivative(curvature_inflection(m))) < 1e-10

    def test_harmonic_has_none(self):
        with pytest.raises(NoInflectionError):
            curvature_inflection(HarmonicPotential(0.0, 1.0))

    def test_beyond_minimum_for_parameter_grid(self):
        for c6 in (0.3, 1.0, 4707.0):
            for depth in (0.01, 0.25, 2.0):
                m = LennardJonesPotential(c6, lj_c12_for_depth(c6, depth))
                r_min, _ = potential_minimum(m)
                assert curvature_inflection(m) > r_min

    def test_tabulated_inflection(self):
        model = load_tabulated(io.StringIO(lj_table_text(n=4000)))
        assert curvature_inflection(model) == pytest.approx(
            (26.0 / 7.0) ** (1.0 / 6.0), abs=2e-3
        )


class TestLoadTabulated:
    def test_5000_point_lj_matches_analytic(self):
        model = load_tabulated(io.StringIO(lj_table_text()))
        lj = LennardJonesPotential(1.0, 1.0)
        r = np.linspace(0.9, 3.0, 5000)
        # interior midpoints; natural-spline end effects decay within
        # a few dozen knots of each edge
        mid = 0.5 * (r[:-1] + r[1:])[250:-250]
        assert np.max(np.abs(model.value(mid) - lj.value(mid))) < 1e-8

    def test_minimal_four_rows(self):
        text = "# header\n1.0 0.5\n2.0 0.1\n3.0 0.05\n4.0 0.01\n"
        model = load_tabulated(io.StringIO(text))
        assert model.domain == (1.0, 4.0)
        assert model.value(1.0) == pytest.approx(0.5)

    def test_repeated_radius_is_order_error(self):
        text = "1.0 0.5\n2.0 0.1\n2.0 0.05\n3.0 0.01\n"
        with pytest.raises(OrderError) as err:
            load_tabulated(io.StringIO(text))
        assert err.value.line_number == 3

    def test_too_few_rows(self):
        with pytest.raises(TooFewPointsError):
            load_tabulated(io.StringIO("1.0 0.5\n2.0 0.1\n3.0 0.05\n"))

    def test_malformed_line_number(self):
        text = "1.0 0.5\n2.0 oops\n3.0 0.05\n4.0 0.01\n"
        with pytest.raises(ParseError) as err:
            load_tabulated(io.StringIO(text))
        assert err.value.line_number == 2

    def test_three_column_line_rejected(self):
        text = "1.0 0.5 9\n2.0 0.1\n3.0 0.05\n4.0 0.01\n"
        with pytest.raises(ParseError):
            load_tabulated(io.StringIO(text))

    def test_byte_stream(self):
        model = load_tabulated(lj_table_text(n=100).encode("utf-8"))
        assert model.kind == "tabulated"

    def test_path_input(self, tmp_path):
        p = tmp_path / "table.dat"
        p.write_text(lj_table_text(n=100))
        model = load_tabulated(p)
        assert model.domain == (0.9, 3.0)

    def test_no_extrapolation(self):
        model = load_tabulated(io.StringIO(lj_table_text(n=100)))
        with pytest.raises(DomainError):
            model.value(3.5)
        with pytest.raises(DomainError):
            model.value(0.5)

    def test_interpolates_data_points_exactly(self):
        r = np.linspace(1.0, 2.0, 50)
        v = np.sin(r)
        model = TabulatedPotential(r, v)
        assert np.max(np.abs(model.value(r) - v)) < 1e-14


class TestDissociation:
    def test_lj_zero(self):
        assert dissociation_limit(LennardJonesPotential(1.0, 1.0)) == 0.0

    def test_harmonic_unbounded(self):
        assert dissociation_limit(HarmonicPotential(0.0, 1.0)) == math.inf
        assert dissociation_limit(InvertedHarmonicPotential(0.0, 1.0)) == -math.inf

    def test_tabulated_default_is_last_value(self):
        model = load_tabulated(io.StringIO(lj_table_text(r_lo=0.9, r_hi=30.0, n=3000)))
        expected = 30.0**-12 - 30.0**-6
        assert dissociation_limit(model) == pytest.approx(expected, rel=1e-6)
        assert dissociation_limit(model) == pytest.approx(-1.372e-9, rel=1e-3)

    def test_tabulated_override(self):
        model = load_tabulated(io.StringIO(lj_table_text(n=100)), asymptote=0.0)
        assert dissociation_limit(model) == 0.0


class TestSplineConvergenceOrder:
    def test_halving_spacing_shrinks_errors_at_expected_order(self):
        lj = LennardJonesPotential(1.0, 1.0)
        probe = np.linspace(1.05, 2.5, 301)

        def errors(n):
            model = load_tabulated(io.StringIO(lj_table_text(n=n, header=False)))
            return np.array([
                np.max(np.abs(model.value(probe) - lj.value(probe))),
                np.max(np.abs(model.derivative(probe) - lj.derivative(probe))),
                np.max(np.abs(model.second_derivative(probe) - lj.second_derivative(probe))),
            ])

        coarse = errors(400)
        fine = errors(799)  # halves the spacing over the same range
        ratios = coarse / fine
        # cubic spline: value O(h^4), V' O(h^3), V'' O(h^2)
        assert ratios[0] > 8
        assert ratios[1] > 4
        assert ratios[2] > 2
