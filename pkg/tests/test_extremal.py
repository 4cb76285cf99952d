import numpy as np
import pytest

from companion_quad import (
    IntegrandFunction,
    Interval,
    NormKind,
    bound_for,
    companion_gap,
    companion_value,
    lipschitz_bound,
    make_fstar,
    make_midpoint_kink,
    make_quarter_kink,
    mean_value,
    segment_norms,
    verify_identity,
)
from companion_quad.errors import DerivativeUnavailableError, InvalidParameterError

UNIT = Interval(0.0, 1.0)
DOMAINS = (UNIT, Interval(-2.0, 5.0), Interval(3.0, 3.5))


class TestFstar:
    def test_values(self):
        w = make_fstar(0.25, 1.0, UNIT)
        f = w.function
        assert f(0.0) == pytest.approx(0.25)
        assert f(0.25) == 0.0
        assert f(0.5) == pytest.approx(0.25)
        assert f(0.8) == pytest.approx(0.05)
        assert f(0.2) == pytest.approx(0.05)

    @pytest.mark.parametrize("domain", DOMAINS, ids=str)
    def test_end_and_middle(self, domain):
        half = domain.length / 2
        assert make_fstar(domain.a, 1.0, domain).function(domain.midpoint) == pytest.approx(half)
        assert make_fstar(domain.midpoint, 1.0, domain).function(domain.a) == pytest.approx(half)

    def test_fractional_order_has_no_derivative(self):
        w = make_fstar(0.2, 0.5, UNIT)
        assert not w.function.certified
        assert w.slope is None
        with pytest.raises(DerivativeUnavailableError):
            w.norm(NormKind.linf(), (0.0, 1.0))

    @pytest.mark.parametrize("k", [0.0, -0.5, 1.5])
    def test_invalid_order(self, k):
        with pytest.raises(InvalidParameterError):
            make_fstar(0.2, k, UNIT)

    @pytest.mark.parametrize("domain", DOMAINS, ids=str)
    @pytest.mark.parametrize("k", [0.25, 0.5, 0.8, 1.0])
    def test_equality_with_lipschitz_bound(self, domain, k):
        for s in (0.0, 0.17, 0.25, 0.4, 0.5):
            x = domain.a + s * domain.length
            w = make_fstar(x, k, domain)
            gap = abs(companion_gap(w.function, x, domain))
            assert gap == pytest.approx(w.gap, rel=1e-9)
            assert gap == pytest.approx(lipschitz_bound(x, domain, k, 1.0), rel=1e-9)


class TestMidpointKink:
    def test_trapezoid_gap(self):
        w = make_midpoint_kink(1.0, UNIT)
        assert companion_value(w.function, 0.0, UNIT) - mean_value(w.function, UNIT) == (
            pytest.approx(0.25)
        )

    @pytest.mark.parametrize("p", [1.5, 2.0, 10.0, 300.0])
    def test_unit_norm(self, p):
        w = make_midpoint_kink(1.0, UNIT)
        assert w.norm(NormKind.lp(p), (0.0, 1.0)) == 1.0
        assert segment_norms(w.function, 0.0, UNIT, NormKind.lp(p)).whole == pytest.approx(1.0)

    def test_midpoint_functional(self):
        w = make_midpoint_kink(2.0, UNIT)
        assert w.function(0.5) == 0.0
        assert mean_value(w.function, UNIT) == pytest.approx(0.5)
        assert w.mean == 0.5

    def test_invalid_slope(self):
        with pytest.raises(InvalidParameterError):
            make_midpoint_kink(0.0, UNIT)


class TestQuarterKink:
    def test_unit(self):
        w = make_quarter_kink(UNIT)
        assert companion_value(w.function, 0.25, UNIT) == 0.0
        assert mean_value(w.function, UNIT) == pytest.approx(0.125, rel=1e-15)
        r = bound_for(segment_norms(w.function, 0.25, UNIT, NormKind.linf()), 0.25, UNIT)
        assert r.max_branch == pytest.approx(0.125, rel=1e-15)

    def test_scaled_domain(self):
        assert make_quarter_kink(Interval(0.0, 2.0)).mean == 0.25

    @pytest.mark.parametrize("domain", DOMAINS, ids=str)
    def test_lp_ratio_decreases_to_one(self, domain):
        w = make_quarter_kink(domain)
        gap = abs(companion_gap(w.function, w.x, domain))
        ratios = []
        for p in (2.0, 10.0, 100.0, 1000.0):
            kind = NormKind.lp(p)
            r = bound_for(segment_norms(w.function, w.x, domain, kind), w.x, domain)
            ratios.append(r.combined / gap)
            assert ratios[-1] <= 2 * (kind.q + 1) ** (-1 / kind.q) + 1e-9
        assert all(x > y for x, y in zip(ratios, ratios[1:]))
        assert ratios[-1] <= 1.01


@pytest.mark.parametrize("domain", DOMAINS, ids=str)
def test_closed_forms_match_numerics(domain):
    witnesses = [
        make_quarter_kink(domain),
        make_midpoint_kink(3.0, domain),
        make_fstar(domain.a + 0.1 * domain.length, 1.0, domain),
        make_fstar(domain.quarter_point, 0.5, domain),
    ]
    for w in witnesses:
        assert companion_value(w.function, w.x, domain) == pytest.approx(w.companion, abs=1e-12)
        assert mean_value(w.function, domain) == pytest.approx(w.mean, rel=1e-9)
        for x in np.linspace(domain.a, domain.midpoint, 5):
            assert w.companion_at(x) == pytest.approx(companion_value(w.function, x, domain))


class TestIdentity:
    def test_cubic(self):
        f = IntegrandFunction.from_expression("t^3")
        check = verify_identity(f, 0.3, UNIT)
        exact_lhs = 0.5 * (0.3**3 + 0.7**3) - 0.25
        assert check.lhs == pytest.approx(exact_lhs, abs=1e-14)
        assert check.gap <= 1e-10

    def test_constant(self):
        check = verify_identity(IntegrandFunction.from_expression("-4"), 0.1, UNIT)
        assert check.lhs == 0.0 and check.rhs == 0.0

    @pytest.mark.parametrize("x", [0.0, 0.1, 0.5])
    def test_linear(self, x):
        check = verify_identity(IntegrandFunction.from_expression("2*t + 1"), x, UNIT)
        assert abs(check.lhs) <= 1e-15 and abs(check.rhs) <= 1e-15

    def test_kinked_integrand(self):
        f = IntegrandFunction.from_expression("abs(t - 0.6)*t + exp(t)")
        check = verify_identity(f, 0.35, Interval(-1.0, 2.0))
        assert check.gap <= 1e-10
