import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import quad, random_interval, random_piecewise
from companion_quad import (
    HolderPair,
    IntegrandFunction,
    Interval,
    NormKind,
    bound_for,
    companion_gap,
    companion_value,
    lipschitz_bound,
    m_exact,
    mean_value,
    segment_norms,
)
from companion_quad.errors import InvalidParameterError

UNIT = Interval(0.0, 1.0)
SQUARE = IntegrandFunction.from_expression("t^2")
KINDS = (NormKind.linf(), NormKind.lp(2.0), NormKind.lp(5.0), NormKind.l1())


def report(f, x, domain, kind, holder=None):
    return bound_for(segment_norms(f, x, domain, kind), x, domain, holder)


class TestCompanion:
    def test_linear_gives_midpoint_value(self):
        assert companion_value(IntegrandFunction.from_expression("t"), 0.25, UNIT) == 0.5

    def test_constant(self):
        assert companion_value(IntegrandFunction.from_expression("3.5"), 0.1, UNIT) == 3.5

    def test_square(self):
        assert companion_value(SQUARE, 0.25, UNIT) == 0.3125

    def test_gap_is_signed(self):
        assert companion_gap(SQUARE, 0.25, UNIT) == pytest.approx(0.3125 - 1 / 3, abs=1e-15)
        assert companion_gap(SQUARE, 0.0, UNIT) == pytest.approx(0.5 - 1 / 3, abs=1e-15)

    def test_mean_against_quad(self):
        f = IntegrandFunction.from_expression("exp(t)*abs(t - 1)")
        assert mean_value(f, Interval(-1, 2)) == pytest.approx(
            quad(lambda t: math.exp(t) * abs(t - 1), -1, 2, points=[1.0]) / 3, rel=1e-12
        )

    def test_right_half_rejected(self):
        with pytest.raises(InvalidParameterError):
            companion_value(SQUARE, 0.75, UNIT)


class TestMExact:
    def test_examples(self):
        assert m_exact(SQUARE, 0.25, UNIT) == pytest.approx(0.125, rel=1e-12)
        assert m_exact(IntegrandFunction.from_expression("4"), 0.2, UNIT) == 0.0
        assert m_exact(IntegrandFunction.from_expression("t"), 0.0, UNIT) == pytest.approx(0.25)

    def test_against_quad(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            a, b = random_interval(rng)
            pw = random_piecewise(rng, a, b)
            f = IntegrandFunction.from_expression(pw.text)
            x = rng.uniform(a, 0.5 * (a + b))
            mid, y = 0.5 * (a + b), a + b - x

            def weight(t):
                if t <= x:
                    return t - a
                if t <= y:
                    return abs(t - mid)
                return b - t

            dabs = lambda t: abs(float(f.prime(t)))  # noqa: E731
            oracle = quad(lambda t: weight(t) * dabs(t), a, b, points=[x, mid, y, pw.k]) / (b - a)
            assert m_exact(f, x, Interval(a, b)) == pytest.approx(oracle, rel=1e-9, abs=1e-13)


class TestBoundExamples:
    def test_linf(self):
        r = report(SQUARE, 0.25, UNIT, NormKind.linf())
        assert r.first_bound == pytest.approx(0.171875, rel=1e-12)
        assert r.max_branch == pytest.approx(0.25, rel=1e-12)
        assert r.combined is None and r.holder_branch is None

    def test_lp_combined(self):
        r = report(SQUARE, 0.25, UNIT, NormKind.lp(2))
        assert r.combined == pytest.approx(1 / 6, rel=1e-12)

    def test_l1(self):
        r = report(SQUARE, 0.25, UNIT, NormKind.l1())
        assert r.first_bound == pytest.approx(0.25, rel=1e-12)
        assert r.max_branch == pytest.approx(0.25, rel=1e-12)

    def test_holder_only_when_requested(self):
        r = report(SQUARE, 0.25, UNIT, NormKind.linf(), HolderPair.from_alpha(3.0))
        assert r.holder == HolderPair(3.0, 1.5)
        assert "holder_branch" in r.branches()

    def test_norms_at_other_x_rejected(self):
        norms = segment_norms(SQUARE, 0.25, UNIT, NormKind.l1())
        with pytest.raises(InvalidParameterError):
            bound_for(norms, 0.3, UNIT)

    def test_certified_propagates(self):
        f = IntegrandFunction.from_callable(lambda t: t**2, lambda t: 2 * t)
        assert not report(f, 0.25, UNIT, NormKind.linf()).certified
        assert report(SQUARE, 0.25, UNIT, NormKind.linf()).certified


class TestHolderPair:
    def test_conjugate(self):
        pair = HolderPair.from_alpha(4.0)
        assert pair.beta == pytest.approx(4 / 3)

    @pytest.mark.parametrize("alpha, beta", [(1.0, math.inf), (2.0, 3.0), (0.5, -1.0)])
    def test_invalid(self, alpha, beta):
        with pytest.raises(InvalidParameterError):
            HolderPair(alpha, beta)


@pytest.mark.parametrize("kind", KINDS, ids=str)
def test_branch_ordering(kind):
    rng = np.random.default_rng(21)
    for _ in range(8):
        a, b = random_interval(rng)
        domain = Interval(a, b)
        f = IntegrandFunction.from_expression(random_piecewise(rng, a, b).text)
        for x in rng.uniform(a, domain.midpoint, size=4):
            for alpha in (1.5, 2.0, 7.0):
                r = report(f, x, domain, kind, HolderPair.from_alpha(alpha))
                for name, value in r.branches().items():
                    assert value >= 0.0
                    if name != "combined":
                        assert r.first_bound <= value + 1e-12, name


@pytest.mark.parametrize("domain", [UNIT, Interval(-2.0, 5.0)], ids=str)
class TestSpecialCases:
    f = IntegrandFunction.from_expression("sin(2*t) + t^3/10")

    def test_linf(self, domain):
        length = domain.length
        kind = NormKind.linf()
        r = report(self.f, domain.a, domain, kind)
        n = segment_norms(self.f, domain.a, domain, kind)
        assert r.max_branch == pytest.approx(0.25 * length * n.whole, rel=1e-14)

        n = segment_norms(self.f, domain.midpoint, domain, kind)
        r = bound_for(n, domain.midpoint, domain)
        assert r.first_bound == pytest.approx(length * (n.left + n.right) / 8, rel=1e-14)

        n = segment_norms(self.f, domain.quarter_point, domain, kind)
        r = bound_for(n, domain.quarter_point, domain)
        assert r.max_branch == pytest.approx(length * n.whole / 8, rel=1e-14)

    @pytest.mark.parametrize("p", [1.5, 2.0, 6.0])
    def test_lp(self, domain, p):
        kind = NormKind.lp(p)
        q, length = kind.q, domain.length
        n = segment_norms(self.f, domain.a, domain, kind)
        r = bound_for(n, domain.a, domain)
        assert r.first_bound == pytest.approx(
            0.5 * length ** (1 / q) * n.whole / (q + 1) ** (1 / q), rel=1e-12
        )
        n = segment_norms(self.f, domain.quarter_point, domain, kind)
        r = bound_for(n, domain.quarter_point, domain)
        assert r.combined == pytest.approx(
            0.25 * length ** (1 / q) * n.whole / (q + 1) ** (1 / q), rel=1e-12
        )

    def test_l1(self, domain):
        kind = NormKind.l1()
        for x, const in ((domain.a, 0.5), (domain.midpoint, 0.5), (domain.quarter_point, 0.25)):
            n = segment_norms(self.f, x, domain, kind)
            r = bound_for(n, x, domain)
            assert r.first_bound == pytest.approx(const * n.whole, rel=1e-12)


class TestLipschitz:
    def test_examples(self):
        assert lipschitz_bound(0.25, UNIT, 1.0, 2.0) == pytest.approx(0.25)
        assert lipschitz_bound(0.3, UNIT, 0.5, 0.0) == 0.0
        assert lipschitz_bound(0.25, UNIT, 1.0, 1.0) == pytest.approx(0.125)

    @pytest.mark.parametrize("k, M", [(0.0, 1.0), (1.5, 1.0), (1.0, -1.0), (1.0, math.inf)])
    def test_invalid(self, k, M):
        with pytest.raises(InvalidParameterError):
            lipschitz_bound(0.2, UNIT, k, M)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0.0, 1.0), st.floats(-5, 5), st.floats(0.1, 10))
    def test_matches_linf_max_branch(self, s, a, length):
        domain = Interval(a, a + length)
        x = min(domain.a + s * 0.5 * length, domain.midpoint)
        f = IntegrandFunction.from_expression("cos(t) + t^2/20")
        n = segment_norms(f, x, domain, NormKind.linf())
        r = bound_for(n, x, domain)
        assert lipschitz_bound(x, domain, 1.0, n.whole) == pytest.approx(r.max_branch, rel=1e-12)
