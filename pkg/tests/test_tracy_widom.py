import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import special
from scipy.interpolate import CubicHermiteSpline

from wishart_tw.errors import DomainError
from wishart_tw.service import tracy_widom_service as tw_service
from wishart_tw.service.table_service import TW_PROBABILITIES
from wishart_tw.settings import TABLE_QUANTILES, Settings


class TestHastingsMcLeod:
    def test_matches_airy_at_shooting_point(self, painleve):
        assert painleve.s_max == pytest.approx(8.0)
        assert painleve.q[0] == pytest.approx(special.airy(8.0)[0], rel=1e-12)

    def test_grid_spacing(self, painleve):
        steps = np.diff(painleve.grid)
        assert np.all(steps < 0)
        assert np.max(np.abs(steps)) <= 0.01 + 1e-12
        assert painleve.s_min == pytest.approx(-10.0)

    def test_value_at_zero(self, painleve):
        i = int(np.argmin(np.abs(painleve.grid)))
        assert abs(painleve.grid[i]) < 1e-9
        assert abs(painleve.q[i] - 0.3670615515) <= 1e-6

    def test_left_asymptotics(self, painleve):
        i = int(np.argmin(np.abs(painleve.grid + 6.0)))
        assert painleve.q[i] ** 2 / 3.0 == pytest.approx(1.0, abs=0.02)
        assert np.all(painleve.q > 0)

    @pytest.mark.parametrize("lo,hi,bound", [(-3.9, 6.0, 1e-7), (-9.9, -4.1, 1e-6)])
    def test_ode_residual(self, painleve, lo, hi, bound):
        s, q, qp = painleve.grid, painleve.q, painleve.qprime
        h = s[1] - s[0]
        inner = np.flatnonzero((s >= lo) & (s <= hi))
        inner = inner[(inner >= 2) & (inner <= len(s) - 3)]
        second = (qp[inner - 2] - 8 * qp[inner - 1] + 8 * qp[inner + 1] - qp[inner + 2]) / (12 * h)
        residual = second - s[inner] * q[inner] - 2 * q[inner] ** 3
        assert np.max(np.abs(residual)) <= bound

    @pytest.mark.parametrize("s_min", [-10.0, -12.0])
    def test_deep_left_tail(self, s_min):
        solution = tw_service.solve_hastings_mcleod(s_min, 8.0, 1e-12)
        assert solution.s_min == pytest.approx(s_min)
        assert np.all(solution.q > 0)
        for s in (s_min, -9.5, -8.0, -6.0):
            i = int(np.argmin(np.abs(solution.grid - s)))
            expected = tw_service.left_asymptote(solution.grid[i])
            assert solution.q[i] == pytest.approx(expected, rel=1e-6), s

    def test_left_tail_independent_of_s_min(self, painleve):
        deeper = tw_service.solve_hastings_mcleod(-12.0, 8.0, 1e-12)
        for s in (-9.5, -6.0, -2.0, 0.0):
            i = int(np.argmin(np.abs(painleve.grid - s)))
            k = int(np.argmin(np.abs(deeper.grid - s)))
            assert painleve.grid[i] == pytest.approx(deeper.grid[k], abs=1e-9)
            assert painleve.q[i] == pytest.approx(deeper.q[k], rel=1e-7), s
            assert painleve.I2[i] == pytest.approx(deeper.I2[k], rel=1e-7), s

    def test_join_is_continuous(self, painleve):
        s, q = painleve.grid, painleve.q
        i = int(np.flatnonzero(s <= tw_service.JOIN_POINT)[0])
        # second difference across the join matches q'' = s q + 2 q^3
        h = s[i - 1] - s[i]
        second = (q[i - 1] - 2 * q[i] + q[i + 1]) / h ** 2
        assert second == pytest.approx(s[i] * q[i] + 2 * q[i] ** 3, abs=1e-3)

    def test_sign_change_stops_the_sweep(self):
        assert tw_service._sign_change.terminal
        assert tw_service._sign_change(0.0, np.array([-1e-3, 0.0, 0.0, 0.0, 0.0])) < 0

    def test_argument_validation(self):
        with pytest.raises(DomainError):
            tw_service.solve_hastings_mcleod(s_min=-7.0)
        with pytest.raises(DomainError):
            tw_service.solve_hastings_mcleod(s_max=5.0)
        with pytest.raises(DomainError):
            tw_service.solve_hastings_mcleod(tol=1e-3)

    def test_cache_written_and_reused(self, tmp_path):
        settings = Settings(cache_dir=tmp_path)
        first = tw_service.default_solution(settings)
        files = list(tmp_path.glob("painleve_v*.csv"))
        assert len(files) == 1
        tw_service._cached_solution.cache_clear()
        second = tw_service.default_solution(settings)
        assert_allclose(second.q, first.q, rtol=0, atol=0)
        assert_allclose(second.I2, first.I2, rtol=0, atol=0)


class TestCdf:
    def test_tw1_reference_points(self, tw1):
        for s, p in zip(TABLE_QUANTILES, TW_PROBABILITIES):
            assert abs(tw_service.cdf(tw1, s) - p) <= 0.01

    def test_tw1_named_points(self, tw1):
        assert tw_service.cdf(tw1, -3.90) == pytest.approx(0.01, abs=0.01)
        assert tw_service.cdf(tw1, 0.98) == pytest.approx(0.95, abs=0.005)
        assert tw_service.cdf(tw1, 2.02) == pytest.approx(0.99, abs=0.005)

    def test_outside_domain(self, tw1, tw2):
        assert tw_service.cdf(tw1, -50.0) == 0.0
        assert tw_service.cdf(tw2, 50.0) == 1.0

    @pytest.mark.parametrize("which", ["TW1", "TW2"])
    def test_monotone(self, painleve, which):
        tw = tw_service.TwCdf(which, painleve)
        values = tw_service.cdf(tw, np.linspace(-8.5, 7.5, 801))
        assert np.all(np.diff(values) >= 0)
        assert np.all((values >= 0) & (values <= 1))

    def test_cross_identity(self, painleve, tw1, tw2):
        s = np.linspace(-8.0, 6.0, 57)
        i1 = CubicHermiteSpline(painleve.grid[::-1], painleve.I1[::-1], -painleve.q[::-1])
        lhs = tw_service.cdf(tw1, s) ** 2
        rhs = tw_service.cdf(tw2, s) * np.exp(-i1(s))
        assert_allclose(lhs, rhs, rtol=1e-10)

    def test_pdf_is_derivative(self, tw2):
        h = 1e-5
        for s in (-3.0, -1.5, 0.0, 1.0):
            fd = (tw_service.cdf(tw2, s + h) - tw_service.cdf(tw2, s - h)) / (2 * h)
            assert tw_service.pdf(tw2, s) == pytest.approx(fd, rel=1e-6)

    def test_lowercase_which(self, painleve):
        assert tw_service.TwCdf("tw2", painleve).which == "TW2"
        with pytest.raises(DomainError):
            tw_service.TwCdf("TW4", painleve)

    def test_nan_rejected(self, tw1):
        with pytest.raises(DomainError):
            tw_service.cdf(tw1, float("nan"))


class TestQuantile:
    def test_tw1_values(self, tw1):
        assert tw_service.quantile(tw1, 0.95) == pytest.approx(0.98, abs=0.02)
        assert tw_service.quantile(tw1, 0.5) == pytest.approx(-1.27, abs=0.02)

    @pytest.mark.parametrize("p", [0.01, 0.3, 0.5, 0.9, 0.99])
    def test_round_trip(self, tw1, tw2, p):
        for tw in (tw1, tw2):
            s = tw_service.quantile(tw, p)
            assert abs(tw_service.cdf(tw, s) - p) <= 1e-8

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.2, 1.5])
    def test_rejects_out_of_range(self, tw1, p):
        with pytest.raises(DomainError):
            tw_service.quantile(tw1, p)

    @pytest.mark.parametrize("p", [1e-14, 1e-10])
    def test_deep_left_quantile(self, tw1, p):
        s = tw_service.quantile(tw1, p)
        assert -10.0 < s < -6.0
        assert tw_service.cdf(tw1, s) == pytest.approx(p, rel=1e-6)

    def test_rejects_untabulated_tail(self, tw2):
        with pytest.raises(DomainError):
            tw_service.quantile(tw2, 1e-300)


class TestFredholm:
    def test_right_tail(self):
        assert tw_service.fredholm_f2(6.0) == pytest.approx(1.0, abs=1e-6)

    def test_monotone(self):
        values = [tw_service.fredholm_f2(s) for s in (-4.0, 0.0, 2.0)]
        assert values[0] < values[1] < values[2]

    def test_agrees_with_painleve_at_median(self, tw2):
        assert abs(tw_service.fredholm_f2(-1.27) - tw_service.cdf(tw2, -1.27)) <= 1e-6

    def test_agrees_with_painleve_on_grid(self, tw2):
        worst = 0.0
        for s in np.arange(-8.0, 5.0 + 1e-9, 0.25):
            worst = max(worst, abs(tw_service.fredholm_f2(float(s)) - tw_service.cdf(tw2, float(s))))
        assert worst <= 1e-6

    def test_rules_stay_inside_node_range(self, monkeypatch):
        sizes = []
        real_det = tw_service._fredholm_det

        def recording_det(s, m):
            sizes.append(m)
            return real_det(s, m)

        monkeypatch.setattr(tw_service, "_fredholm_det", recording_det)
        tw_service.fredholm_f2(-2.0, nodes=512)
        assert sizes[0] == 16
        assert all(16 <= m <= 512 for m in sizes)
        assert all(b == 2 * a for a, b in zip(sizes, sizes[1:]))

    def test_single_minimal_rule(self, tw2):
        assert abs(tw_service.fredholm_f2(0.0, nodes=16) - tw_service.cdf(tw2, 0.0)) <= 1e-4

    @pytest.mark.parametrize("nodes", [8, 100, 1024])
    def test_rejects_bad_node_count(self, nodes):
        with pytest.raises(DomainError):
            tw_service.fredholm_f2(0.0, nodes=nodes)

    @pytest.mark.parametrize("s", [-12.0, 7.0, math.inf])
    def test_rejects_bad_argument(self, s):
        with pytest.raises(DomainError):
            tw_service.fredholm_f2(s)
