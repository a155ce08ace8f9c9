import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from commodeq.errors import NoBracket
from commodeq.rootfind import (
    HUGE,
    bracketed_root,
    central_difference,
    expand_bracket,
    newton_polish,
    saturate,
    second_difference,
    walk_bracket,
)


class TestExpandBracket:
    def test_initial_bracket_kept(self) -> None:
        lo, hi, flo, fhi = expand_bracket(lambda x: x, -1.0, 1.0)
        assert (lo, hi) == (-1.0, 1.0)
        assert (flo, fhi) == (-1.0, 1.0)

    def test_grows_about_centre(self) -> None:
        lo, hi, _, _ = expand_bracket(lambda x: x - 100.0, 9.0, 11.0)
        assert lo + hi == pytest.approx(20.0)
        assert lo < 100.0 <= hi

    def test_no_sign_change(self) -> None:
        with pytest.raises(NoBracket) as info:
            expand_bracket(lambda x: 1.0 + x * x, -1.0, 1.0, max_doublings=5)
        assert info.value.bracket == (-32.0, 32.0)

    def test_nan_rejected(self) -> None:
        with pytest.raises(NoBracket):
            expand_bracket(lambda x: math.nan, -1.0, 1.0)

    def test_zero_at_end(self) -> None:
        lo, hi, flo, fhi = expand_bracket(lambda x: x - 1.0, -1.0, 1.0)
        assert fhi == 0.0


class TestWalkBracket:
    def test_doubles_towards_root(self) -> None:
        assert walk_bracket(lambda x: 5.0 - x, 0.0, 1.0) == (3.0, 7.0, 2.0, -2.0)

    def test_walks_left(self) -> None:
        assert walk_bracket(lambda x: -1.0 - x, 0.0, 1.0) == (-1.0, 0.0, 0.0, -1.0)

    def test_increasing(self) -> None:
        assert walk_bracket(lambda x: x - 5.0, 0.0, 1.0, decreasing=False) == (3.0, 7.0, -2.0, 2.0)

    def test_root_at_start(self) -> None:
        assert walk_bracket(lambda x: 2.0 - x, 2.0, 1.0) == (2.0, 2.0, 0.0, 0.0)

    def test_stays_short_of_rejected_points(self) -> None:
        def f(x: float) -> float:
            if x > 5.5:
                raise ValueError(f"outside the domain: {x}")
            return 5.2 - x

        lo, hi, flo, fhi = walk_bracket(f, 0.0, 1.0, tolerate=(ValueError,))
        assert (lo, hi) == pytest.approx((5.0, 5.5))
        assert flo > 0.0 > fhi

    def test_other_errors_propagate(self) -> None:
        def f(x: float) -> float:
            if x > 2.0:
                raise KeyError(x)
            return 5.0 - x

        with pytest.raises(KeyError):
            walk_bracket(f, 0.0, 1.0, tolerate=(ValueError,))

    def test_start_not_guarded(self) -> None:
        def f(x: float) -> float:
            raise ValueError(x)

        with pytest.raises(ValueError):
            walk_bracket(f, 0.0, 1.0, tolerate=(ValueError,))

    def test_domain_without_root(self) -> None:
        def f(x: float) -> float:
            if x > 1.0:
                raise ValueError(x)
            return 1.0

        with pytest.raises(NoBracket):
            walk_bracket(f, 0.0, 1.0, max_steps=30, tolerate=(ValueError,))

    def test_no_sign_change(self) -> None:
        with pytest.raises(NoBracket):
            walk_bracket(lambda x: 1.0 + math.exp(-x), 0.0, 1.0, max_steps=5)

    def test_nan_rejected(self) -> None:
        with pytest.raises(NoBracket):
            walk_bracket(lambda x: math.nan if x else 1.0, 0.0, 1.0)


class TestBracketedRoot:
    def test_cubic(self) -> None:
        f = lambda x: x**3 - 2.0 * x - 5.0  # noqa: E731
        root = bracketed_root(f, expand_bracket(f, 0.0, 1.0))
        assert f(root) == pytest.approx(0.0, abs=1e-10)

    def test_end_point_root(self) -> None:
        assert bracketed_root(lambda x: x, (0.0, 1.0, 0.0, 1.0)) == 0.0
        assert bracketed_root(lambda x: x - 1.0, (0.0, 1.0, -1.0, 0.0)) == 1.0

    def test_polish_does_not_hurt(self) -> None:
        f = math.exp
        g = lambda x: math.exp(x) - 2.0  # noqa: E731
        plain = bracketed_root(g, expand_bracket(g, -1.0, 1.0))
        polished = bracketed_root(g, expand_bracket(g, -1.0, 1.0), dfdx=f, polish=3)
        assert abs(g(polished)) <= abs(g(plain))
        assert polished == pytest.approx(math.log(2.0), abs=1e-13)

    @given(st.floats(min_value=-1e3, max_value=1e3))
    def test_linear_roots(self, target: float) -> None:
        f = lambda x: 3.0 * (x - target)  # noqa: E731
        root = bracketed_root(f, expand_bracket(f, -1.0, 1.0), xtol=1e-12)
        assert root == pytest.approx(target, abs=1e-9)


class TestNewtonPolish:
    def test_rejects_step_outside(self) -> None:
        # The Newton step from 0.5 lands at 2.0, outside [0, 1].
        x = newton_polish(lambda x: x - 2.0, 0.5, lambda x: 1.0, (0.0, 1.0))
        assert x == 0.5

    def test_rejects_step_that_grows_residual(self) -> None:
        x = newton_polish(lambda x: x - 1.0, 0.5, lambda x: 0.1, (-10.0, 10.0))
        assert x == 0.5

    def test_zero_slope(self) -> None:
        assert newton_polish(lambda x: x, 0.3, lambda x: 0.0, (0.0, 1.0)) == 0.3


class TestDifferences:
    def test_quadratic_exact(self) -> None:
        f = lambda x: 3.0 * x * x + 2.0 * x  # noqa: E731
        assert central_difference(f, 1.0, 1e-3) == pytest.approx(8.0, rel=1e-9)
        assert second_difference(f, 1.0, 1e-3) == pytest.approx(6.0, rel=1e-6)


class TestSaturate:
    def test_clips_overflow(self) -> None:
        f = saturate(lambda x: math.exp(x) if x < 700 else float("inf"))
        assert f(1000.0) == HUGE
        assert saturate(lambda x: -float("inf"))(0.0) == -HUGE

    def test_passes_finite(self) -> None:
        assert saturate(lambda x: 2.0 * x)(1.5) == 3.0
