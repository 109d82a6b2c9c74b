import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from pytest import approx, mark, raises

from src.errors import DomainError, NumericError
from src.optim import (
    HuberObjective,
    LinearObjective,
    MaxAffineObjective,
    Objective,
    QuadraticObjective,
    WeightedSum,
    ZeroObjective,
    momentum_coeff,
    nag_step,
    run_gd,
    run_nag,
    run_projected_subgd,
    sample_regularity,
)
from src.optim.nag import NagState


class _Exploding(Objective):
    name = "exploding"

    @property
    def dimension(self) -> int:
        return 1

    def gradient_at(self, x):
        return np.array([np.inf]) if x[0] > 1.0 else np.array([-1.0])


@mark.parametrize("t, expected", [(1, 0.0), (2, 0.25), (3, 0.4), (4, 0.5), (10, 0.75)])
def test_momentum_coeff(t, expected):
    assert momentum_coeff(t) == approx(expected, abs=1e-15)


def test_momentum_coeff_rejects_step_zero():
    with raises(DomainError):
        momentum_coeff(0)


def test_nag_on_negative_linear():
    run = run_nag(LinearObjective(-1.0), 0.0, 3, 1.0)
    assert run.xs[:, 0].tolist() == [0.0, 1.0, 2.0, 3.25]
    assert run.ys[2, 0] == 2.25
    assert run.ms[1, 0] == 0.0
    assert run.steps == 3 and len(run) == 4


def test_nag_zero_steps_keeps_start():
    run = run_nag(LinearObjective([1.0, 2.0]), [3.0, 4.0], 0, 0.1)
    assert run.xs.shape == (1, 2)
    assert np.array_equal(run.ys[0], [3.0, 4.0])
    assert np.array_equal(run.ms[0], [0.0, 0.0])


def test_nag_step_matches_runner():
    f = QuadraticObjective([[2.0, 0.5], [0.5, 1.0]], [1.0, -1.0])
    run = run_nag(f, [1.0, 1.0], 5, 0.3)
    state = run.state(0)
    for t in range(1, 6):
        state = nag_step(state, f, 0.3)
        assert np.array_equal(state.x, run.xs[t])
        assert np.array_equal(state.y, run.ys[t])
        assert np.array_equal(state.m, run.ms[t])


def test_trajectory_is_read_only():
    run = run_nag(ZeroObjective(), 0.0, 2, 1.0)
    with raises(ValueError):
        run.xs[0, 0] = 1.0
    assert [s.t for s in run.states] == [0, 1, 2]
    assert len(run) == 3 and run.steps == 2


@mark.parametrize("eta", [0.0, -1.0])
def test_runners_reject_bad_step(eta):
    with raises(DomainError):
        run_nag(ZeroObjective(), 0.0, 1, eta)
    with raises(DomainError):
        nag_step(NagState(0, np.zeros(1), np.zeros(1), np.zeros(1)), ZeroObjective(), eta)


def test_non_finite_gradient_is_reported():
    with raises(NumericError) as info:
        run_nag(_Exploding(), 0.0, 10, 1.0)
    assert info.value.step is not None
    assert info.value.point[0] > 1.0


def test_gd_on_quadratic_halves():
    run = run_gd(QuadraticObjective([[1.0]]), 1.0, 4, 0.5)
    assert run.xs[:, 0].tolist() == [1.0, 0.5, 0.25, 0.125, 0.0625]
    assert not run.ms.any()


def test_projected_subgd_stays_in_ball():
    f = LinearObjective([-1.0, -1.0])
    run = run_projected_subgd(f, [0.0, 0.0], 50, 0.1, 1.0)
    assert np.all(np.linalg.norm(run.xs, axis=1) <= 1.0 + 1e-12)
    assert np.array_equal(run.averages[0], [0.0, 0.0])
    assert run.averages[1] == approx(run.xs[1] / 2.0)


def test_projected_subgd_rejects_outside_start():
    with raises(DomainError):
        run_projected_subgd(ZeroObjective(2), [2.0, 0.0], 1, 0.1, 1.0)


def test_quadratic_validation():
    with raises(DomainError):
        QuadraticObjective([[1.0, 2.0], [0.0, 1.0]])
    with raises(DomainError):
        QuadraticObjective([[-1.0]])
    assert QuadraticObjective([[2.0, 0.0], [0.0, 3.0]]).smoothness == approx(3.0)


def test_max_affine_tie_rule():
    f = MaxAffineObjective(2.0, 0.0, 3)
    assert f.active_coordinate(np.array([1.0, 1.0, 0.0])) == 0
    assert f.active_coordinate(np.array([0.0, -1.0, -1.0])) == 0
    assert f.active_coordinate(np.array([-1.0, -1.0, -1.0])) is None
    assert f.subgradient_at(np.array([-1.0, 0.5, 0.5])).tolist() == [0.0, 2.0, 0.0]
    assert f.value_at(np.array([-1.0, 0.5, 0.5])) == 1.0


def test_huber_gradient_is_clipped():
    f = HuberObjective(center=1.0, G=0.5, beta=2.0)
    assert f.gradient_at(np.array([10.0]))[0] == 0.5
    assert f.gradient_at(np.array([-10.0]))[0] == -0.5
    assert f.gradient_at(np.array([1.1]))[0] == approx(0.2)
    assert f.value_at(np.array([1.0])) == 0.0


def test_weighted_sum_cancels_exactly():
    f = WeightedSum([(0.25, LinearObjective(3.0)), (0.25, LinearObjective(-3.0))])
    assert f.gradient_at(np.array([7.0]))[0] == 0.0
    assert f.smoothness == 0.0
    with raises(DomainError):
        WeightedSum([(1.0, ZeroObjective(1)), (1.0, ZeroObjective(2))])


@settings(max_examples=30, deadline=None)
@given(
    st.floats(min_value=-5.0, max_value=5.0),
    st.floats(min_value=0.1, max_value=3.0),
    st.floats(min_value=0.1, max_value=3.0),
)
def test_huber_regularity_sampled(center, G, beta):
    f = HuberObjective(center, G, beta)
    max_grad, max_ratio = sample_regularity(f, -10.0, 10.0, 200, np.random.default_rng(0))
    assert max_grad <= G
    assert max_ratio <= beta * (1.0 + 1e-9)
