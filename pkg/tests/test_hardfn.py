import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from pytest import approx, mark, raises

from src.errors import CheckFailure, ConstructionError, DomainError, UsageError
from src.hardfn import (
    HardFnParams,
    PiecewiseQuadratic,
    Plateau,
    check_large_steps,
    dump_construction,
    extend_plateau,
    floor_horizon,
    load_construction,
    phase_index,
    read_construction,
    save_construction,
    verify_construction,
)
from src.hardfn.checks import minimizer_distance_bound

TWO_INTERVALS = PiecewiseQuadratic(1.0, 1.0, ((0.0, 1.0), (2.0, 3.0)))

points = st.floats(min_value=-5.0, max_value=8.0, allow_nan=False)


@mark.parametrize(
    "x, grad, value",
    [
        (-1.0, -1.0, 1.0),
        (0.5, -0.5, -0.375),
        (1.5, 0.0, -0.5),
        (2.0, 0.0, -0.5),
        (2.5, 0.5, -0.375),
    ],
)
def test_gradient_and_value(x, grad, value):
    assert TWO_INTERVALS.grad(x) == approx(grad)
    assert TWO_INTERVALS.value(x) == approx(value)


def test_hessian_on_closed_intervals():
    assert TWO_INTERVALS.hessian(1.0) == 1.0
    assert TWO_INTERVALS.hessian(1.5) == 0.0
    assert TWO_INTERVALS.hessian(-0.5) == 0.0
    assert TWO_INTERVALS.covered_length == 2.0
    assert TWO_INTERVALS.max_slope == 1.0


@mark.parametrize(
    "intervals", [((1.0, 0.0),), ((0.0, 2.0), (1.0, 3.0)), ((0.0, 1.0), (1.0, 2.0))]
)
def test_bad_intervals_are_rejected(intervals):
    with raises(DomainError):
        PiecewiseQuadratic(1.0, 1.0, intervals)


def test_plateau_extension():
    f = PiecewiseQuadratic(2.0, 1.0, ((0.0, 1.0),))
    plus = f.with_plateau(Plateau(p=1.0, g_p=f.grad(1.0)))
    assert plus.minimizer == 2.0
    assert plus.grad(1.5) == -0.5
    assert plus.grad(3.0) == 0.0
    assert plus.grad(0.5) == f.grad(0.5)
    assert plus.value(5.0) == plus.value(2.0)
    assert plus.hessian(1.5) == 1.0 and plus.hessian(2.5) == 0.0
    with raises(DomainError):
        Plateau(p=1.0, g_p=0.5)
    with raises(DomainError):
        plus.with_interval(5.0, 6.0)


@settings(max_examples=100, deadline=None)
@given(points, points)
def test_gradient_is_monotone(u, v):
    lo, hi = min(u, v), max(u, v)
    assert TWO_INTERVALS.grad(lo) <= TWO_INTERVALS.grad(hi)


@settings(max_examples=100, deadline=None)
@given(points, st.floats(min_value=1e-3, max_value=1.0))
def test_value_differences_bracketed_by_gradients(x, h):
    rise = TWO_INTERVALS.value(x + h) - TWO_INTERVALS.value(x - h)
    assert 2 * h * TWO_INTERVALS.grad(x - h) - 1e-9 <= rise
    assert rise <= 2 * h * TWO_INTERVALS.grad(x + h) + 1e-9


def test_phase_index_and_horizon():
    params = HardFnParams(G=1.0, beta=1.0, eta=0.5, eps=1e-6)
    assert phase_index(1, 0.5, 1.0) == 60
    assert params.checkpoint(3) == 100
    assert params.block == 20
    assert floor_horizon(params) == 344
    assert floor_horizon(HardFnParams(G=1.0, beta=1.0, eta=0.1, eps=1e-6)) == 1722


@mark.parametrize(
    "G, beta, eta, eps", [(0.0, 1.0, 0.5, 0.1), (1.0, 1.0, 2.0, 0.1), (1.0, 1.0, 0.5, 0.5)]
)
def test_invalid_parameters(G, beta, eta, eps):
    with raises(DomainError):
        HardFnParams(G=G, beta=beta, eta=eta, eps=eps)


def test_construction_shape(preset):
    p = preset.params
    assert 1 <= preset.M <= p.log_ratio
    assert len(preset.checkpoints) == preset.M + 1
    assert list(preset.checkpoints) == [p.checkpoint(j) for j in range(1, preset.M + 2)]
    assert preset.widths[0] == approx(p.eps, rel=1e-3)
    assert preset.f_M.covered_length < p.target_length
    assert preset.f_M.covered_length + preset.widths[-1] >= p.target_length
    assert preset.f_M_plus.grad(preset.minimizer) == 0.0


def test_widths_grow_by_ten_thirds(preset):
    widths = preset.widths
    for j in range(1, len(widths)):
        assert widths[j] >= (10.0 / 3.0) * widths[j - 1] * (1.0 - 1e-4)
    for j in range(preset.M + 1):
        assert widths[j] >= 3.0**j * preset.params.eps * (1.0 - 1e-4)


def test_intervals_lie_left_to_right(preset):
    ends = [b for _, b in preset.phase_intervals]
    starts = [a for a, _ in preset.phase_intervals]
    assert all(a > b for a, b in zip(starts[1:], ends))


def test_construction_checks_pass(preset):
    report = verify_construction(preset)
    assert report.passed
    assert report.named("construction.consistency")
    assert check_large_steps(preset).passed


def test_minimizer_within_bound(small_construction):
    bound = minimizer_distance_bound(small_construction.params)
    assert abs(small_construction.minimizer) < bound
    assert math.isfinite(bound)


def test_extend_plateau_matches_builder(small_construction):
    rebuilt = extend_plateau(small_construction)
    assert rebuilt.plateau == small_construction.plateau
    assert rebuilt.minimizer == small_construction.minimizer


def test_dump_then_load_is_exact(small_construction):
    loaded = load_construction(dump_construction(small_construction))
    assert loaded.params == small_construction.params
    assert loaded.checkpoints == small_construction.checkpoints
    assert loaded.phase_intervals == small_construction.phase_intervals
    assert loaded.plateau == small_construction.plateau
    assert verify_construction(loaded).passed


def test_save_and_read(small_construction, tmp_path):
    path = save_construction(small_construction, tmp_path / "nested" / "construction.txt")
    assert read_construction(path).M == small_construction.M
    with raises(UsageError):
        read_construction(tmp_path / "missing.txt")


def _edited(cr, lineno, field, value):
    lines = dump_construction(cr).splitlines()
    parts = lines[lineno].split()
    parts[field] = value
    lines[lineno] = " ".join(parts)
    return "\n".join(lines)


def test_load_rejects_malformed_text(small_construction):
    text = dump_construction(small_construction)
    with raises(UsageError):
        load_construction("\n".join(text.splitlines()[:-1]))
    with raises(UsageError):
        load_construction(_edited(small_construction, 1, 2, "abc"))
    with raises(UsageError):
        load_construction(_edited(small_construction, 1, 0, "7"))
    with raises(UsageError):
        load_construction(_edited(small_construction, 0, 2, "5.0"))


def test_load_rejects_reversed_interval(small_construction):
    a, _ = small_construction.phase_intervals[0]
    with raises(ConstructionError):
        load_construction(_edited(small_construction, 1, 3, repr(a - 1.0)))


def test_corrupted_endpoint_fails_checks(small_construction):
    _, b = small_construction.phase_intervals[0]
    eps = small_construction.params.eps
    corrupted = load_construction(_edited(small_construction, 1, 3, repr(b + eps / 2)))
    report = verify_construction(corrupted, strict=False)
    assert not report.passed
    assert any(not r.passed for r in report.named("construction.endpoints"))
    with raises(CheckFailure):
        verify_construction(corrupted)


def test_regularity_is_sampled_from_seed(small_construction):
    first = verify_construction(small_construction, pairs=500, seed=3)
    second = verify_construction(small_construction, pairs=500, seed=3)
    observed = [[r.observed for r in report] for report in (first, second)]
    assert np.array_equal(*observed, equal_nan=True)
    assert np.isfinite([r.observed for r in first.named("construction.smoothness")]).all()
