import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from pytest import approx, mark, raises

from src.errors import DomainError
from src.stability import C1, C2
from src.uniform import (
    C3,
    C4,
    build_loss_family,
    build_reduction_scenario,
    check_loss_regularity,
    check_nag_uniform_upper,
    derive_parameters,
    derived_quadratic_gap,
    empirical_risk,
    format_scenario,
    nag_uniform_upper_report,
    quadratic_linear_lower,
    random_huber_scenario,
    stated_quadratic_gap,
    uniform_checkpoints,
    uniform_floor_horizon,
    uniform_gap,
    uniform_lower_bound,
    verify_reduction,
    verify_uniform_lower_bound,
)


def test_derived_parameters():
    params = derive_parameters(1.0, 1.0, 1.0, 4)
    assert params.eta == 0.25
    assert params.eps == 0.0625
    params = derive_parameters(2.0, 0.5, 1.0, 10)
    assert params.eta == approx(0.7)
    assert params.eps == approx(0.5 * 0.49 * 2.0 / 7.0)


@mark.parametrize("hat_eta, n", [(1.0, 3), (0.0, 10), (1.5, 10)])
def test_derived_parameters_rejected(hat_eta, n):
    with raises(DomainError):
        derive_parameters(1.0, 1.0, hat_eta, n)


def test_constants():
    assert C3 == approx(C1 / 4.0)
    assert C4 == approx(C2 / 4.0)


def test_floor_horizon_and_bound():
    assert uniform_floor_horizon(1.0, 1.0, 4) == 247
    assert uniform_floor_horizon(1.0, 1.0, 10) == 283
    assert uniform_lower_bound(1.0, 1.0, 1.0, 4, 0) == approx(C4 / 4.0)
    assert uniform_lower_bound(1.0, 1.0, 1.0, 4, 10**6) == approx(1.0 / 3.0)


def test_loss_family():
    family = build_loss_family(1.0, 1.0, 1.0, 10)
    assert family.loss(1).gradient_at(np.array([3.0]))[0] == 0.0
    assert family.loss(3).gradient_at(np.array([3.0]))[0] == -1.0
    assert family.loss(4).gradient_at(np.array([3.0]))[0] == 1.0
    assert family.loss(5) is family.construction.f_M_plus
    assert family.g2.grad(0.0) == approx(-0.7)
    assert family.g2.grad(0.7 + 1.0) == 0.0
    with raises(DomainError):
        family.loss(6)


def test_samples_differ_in_first_example(scenario):
    assert len(scenario.S) == len(scenario.S_prime) == scenario.n
    assert scenario.S[0] == 1 and scenario.S_prime[0] == 2
    assert scenario.S[1:] == scenario.S_prime[1:]
    assert scenario.S.count(5) == scenario.n - 3


def test_empirical_risk_errors():
    family = build_loss_family(1.0, 1.0, 1.0, 4)
    with raises(DomainError):
        empirical_risk(family, [])
    with raises(DomainError):
        empirical_risk(family, [1, 7])


def test_risk_of_S_is_scaled_hard_function(scenario):
    f = scenario.construction.f_M_plus
    w = (scenario.n - 3) / scenario.n
    for x in np.linspace(-1.0, scenario.construction.minimizer + 1.0, 97):
        assert scenario.R_S.gradient_at(np.array([x]))[0] == w * f.grad(x)


def test_checkpoints_are_construction_phases(scenario):
    cr = scenario.construction
    found = [t for _, t in uniform_checkpoints(scenario, cr.checkpoints[-1])]
    assert found == list(cr.checkpoints)
    n = scenario.n
    assert cr.checkpoints[0] == math.ceil(10.0 * n / (n - 3)) * 3


def test_reduction_is_exact(scenario):
    T = uniform_floor_horizon(1.0, 1.0, scenario.n) + 1
    assert verify_reduction(scenario, T) <= 1e-9


def test_uniform_lower_bound_holds(scenario):
    report = verify_uniform_lower_bound(scenario)
    assert report.passed
    assert report.named("uniform.floor")
    assert len(report.named("uniform.checkpoint")) >= scenario.construction.M + 1


def test_gap_at_first_checkpoint(scenario):
    first = scenario.construction.checkpoints[0]
    gap = uniform_gap(scenario, first)
    assert gap >= uniform_lower_bound(1.0, 1.0, 1.0, scenario.n, first)


def test_losses_are_lipschitz_and_smooth(scenario):
    assert check_loss_regularity(scenario, pairs=500).passed


def test_uniform_upper_bound_on_scenario(scenario):
    first = scenario.construction.checkpoints[0]
    report = nag_uniform_upper_report(
        scenario.R_S, scenario.R_S_prime, 1.0, scenario.n, first, 1.0
    )
    assert report.passed


def test_format_scenario():
    sc = build_reduction_scenario(1.0, 1.0, 1.0, 10)
    text = format_scenario(sc, "cr.txt")
    assert text.splitlines()[0] == "n = 10"
    assert "construction = cr.txt" in text
    assert f"M = {sc.construction.M}" in text


def test_linear_loss_example():
    closed_form, simulated = quadratic_linear_lower(1.0, 1.0, 8, 2)
    assert closed_form == 0.5
    assert simulated == approx(0.5, rel=1e-12)


@mark.parametrize("n", [2, 8, 64])
@mark.parametrize("T", [1, 10, 100])
def test_linear_loss_grid(n, T):
    closed_form, simulated = quadratic_linear_lower(1.0, 1.0, n, T)
    assert simulated == approx(closed_form, rel=1e-10)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=10_000), st.integers(min_value=2, max_value=1000))
def test_linear_gap_within_stated_envelope(T, n):
    derived = derived_quadratic_gap(1.0, 1.0, n, T)
    stated = stated_quadratic_gap(1.0, 1.0, n, T)
    assert stated / 3.0 <= derived <= stated * 8.0 / 9.0 * (1.0 + 1e-12)


def test_linear_loss_rejects_bad_input():
    with raises(DomainError):
        quadratic_linear_lower(1.0, 1.0, 1, 5)
    with raises(DomainError):
        quadratic_linear_lower(1.0, 0.0, 8, 5)


@mark.parametrize("seed", range(5))
def test_uniform_upper_on_huber_samples(seed):
    risk, risk_prime = random_huber_scenario(np.random.default_rng(seed), 20, 1.0, 2.0)
    assert check_nag_uniform_upper(risk, risk_prime, 1.0, 20, 30, 0.5)
