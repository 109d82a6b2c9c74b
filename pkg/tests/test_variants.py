import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from pytest import approx, mark, raises

from src.errors import DomainError
from src.hardfn import PiecewiseQuadratic
from src.optim import (
    MaxAffineObjective,
    QuadraticObjective,
    VariantConfig,
    VariantKind,
    ZeroObjective,
    check_momentum_sums,
    check_variant_equivalence,
    momentum_tail_sum,
    partial_product_sum,
    run_nag,
    run_variant,
)
from src.optim.momentum import partial_sum_lower, tail_sum_lower
from src.utils.random_utils import make_rng, random_psd


def test_tail_sum_small_values():
    assert momentum_tail_sum(1) == 0.0
    assert momentum_tail_sum(2) == approx(0.25)
    assert momentum_tail_sum(3) == approx(0.5)


def test_partial_sum_small_values():
    assert partial_product_sum(1, 1) == 1.0
    assert partial_product_sum(1, 2) == approx(1.25)
    with raises(DomainError):
        partial_product_sum(3, 2)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=2, max_value=400))
def test_tail_sum_lower_bound(t):
    assert momentum_tail_sum(t) >= tail_sum_lower(t) * (1.0 - 1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=1, max_value=200), st.integers(min_value=1, max_value=200))
def test_partial_sum_lower_bound(n, gap):
    m = n + gap
    assert partial_product_sum(n, m) >= partial_sum_lower(n, m) * (1.0 - 1e-12)


def test_momentum_sum_sweep():
    report = check_momentum_sums(100)
    assert report.passed
    assert len(report.named("momentum.tail_sum")) == 99


def test_variant_config():
    assert VariantConfig("variant1", 2.0).eta == 0.5
    assert VariantConfig(VariantKind.VARIANT2, 2.0).eta == 0.25
    assert VariantConfig("variant2", 1.0).kind is VariantKind.VARIANT2
    with raises(DomainError):
        VariantConfig("variant3", 1.0)
    with raises(DomainError):
        VariantConfig("variant1", 0.0)


def test_canonical_variant_is_plain_nag():
    f = QuadraticObjective([[0.5]])
    traj = run_variant(VariantConfig("canonical", 1.0), f, 2.0, 5)
    reference = run_nag(f, 2.0, 5, 1.0)
    assert np.array_equal(traj.at("x", 5), reference.xs[5])
    assert traj.first_index == 0


def test_variant2_rows_start_at_one():
    traj = run_variant(VariantConfig("variant2", 1.0), QuadraticObjective([[1.0]]), 3.0, 4)
    assert traj.first_index == 1
    assert traj.at("x_ag", 1)[0] == 3.0
    assert traj.sequences["x_md"].shape == (5, 1)


@mark.parametrize("kind", [VariantKind.VARIANT1, VariantKind.VARIANT2])
@mark.parametrize("trial", range(5))
def test_variants_match_canonical_nag_on_quadratics(kind, trial):
    rng = make_rng(42, trial)
    d = int(rng.integers(1, 4))
    beta = float(rng.uniform(0.5, 2.0))
    f = QuadraticObjective(random_psd(rng, d, 0.0, beta))
    assert check_variant_equivalence(kind, f, rng.normal(size=d), 100, beta=beta) <= 1e-9


@mark.parametrize("kind", [VariantKind.VARIANT1, VariantKind.VARIANT2])
def test_variants_match_on_first_hard_objective(kind):
    f = PiecewiseQuadratic(1.0, 1.0)
    assert check_variant_equivalence(kind, f, 0.0, 100) <= 1e-9


def test_canonical_has_no_identities():
    with raises(DomainError):
        check_variant_equivalence(VariantKind.CANONICAL, QuadraticObjective([[1.0]]), 0.0, 3)


@mark.parametrize("kind", ["canonical", "variant1", "variant2"])
def test_zero_objective_keeps_every_sequence_at_start(kind):
    x0 = np.array([1.5, -2.0])
    traj = run_variant(VariantConfig(kind, 1.0), ZeroObjective(2), x0, 10)
    for name, rows in traj.sequences.items():
        if name == "m":
            assert not rows.any()
            continue
        assert rows.shape == (11, 2), name
        assert np.allclose(rows, x0, rtol=1e-13, atol=0.0), name


@mark.parametrize("kind", [VariantKind.VARIANT1, VariantKind.VARIANT2])
def test_zero_objective_has_no_deviation(kind):
    assert check_variant_equivalence(kind, ZeroObjective(1), 0.0, 10) == 0.0
    assert check_variant_equivalence(kind, ZeroObjective(2), [1.5, -2.0], 10) <= 1e-13


def test_equivalence_needs_a_smoothness_constant():
    f = MaxAffineObjective(1.0, 0.1, 2)
    with raises(DomainError):
        check_variant_equivalence(VariantKind.VARIANT1, f, [0.0, 0.0], 5)
    with raises(DomainError):
        check_variant_equivalence(VariantKind.VARIANT1, ZeroObjective(1), 0.0, 5, beta=0.0)
