import numpy as np
import pytest

from pumpkit.dataset import Dataset, load_fixture
from pumpkit.errors import DimensionMismatch, NotCyclicallyMonotone, PumpableUnderBudgets
from pumpkit.generators import generate_cobb_douglas_dataset, generate_quasilinear_dataset
from pumpkit.graph import build_graph, check_cyclical_monotonicity, check_garp
from pumpkit.pump import tmp, tmp_constrained
from pumpkit.utility import (
    PiecewiseLinearUtility,
    additive_utility,
    beta_conditions,
    build_constrained_rationalizer,
    build_optimal_permutation_rationalizer,
    build_quasilinear_rationalizer,
    evaluate_utility,
    verify_quasilinear,
)
from suites import random_suite

SINGLE = Dataset([[1.0, 1.0]], [[1.0, 1.0]])


def with_phi(u, phi):
    return PiecewiseLinearUtility(u.kind, phi, u.prices, u.anchors, u.budgets, u.beta, u.budget_tol)


def test_single_observation_quasilinear():
    u = build_quasilinear_rationalizer(SINGLE)
    assert u.phi.tolist() == [0.0]
    assert evaluate_utility(u, [2.0, 2.0]) == 2.0
    assert evaluate_utility(u, [1.0, 1.0]) == 0.0


def test_single_observation_constrained():
    u = build_constrained_rationalizer(SINGLE)
    assert u.phi.tolist() == [0.0] and u.beta == 2.0


def test_quasilinear_rejects_fig1b_with_witness():
    with pytest.raises(NotCyclicallyMonotone) as info:
        build_quasilinear_rationalizer(load_fixture("fig1b"))
    assert info.value.witness.nodes == (0, 1)


def test_constrained_rejects_fig1a_with_witness():
    with pytest.raises(PumpableUnderBudgets) as info:
        build_constrained_rationalizer(load_fixture("fig1a"))
    assert info.value.witness.nodes == (0, 1)


def test_budgets_below_own_spend_rejected():
    with pytest.raises(ValueError):
        build_constrained_rationalizer(load_fixture("fig1b"), budgets=[1.0, 8.0])


def test_generated_quasilinear_certificate():
    d = generate_quasilinear_dataset(7, 6, 3)
    cert = verify_quasilinear(build_quasilinear_rationalizer(d), d)
    assert cert.passed
    assert cert.sample_count == 6000
    assert cert.check("observed").worst <= 0.0


def test_fig1b_constrained_certificate_and_beta():
    d = load_fixture("fig1b")
    u = build_constrained_rationalizer(d)
    assert u.kind == "budget_constrained"
    assert u.beta == 4.0
    assert verify_quasilinear(u, d, constrained=True).passed
    x = np.array([[0.5, 1.5], [1.2, 0.4]])
    assert np.all(u(x) - x.sum(axis=1) <= u(d.bundles[0]) - 2.0 + 1e-12)


def test_beta_tight_to_one_doubling():
    d = load_fixture("fig1b")
    u = build_constrained_rationalizer(d)
    assert beta_conditions(u, d, u.beta) == (True, True)
    assert beta_conditions(u, d, u.beta / 2) != (True, True)


def test_beta_tightness_on_random_garp_data():
    seen = 0
    for d in random_suite() + tuple(generate_cobb_douglas_dataset(s, 6, 2) for s in range(40)):
        if not check_garp(build_graph(d)).satisfied:
            continue
        u = build_constrained_rationalizer(d)
        assert beta_conditions(u, d, u.beta) == (True, True)
        if u.beta > 2.0:
            seen += 1
            assert beta_conditions(u, d, u.beta / 2) != (True, True)
    assert seen > 0


def test_potentials_satisfy_bellman_optimality():
    for seed in range(30):
        d = generate_quasilinear_dataset(seed, 7, 3)
        u = build_quasilinear_rationalizer(d)
        w = d.expenditure.values - np.diag(d.expenditure.values)[:, None]
        assert np.all(u.phi[None, :] <= u.phi[:, None] + w)
        np.testing.assert_array_equal(u(d.bundles), u.phi)


def test_unconstrained_midpoint_concavity():
    rng = np.random.default_rng(0)
    for d in (generate_quasilinear_dataset(s, 5, 2) for s in range(10)):
        u = build_quasilinear_rationalizer(d)
        a = rng.uniform(0, 5, size=(500, 2))
        b = rng.uniform(0, 5, size=(500, 2))
        assert np.max((u(a) + u(b)) / 2 - u((a + b) / 2)) <= 1e-12


def test_constrained_utility_is_continuous_at_budget_line():
    d = load_fixture("example2")
    opt = build_optimal_permutation_rationalizer(d, constrained=True)
    u = opt.utility
    for t in range(d.T):
        p, m = d.prices[t], u.budgets[t]
        on_line = np.full(p.size, m / p.sum())  # equal quantities with p . x = m
        inside = on_line * (1 - 1e-9)
        outside = on_line * (1 + 1e-9)
        assert abs(u(outside) - u(inside)) < 1e-6


def test_optimal_rationalizer_fixtures():
    assert build_optimal_permutation_rationalizer(load_fixture("fig1a")).gap == pytest.approx(2.0, abs=1e-9)
    opt = build_optimal_permutation_rationalizer(load_fixture("fig1b"), constrained=True)
    assert opt.gap == pytest.approx(0.0, abs=1e-9)
    assert opt.pump.permutation == (0, 1)
    opt = build_optimal_permutation_rationalizer(load_fixture("example2"), constrained=True)
    assert opt.gap == pytest.approx(8.0, abs=1e-9)


def test_gap_equals_pump_on_random_suite():
    for d in random_suite():
        opt = build_optimal_permutation_rationalizer(d)
        assert abs(opt.gap - tmp(d).value) <= 1e-7
        opt_c = build_optimal_permutation_rationalizer(d, constrained=True)
        assert abs(opt_c.gap - tmp_constrained(d).value) <= 1e-7


def test_corrupted_phi_small_shift_is_still_valid_on_two_points():
    # with two observations any |phi_1 - phi_2| <= 1 rationalizes the permuted data
    opt = build_optimal_permutation_rationalizer(load_fixture("fig1a"))
    phi = opt.utility.phi.copy()
    phi[0] -= 1.0
    assert verify_quasilinear(with_phi(opt.utility, phi), opt.permuted).passed


def test_corrupted_phi_fails_sampled_check():
    opt = build_optimal_permutation_rationalizer(load_fixture("fig1a"))
    phi = opt.utility.phi.copy()
    phi[0] -= 3.0
    cert = verify_quasilinear(with_phi(opt.utility, phi), opt.permuted)
    assert not cert.passed
    assert not cert.check("sampled").passed


def test_corrupted_phi_fails_data_point_check():
    d = generate_quasilinear_dataset(7, 6, 3)
    u = build_quasilinear_rationalizer(d)
    phi = u.phi.copy()
    phi[0] -= 1.0
    cert = verify_quasilinear(with_phi(u, phi), d)
    assert not cert.check("observed").passed


def test_json_round_trip_is_exact():
    for d in (load_fixture("fig1b"), random_suite()[42]):
        if check_cyclical_monotonicity(build_graph(d)).satisfied:
            u = build_quasilinear_rationalizer(d)
        else:
            u = build_optimal_permutation_rationalizer(d, constrained=True).utility
        again = PiecewiseLinearUtility.from_json(u.to_json())
        np.testing.assert_array_equal(again.phi, u.phi)
        np.testing.assert_array_equal(again.prices, u.prices)
        assert again.beta == u.beta and again.kind == u.kind
        x = np.random.default_rng(1).uniform(0, 5, size=(50, d.num_goods))
        np.testing.assert_array_equal(again(x), u(x))


def test_json_schema():
    doc = build_constrained_rationalizer(load_fixture("fig1b")).to_dict()
    assert set(doc) >= {"kind", "pieces", "beta"}
    assert set(doc["pieces"][0]) == {"phi", "p", "x", "m"}


def test_evaluate_dimension_mismatch():
    u = build_quasilinear_rationalizer(SINGLE)
    with pytest.raises(DimensionMismatch):
        evaluate_utility(u, [1.0, 2.0, 3.0])


def test_additive_utility_sums_pieces():
    d = generate_quasilinear_dataset(3, 4, 2)
    u = build_quasilinear_rationalizer(d)
    assert additive_utility(u, d.bundles) == pytest.approx(float(np.sum(u(d.bundles))))


def test_certificate_to_dict_and_summary():
    d = generate_quasilinear_dataset(1, 3, 2)
    cert = verify_quasilinear(build_quasilinear_rationalizer(d), d, samples=50)
    doc = cert.to_dict()
    assert doc["pass"] is True and doc["dataset_hash"] == d.digest()
    assert cert.summary().startswith(f"certificate for dataset {d.digest()}: PASS")


def test_certificates_are_seeded():
    d = generate_quasilinear_dataset(2, 5, 3)
    u = build_quasilinear_rationalizer(d)
    assert verify_quasilinear(u, d, seed=4).to_dict() == verify_quasilinear(u, d, seed=4).to_dict()
