import json
import math

import numpy as np
import pytest

from rhdexact.solutions import (
    HALF_PI, linear_scaling, linear_selfsimilar, log_eos_flow, make, monopole_dipole,
    monopole_quadrupole, plane_general, plane_scaling, spherical_outgoing, spherical_standing,
)
from rhdexact.verify import (
    StencilConfig, StencilError, convergence_order, convergence_orders, divergence_residual_axisym,
    divergence_residual_symmetric, field_residual, fit_order, perturbed, residuals, sample_points,
    scan_domain, vacuum_flux, verify_solution,
)

CFG = StencilConfig(refinement_levels=5)


def test_halving_ratio_about_four():
    sol = plane_scaling(1.0)
    r1 = field_residual(sol, (2.0, 0.5), h=1e-2)
    r2 = field_residual(sol, (2.0, 0.5), h=5e-3)
    assert r1 / r2 == pytest.approx(4.0, rel=0.05)


def test_constant_field_gradient_roundoff_only():
    sol = log_eos_flow(1.0, 0.0, 0.0, 2)
    est = convergence_order(sol, (2.0, 1.0), CFG, "field")
    assert est.floored or max(est.residuals) < 1e-12


def test_static_state_has_zero_divergence():
    sol = plane_general(lambda y: 1.0 + 0 * y, lambda y: 1.0 + 0 * y, region=lambda t, x: True)
    R0, R1 = divergence_residual_symmetric(sol, (1.0, 0.3))
    assert abs(R0) < 1e-13 and abs(R1) < 1e-13


def test_mondip_field_residual_small():
    assert abs(field_residual(monopole_dipole(1.0, 0.5), (2.0, 1.0, 1.0))) < 1e-3


@pytest.mark.parametrize("sol,pt", [(linear_scaling(1.0, 1 / 3, 2), (2.0, 1.0)),
                                    (spherical_standing(1.0, 3), (2.0, 1.5))])
def test_symmetric_divergence_second_order(sol, pt):
    for eq in ("energy", "momentum"):
        est = convergence_order(sol, pt, CFG, eq)
        assert est.floored or est.within(2.0, 0.3), est


def test_quadip_divergence_second_order():
    orders = convergence_orders(monopole_quadrupole(1.0, 0.5), (3.0, 1.0, math.pi / 3), CFG)
    assert set(orders) == {"field", "energy", "momentum", "angular"}
    assert all(o.within(2.0, 0.3) for o in orders.values())


def test_axisym_b0_matches_symmetric():
    dip = monopole_dipole(-4.0, 0.0)
    std = spherical_standing(1.0, 2)
    for pt in sample_points(std, 20, seed=4):
        Rt, Rr, _ = divergence_residual_axisym(dip, (pt[0], pt[1], HALF_PI))
        R0, R1 = divergence_residual_symmetric(std, pt)
        assert abs(Rt - R0) <= 1e-12 and abs(Rr - R1) <= 1e-12


@pytest.mark.parametrize("sid", ["plane-scaling", "standing-n2", "mondip", "quadip", "log-flow",
                                 "iterlog-flow", "linear-scaling", "selfsimilar"])
def test_negative_control_does_not_converge(sid):
    bad = perturbed(make(sid))
    for pt in sample_points(bad, 3, seed=2):
        orders = convergence_orders(bad, pt, CFG)
        assert all(o.order < 0.5 for o in orders.values()), orders


def test_fit_order_exact_power():
    hs = [0.1, 0.05, 0.025]
    assert fit_order(hs, [3 * h**2 for h in hs]).order == pytest.approx(2.0)
    assert fit_order(hs, [1e-18] * 3).floored


def test_order_needs_three_levels():
    with pytest.raises(ValueError):
        convergence_order(plane_scaling(), (2.0, 0.5), StencilConfig(refinement_levels=2))
    with pytest.raises(ValueError):
        StencilConfig(h=0.0)


def test_stencil_rejects_singular_crossing():
    with pytest.raises(StencilError):
        field_residual(plane_scaling(), (1.0, 0.999), h=0.9)


def test_sampling_reproducible():
    sol = make("mondip")
    assert sample_points(sol, 10, seed=3) == sample_points(sol, 10, seed=3)
    assert sample_points(sol, 10, seed=3) != sample_points(sol, 10, seed=4)


def test_verify_report_serializes():
    rep = verify_solution(make("standing-n4"), points=5, jobs=2)
    assert rep.passed and rep.estimated_order == pytest.approx(2.0, abs=0.1)
    d = rep.to_dict()
    assert d["schema"] == 1 and json.loads(json.dumps(d)) == d
    assert rep.to_dict() == verify_solution(make("standing-n4"), points=5, jobs=1).to_dict()


def test_verify_fails_negative_control():
    assert not verify_solution(perturbed(make("plane-scaling")), points=5).passed


def test_scan_mondip_all_physical():
    sol = monopole_dipole(1.0, 0.5)
    rows, rep = scan_domain(sol, (1.0, 3.0), lambda t: (0.02 * t, t * (1 - 1e-3)), (6, 6), theta=1.0)
    assert rep.fraction_physical == 1.0 and rep.passed
    assert all(r["class"] == "Physical" for r in rows)


def test_scan_outgoing_mixed():
    sol = spherical_outgoing(1.0, 0.1, 1)
    rows, rep = scan_domain(sol, (1.0, 3.0), lambda t: (0.01 * t, 0.99 * t), (8, 12))
    assert 0 < rep.fraction_physical < 1 and rep.passed


def test_scan_plane_scaling_outside_zero_physical():
    rows, rep = scan_domain(plane_scaling(), (1.0, 2.0), lambda t: (1.01 * t, 3 * t), (5, 5))
    assert rep.fraction_physical == 0.0 and rep.passed
    assert not any(r["in_domain"] for r in rows)


def test_vacuum_flux_matched_and_mismatched():
    rep = vacuum_flux(spherical_outgoing(1.0, 1.0, 1), samples=100)
    assert all(f <= 1e-12 * s for f, s in zip(rep.flux, rep.scale))
    rep = vacuum_flux(spherical_outgoing(1.0, 0.5, 1), samples=100, t1=1.0)
    for r, f, c in zip(rep.r, rep.flux, rep.closed_form):
        assert c == pytest.approx(0.25 / (2 * r**4), rel=1e-12)
        assert f == pytest.approx(c, rel=1e-8)


def test_selfsimilar_flux_decays_toward_cone():
    sol = linear_selfsimilar(1.0, 0.6, 2)
    fluxes = [vacuum_flux(sol, samples=20, r_range=(1.0, 2.0), offset=d).max_flux
              for d in (1e-1, 1e-3, 1e-5, 1e-7)]
    assert all(a > b for a, b in zip(fluxes, fluxes[1:]))


def test_vacuum_flux_needs_boundary():
    with pytest.raises(ValueError):
        vacuum_flux(plane_scaling())
