"""Weighted path geometry: lengths, variations, Jacobians, reduced volume.

Oracles used here:
  * straight radial paths have weighted length |v|^2 * sigma_bar, so flat
    endpoint distance d at final time tau_bar gives length d^2 / (2 sqrt(tau_bar))
    and reduced distance d^2 / (4 tau_bar);
  * a planar circular arc of radius 1 from the pole to distance 2 has
    sigma-energy (arc length)^2 / sigma_bar = pi^2 / 2;
  * the round-sphere shooting Jacobian is sigma*(sin(|v| sigma)/|v|)^(n-1),
    checked against a finite difference of the shooting map built from the
    exact great-circle distance;
  * the hyperbolic global reduced volume collapses to (e^(4 tau) - 1)/(4 tau)
    by completing the square in the velocity integral;
  * the 3-d flat cylinder's global reduced volume is erf(eps/(4 sqrt(tau))).
"""

import numpy as np
import pytest
from scipy.special import erf

from harnacklab.models import FlatCylinder, build_model
from harnacklab.reduced import (
    SectorRegion,
    first_variation,
    identity_residuals,
    integrand_derivative_check,
    minimality_sets,
    reduced_distance,
    reduced_volume,
    shoot_path,
    sigma_of_tau,
    solid_angle,
    weighted_length,
)


@pytest.fixture(scope="module")
def flat():
    return build_model("euclidean", 3, r_max=60.0)


@pytest.fixture(scope="module")
def sphere():
    return build_model("sphere", 3, r_max=np.pi, rho=1.0)


@pytest.fixture(scope="module")
def hyper():
    return build_model("hyperbolic", 3, r_max=20.0, k=1.0)


def radial_samples(model, dist, tau_bar, k=101):
    taus = np.linspace(0.0, tau_bar, k)
    rs = dist * np.sqrt(taus / tau_bar)
    return np.column_stack([taus, rs, np.zeros(k)])


class TestWeightedLength:
    def test_flat_straight_segment(self, flat):
        val = weighted_length(flat, radial_samples(flat, 2.0, 1.0), 1.0)
        assert abs(val - 2.0) < 1e-9

    def test_flat_bulged_arc_is_longer(self, flat):
        # circle of radius 1 through the pole and the point at distance 2;
        # constant-speed parametrization in sigma, so energy = (pi)^2 / sigma_bar
        theta = np.linspace(np.pi, 0.0, 121)
        sig = 2.0 * (np.pi - theta) / np.pi
        taus = (sig / 2.0) ** 2
        rs = 2.0 * np.cos(theta / 2.0)
        psis = theta / 2.0
        val = weighted_length(flat, np.column_stack([taus, rs, psis]), 1.0)
        assert val > 2.0
        assert abs(val - np.pi**2 / 2.0) < 1e-4

    def test_sphere_radial_segment(self, sphere):
        val = weighted_length(sphere, radial_samples(sphere, 1.0, 1.0), 1.0)
        assert abs(val - 0.5) < 1e-9

    def test_rejects_bad_sampling(self, flat):
        good = radial_samples(flat, 1.0, 1.0)
        bad = good.copy()
        bad[3, 0] = bad[2, 0]
        with pytest.raises(ValueError):
            weighted_length(flat, bad, 1.0)
        off_pole = good.copy()
        off_pole[0, 1] = 0.5
        with pytest.raises(ValueError):
            weighted_length(flat, off_pole, 1.0)


class TestShootAndJacobian:
    def test_sigma_tau_consistency(self, sphere):
        path = shoot_path(sphere, 0.6, 0.7)
        assert abs(path.sigma_bar - 2.0 * np.sqrt(0.7)) < 1e-15
        assert abs((path.sigmas[-1] / 2.0) ** 2 - 0.7) < 1e-15
        assert np.allclose(np.diff(path.sigmas), path.sigmas[1], atol=1e-15)
        assert abs(path.length - 0.36 * path.sigma_bar) < 1e-14
        assert abs(path.reduced_dist - 0.36) < 1e-14

    def test_flat_jacobian_value(self, flat):
        path = shoot_path(flat, 1.3, 0.7)
        sb = sigma_of_tau(0.7)
        assert abs(path.jacobians[-1] - sb**3) < 1e-12 * sb**3
        still = shoot_path(flat, 0.0, 0.7)
        assert np.allclose(still.jacobians, still.sigmas**3, atol=1e-15)

    def test_sphere_jacobian_vanishes_at_fold(self, sphere):
        path = shoot_path(sphere, np.pi / 2.0, 1.0)
        assert path.conjugate_before_end
        assert abs(path.conjugate_sigma - 2.0) < 1e-12
        assert path.jacobians[-1] < 1e-6

    def test_jacobian_matches_shooting_map_differences(self, sphere):
        # finite-difference the shooting map at |v| sigma_bar = pi/2 using the
        # exact great-circle distance between perturbed endpoints
        tau_bar, v = 1.0, np.pi / 4.0
        sb = sigma_of_tau(tau_bar)
        r = v * sb
        delta = 1e-4
        d_radial = ((v + delta) * sb - (v - delta) * sb) / (2.0 * delta)
        gap = np.arccos(np.cos(r) ** 2 + np.sin(r) ** 2 * np.cos(2.0 * delta))
        d_tangent = gap / (2.0 * delta)
        fd = d_radial * (d_tangent / v) ** 2
        closed = shoot_path(sphere, v, tau_bar).jacobians[-1]
        assert abs(fd - closed) < 1e-5 * closed

    def test_minimizing_flag_past_fold(self, sphere):
        path = shoot_path(sphere, 1.75, 1.0)  # reach 3.5 > pi
        assert not path.minimizing
        assert abs(path.endpoint_distance - (2.0 * np.pi - 3.5)) < 1e-12


class TestFirstVariation:
    def test_critical_path_kills_interior_pairing(self, sphere):
        path = shoot_path(sphere, 0.6, 1.0, samples=161)
        s = path.sigmas
        y_r = np.sin(np.pi * s / path.sigma_bar)
        y_p = s * (path.sigma_bar - s)
        rep = first_variation(sphere, 1.0, s, path.radii, np.zeros_like(s), y_r, y_p)
        assert abs(rep.pairing) < 1e-8
        assert abs(rep.fd_derivative) < 1e-6

    def test_perturbed_path_has_nonzero_variation(self, sphere):
        path = shoot_path(sphere, 0.6, 1.0, samples=161)
        s = path.sigmas
        bump = np.sin(np.pi * s / path.sigma_bar)
        rs = path.radii + 0.01 * bump
        rep = first_variation(sphere, 1.0, s, rs, np.zeros_like(s), bump, np.zeros_like(s))
        assert abs(rep.pairing) > 1e-3
        assert abs(rep.pairing - rep.fd_derivative) < 2e-6

    def test_boundary_pairing_on_critical_path(self, flat):
        v = 0.8
        path = shoot_path(flat, v, 1.0, samples=161)
        s = path.sigmas
        y_r = s / path.sigma_bar
        rep = first_variation(flat, 1.0, s, path.radii, np.zeros_like(s), y_r, np.zeros_like(s))
        assert abs(rep.boundary_term - 2.0 * v) < 1e-12
        assert abs(rep.pairing - 2.0 * v) < 1e-8
        assert abs(rep.fd_derivative - 2.0 * v) < 1e-6


class TestMinimalitySets:
    def test_sphere_thresholds(self, sphere):
        sb = 2.0
        sets = minimality_sets(sphere, sb)
        assert sets.conj_flags == ("profile-zero",)
        assert abs(sets.conj_threshold[0] * sb - np.pi) < 1e-12
        assert sets.cut_flags == ("transition",)
        assert abs(sets.cut_threshold[0] * sb - np.pi) < 1e-6
        assert sets.nested()

    def test_flat_is_range_limited(self, flat):
        sets = minimality_sets(flat, 2.0)
        assert sets.conj_flags == ("range-limited",)
        assert sets.cut_flags == ("range-limited",)
        assert abs(sets.cut_threshold[0] - flat.r_max / 2.0) < 1e-12

    def test_cylinder_thresholds_by_direction(self):
        cyl = FlatCylinder(eps=1.0, flat_dim=2)
        sb = 2.0
        sets = minimality_sets(cyl, sb, angles=(0.0, np.pi / 3.0, np.pi / 2.0))
        reach = sets.cut_threshold * sb
        assert abs(reach[0] - 0.5) < 1e-9
        assert abs(reach[1] - 1.0) < 1e-9
        assert np.isinf(reach[2]) and sets.cut_flags[2] == "unbounded"
        assert all(f == "no-conjugate" for f in sets.conj_flags)

    def test_thresholds_decrease_with_sigma(self, sphere):
        cuts = [minimality_sets(sphere, sb).cut_threshold[0] for sb in (1.0, 1.5, 2.0)]
        assert cuts[0] > cuts[1] > cuts[2]


class TestReducedDistance:
    def test_flat_point(self, flat):
        res = reduced_distance(flat, 2.0, 1.0)
        assert abs(res.reduced_dist - 1.0) < 1e-12
        assert abs(res.v_mag - 1.0) < 1e-12

    def test_sphere_quarter_turn(self, sphere):
        res = reduced_distance(sphere, np.pi / 2.0, 0.25)
        assert abs(res.reduced_dist - (np.pi / 2.0) ** 2) < 1e-9
        assert np.all(np.diff(res.candidates) >= -1e-12)
        assert abs(res.candidates[0] - res.reduced_dist) < 1e-9

    def test_sphere_target_beyond_fold_rejected(self, sphere):
        with pytest.raises(ValueError):
            reduced_distance(sphere, 3.5, 1.0)

    def test_cylinder_half_turn(self):
        cyl = FlatCylinder(eps=1.0, flat_dim=2)
        res = reduced_distance(cyl, (np.pi, np.zeros(2)), 1.0)
        assert abs(res.reduced_dist - 1.0 / 16.0) < 1e-12
        assert abs(res.candidates[0] - 1.0 / 16.0) < 1e-12


class TestIdentityResiduals:
    def test_flat_all_vanish(self, flat):
        rep = identity_residuals(flat, [0.3, 1.0, 2.7], 0.8)
        assert np.max(rep.gradient_residual) < 1e-10
        assert np.max(rep.time_residual) < 1e-8
        assert np.max(np.abs(rep.laplacian_slack)) < 1e-9

    def test_curved_model_slacks(self, sphere, hyper):
        # exact values: n/(2 tau) - d^2 ric/(3 tau) - (1 + 2 d phi'(d)/phi(d))/(2 tau)
        rep_s = identity_residuals(sphere, [1.0], 0.5)
        want_s = 3.0 - 2.0 / 3.0 - (1.0 + 2.0 / np.tan(1.0))
        assert abs(rep_s.laplacian_slack[0] - want_s) < 1e-6
        rep_h = identity_residuals(hyper, [1.0], 0.5)
        want_h = 3.0 + 2.0 / 3.0 - (1.0 + 2.0 / np.tanh(1.0))
        assert abs(rep_h.laplacian_slack[0] - want_h) < 1e-6
        assert rep_s.laplacian_slack[0] > 0 and rep_h.laplacian_slack[0] > 0

    def test_cut_point_flagged(self, sphere):
        rep = identity_residuals(sphere, [np.pi], 0.5)
        assert rep.flags[0] == "outside-minimizing-range"
        assert np.isnan(rep.laplacian_slack[0])


class TestIntegrandDerivative:
    def test_flat_weight_is_constant(self, flat):
        rep = integrand_derivative_check(flat, 1.1, np.linspace(0.2, 3.0, 9))
        assert np.max(np.abs(rep.margins)) < 1e-10
        assert rep.extras["reduced_dist_drift"] < 1e-12
        assert rep.verdict == "holds"

    def test_sphere_weight_decreases(self, sphere):
        taus = np.linspace(0.05, 0.8, 9)
        rep = integrand_derivative_check(sphere, 1.0, taus)
        assert rep.verdict == "holds"
        assert rep.worst_margin > 0
        fd, an = rep.margins, rep.extras["analytic_derivative"]
        assert np.max(np.abs(fd + an)) < 1e-8 * max(1.0, np.max(np.abs(an)))
        # the comparison-weighted bound dominates the log-Jacobian rate
        slack = rep.extras["rate_bound_comparison_weighted"] - rep.extras["log_jacobian_rate"]
        assert np.min(slack) > 0

    def test_hyperbolic_weight_increases_but_gated(self, hyper):
        rep = integrand_derivative_check(hyper, 1.0, np.array([0.3, 0.5, 0.8]))
        assert rep.verdict == "hypothesis-not-met"
        assert rep.worst_margin < -1e-3
        assert "not asserted" in rep.hypothesis

    def test_conjugate_point_in_grid_rejected(self, sphere):
        with pytest.raises(ValueError):
            integrand_derivative_check(sphere, 1.0, np.array([0.5, 2.6]))


class TestReducedVolume:
    def test_flat_global_is_one(self, flat):
        series = reduced_volume(flat, [0.1, 1.0, 10.0], manifold_resolution=6001)
        assert np.max(np.abs(series.tangent - 1.0)) < 1e-4
        assert series.gap < 1e-4

    def test_flat_sector_constant_to_machine(self, flat):
        sector = SectorRegion(half_width=0.7, v_lo=0.2, v_hi=1.5)
        series = reduced_volume(flat, np.linspace(0.1, 10.0, 12), sector=sector)
        assert series.manifold is None
        assert np.max(np.abs(series.tangent - series.tangent[0])) < 1e-10

    def test_sphere_decreasing_and_cross_route_gap(self, sphere):
        series = reduced_volume(sphere, np.linspace(0.05, 2.0, 14))
        assert series.max_forward_difference < 0
        assert series.gap < 1e-4
        sector = SectorRegion(half_width=0.8)
        sec = reduced_volume(sphere, np.linspace(0.05, 2.0, 14), sector=sector)
        assert sec.max_forward_difference < 0
        frac = solid_angle(3, 0.8) / (4.0 * np.pi)
        assert np.max(np.abs(sec.tangent - frac * series.tangent)) < 1e-9

    def test_hyperbolic_closed_form_and_sector_growth(self, hyper):
        taus = np.array([0.3, 0.5, 0.8, 1.0])
        series = reduced_volume(hyper, taus)
        want = (np.exp(4.0 * taus) - 1.0) / (4.0 * taus)
        assert np.max(np.abs(series.tangent / want - 1.0)) < 1e-8
        assert np.max(np.abs(series.manifold / want - 1.0)) < 1e-6
        sec = reduced_volume(hyper, taus, sector=SectorRegion(half_width=0.5))
        assert np.min(np.diff(sec.tangent)) > 1e-3

    def test_cylinder_erf_both_routes(self):
        cyl = FlatCylinder(eps=1.0, flat_dim=2)
        taus = np.array([0.2, 0.7])
        series = reduced_volume(cyl, taus)
        want = erf(1.0 / (4.0 * np.sqrt(taus)))
        assert np.max(np.abs(series.tangent - want)) < 1e-9
        assert np.max(np.abs(series.manifold - want)) < 1e-9

    def test_empty_sector_window_rejected(self, sphere):
        sector = SectorRegion(half_width=0.5, v_lo=3.0, v_hi=4.0)
        with pytest.raises(ValueError):
            reduced_volume(sphere, [1.0], sector=sector)
