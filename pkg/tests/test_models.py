"""Geometry of the warped models: profiles, curvature, volumes, distances."""

import math

import numpy as np
import pytest

from harnacklab.models import (
    FlatCylinder,
    ball_volume,
    bishop_gromov_ratio,
    build_model,
    load_profile_table,
    sphere_area,
    unit_ball_volume,
)


def sphere_table(r_max, samples=6001):
    r = np.linspace(0.0, r_max, samples)
    return r, np.sin(r)


def test_reference_constants():
    assert math.isclose(sphere_area(2), 2 * math.pi, rel_tol=1e-14)
    assert math.isclose(sphere_area(3), 4 * math.pi, rel_tol=1e-14)
    assert math.isclose(unit_ball_volume(2), math.pi, rel_tol=1e-14)
    assert math.isclose(unit_ball_volume(3), 4 * math.pi / 3, rel_tol=1e-14)
    # consistency omega_{n-1} = n * omega_n
    for n in (2, 3, 4, 7):
        assert math.isclose(sphere_area(n), n * unit_ball_volume(n), rel_tol=1e-13)


def test_flat_ball_volume_exact():
    flat = build_model("euclidean", 3, 5.0)
    assert math.isclose(ball_volume(flat, 1.0), 4 * math.pi / 3, rel_tol=1e-12)
    assert math.isclose(ball_volume(flat, 2.0), 32 * math.pi / 3, rel_tol=1e-12)


def test_sphere_ball_volume_oracle():
    # V(r) = 2*pi*(r - sin r cos r) on the unit 3-sphere
    sph = build_model("sphere", 3, math.pi)
    for r in (0.5, 1.0, 2.0, math.pi):
        expect = 2 * math.pi * (r - math.sin(r) * math.cos(r))
        assert math.isclose(ball_volume(sph, r), expect, rel_tol=1e-10)
    assert math.isclose(ball_volume(sph, math.pi), 2 * math.pi**2, rel_tol=1e-10)


def test_sphere_extent_rejected():
    with pytest.raises(ValueError):
        build_model("sphere", 3, 4.0, rho=1.0)


def test_bad_kind_and_dimension():
    with pytest.raises(ValueError):
        build_model("torus", 3, 1.0)
    with pytest.raises(ValueError):
        build_model("euclidean", 1, 1.0)


def test_constant_curvature_values():
    sph = build_model("sphere", 3, math.pi)
    hyp = build_model("hyperbolic", 3, 5.0)
    flat = build_model("euclidean", 3, 5.0)
    for r in (0.3, 1.0, 2.0):
        c = sph.curvature(r)
        assert math.isclose(c.ric_radial, 2.0, abs_tol=1e-12)
        assert math.isclose(c.ric_tangential, 2.0, abs_tol=1e-12)
        assert math.isclose(c.sec_radial, 1.0, abs_tol=1e-12)
        assert math.isclose(c.sec_tangential, 1.0, abs_tol=1e-12)
        c = hyp.curvature(r)
        assert math.isclose(c.ric_radial, -2.0, abs_tol=1e-9)
        assert math.isclose(c.sec_tangential, -1.0, abs_tol=1e-9)
        c = flat.curvature(r)
        assert abs(c.ric_radial) < 1e-14 and abs(c.sec_tangential) < 1e-14


def test_curvature_consistency_by_finite_differences():
    """Profile derivatives must agree with direct differencing of phi."""
    hyp = build_model("hyperbolic", 3, 5.0)
    d = 5e-3
    for r in (0.5, 1.5, 3.0):
        # 4th-order stencil keeps both truncation and cancellation ~1e-9
        dd_fd = (
            -hyp.phi(r + 2 * d) + 16 * hyp.phi(r + d) - 30 * hyp.phi(r)
            + 16 * hyp.phi(r - d) - hyp.phi(r - 2 * d)
        ) / (12 * d**2)
        assert abs(dd_fd - hyp.ddphi(r)) <= 1e-8 * max(1.0, abs(hyp.ddphi(r)))


def test_ricci_certificates():
    assert build_model("euclidean", 3, 5.0).ricci_certificate >= -1e-12
    assert math.isclose(
        build_model("sphere", 3, math.pi).ricci_certificate, 2.0, abs_tol=1e-9
    )
    assert math.isclose(
        build_model("hyperbolic", 3, 5.0).ricci_certificate, -2.0, abs_tol=1e-9
    )
    assert not build_model("hyperbolic", 3, 5.0).nonnegative_ricci


def test_custom_profile_matches_sphere():
    table = sphere_table(math.pi)
    custom = build_model("custom", 3, math.pi - 0.05, profile=table)
    sph = build_model("sphere", 3, math.pi)
    for r in (0.5, 1.0, 2.5):
        assert abs(custom.curvature(r).ric_radial - sph.curvature(r).ric_radial) < 1e-6
    assert math.isclose(
        ball_volume(custom, 2.0), ball_volume(sph, 2.0), rel_tol=1e-8
    )


def test_custom_profile_pole_conditions():
    r = np.linspace(0.0, 2.0, 2001)
    with pytest.raises(ValueError):
        build_model("custom", 3, 1.5, profile=(r, np.sin(r) + 0.01))
    with pytest.raises(ValueError):
        build_model("custom", 3, 1.5, profile=(r, 0.9 * r))
    with pytest.raises(ValueError):
        build_model("custom", 3, 1.5, profile=(r, r * (1 - r)))  # vanishes inside


def test_profile_table_file(tmp_path):
    path = tmp_path / "profile.txt"
    r = np.linspace(0.0, 3.0, 3001)
    lines = ["# conical opening profile", "# r  phi"]
    lines += ["%.12f %.12f" % (ri, 0.8 * ri + 0.2 * ri / math.sqrt(1 + ri * ri)) for ri in r]
    path.write_text("\n".join(lines))
    rt, pt = load_profile_table(path)
    assert len(rt) == 3001
    model = build_model("custom", 3, 3.0, profile=str(path))
    assert model.nonnegative_ricci


def test_pole_regularity():
    # phi(h)/h -> 1 quadratically for every smooth-pole model
    for model in (
        build_model("sphere", 3, math.pi),
        build_model("hyperbolic", 3, 5.0),
        build_model("custom", 3, 3.0, profile=sphere_table(math.pi)),
    ):
        for h in (1e-1, 1e-2, 1e-3):
            assert abs(model.phi(h) / h - 1.0) <= h * h


def test_bishop_gromov_flat_is_one():
    flat = build_model("euclidean", 3, 8.0)
    ratios, sector, max_fwd = bishop_gromov_ratio(flat, np.linspace(0.5, 7.5, 15))
    assert np.max(np.abs(ratios - 1.0)) < 1e-12
    assert np.max(np.abs(sector - 1.0)) < 1e-14
    assert max_fwd <= 1e-12


def test_bishop_gromov_monotone_directions():
    sph = build_model("sphere", 3, math.pi)
    hyp = build_model("hyperbolic", 3, 5.0)
    grid = np.linspace(0.3, 3.0, 12)
    ratios, sector, max_fwd = bishop_gromov_ratio(sph, grid)
    assert max_fwd <= 1e-12  # non-increasing under Ric >= 0
    assert np.all(np.diff(sector) < 0)
    ratios_h, _, max_fwd_h = bishop_gromov_ratio(hyp, grid)
    assert max_fwd_h > 1e-3  # strictly grows in negative curvature
    assert np.all(ratios_h >= 1.0 - 1e-12)


def test_first_profile_zero():
    assert build_model("euclidean", 3, 5.0).first_profile_zero() is None
    z = build_model("sphere", 3, math.pi).first_profile_zero()
    assert math.isclose(z, math.pi, abs_tol=1e-12)
    z = build_model("sphere", 3, math.pi * 2.0, rho=2.0).first_profile_zero()
    assert math.isclose(z, 2 * math.pi, abs_tol=1e-12)


def test_sphere_pole_distance_folds():
    sph = build_model("sphere", 3, math.pi)
    assert math.isclose(sph.pole_distance(1.0), 1.0, abs_tol=1e-14)
    assert math.isclose(sph.pole_distance(4.0), 2 * math.pi - 4.0, abs_tol=1e-12)
    assert math.isclose(sph.pole_distance(2 * math.pi), 0.0, abs_tol=1e-12)


def test_cylinder_distances():
    cyl = FlatCylinder(eps=1.0, flat_dim=2)
    assert cyl.n == 3
    o = (0.0, np.zeros(2))
    assert math.isclose(cyl.distance(o, (math.pi, np.zeros(2))), 0.5, abs_tol=1e-14)
    assert math.isclose(cyl.distance(o, (0.0, np.array([3.0, 0.0]))), 3.0, abs_tol=1e-14)
    d = cyl.distance(o, (2 * math.pi * 0.05, np.array([1.0, 0.0])))
    assert math.isclose(d, math.hypot(1.0, 0.05), abs_tol=1e-14)
    # winding by a full turn changes nothing
    d2 = cyl.distance(o, (2 * math.pi * 1.05, np.array([1.0, 0.0])))
    assert math.isclose(d, d2, abs_tol=1e-12)


def test_cylinder_triangle_inequality():
    cyl = FlatCylinder(eps=0.7, flat_dim=2)
    rng = np.random.default_rng(7)
    for _ in range(50):
        pts = [(rng.uniform(0, 2 * math.pi), rng.normal(size=2)) for _ in range(3)]
        a, b, c = pts
        assert cyl.distance(a, c) <= cyl.distance(a, b) + cyl.distance(b, c) + 1e-12


def test_cylinder_image_distances():
    cyl = FlatCylinder(eps=1.0, flat_dim=2)
    d = cyl.image_distances((0.0, np.zeros(2)), (math.pi, np.zeros(2)), 2)
    assert np.allclose(sorted(d), [0.5, 0.5, 1.5, 1.5, 2.5])


def test_cylinder_ball_volume():
    cyl = FlatCylinder(eps=1.0, flat_dim=2)
    assert math.isclose(cyl.ball_volume(0.4), 4 * math.pi * 0.4**3 / 3, rel_tol=1e-14)
    assert math.isclose(
        cyl.ball_volume(10.0), math.pi * (100.0 - 1.0 / 12.0), rel_tol=1e-14
    )
