"""Backward-time path geometry: weighted lengths, reduced distance, reduced volume.

Paths from the pole are scored by the time-weighted energy

    length = integral sqrt(tau) * |dgamma/dtau|^2 dtau,   tau in (0, tau_bar],

and the substitution sigma = 2*sqrt(tau) turns this into an ordinary
Dirichlet energy in sigma.  Critical paths are therefore constant-speed
geodesics of the sigma parametrization; on a rotationally symmetric model
the ones leaving the pole are the radial lines r(sigma) = |v|*sigma of the
covering chart.  The reduced distance is length / (2*sqrt(tau_bar)) and
equals |v|^2 along a shot path.

The reduced volume integrates the kernel-weighted Jacobian of the shooting
map over initial velocities, truncated to velocities whose paths still
minimize at time tau_bar.  A manifold-side evaluation (kernel weight at the
true distance, integrated over the model) provides an independent route;
the two agree up to quadrature error, which is what the cross-check tests
pin down.

Everything here is quadrature and root finding on closed-form profiles, so
results are deterministic to the last bit for a fixed grid.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .models import FlatCylinder, WarpedModel, sphere_area
from .reporting import InequalityReport

# velocity magnitude beyond which exp(-|v|^2) is below 1e-31 and the
# reduced-volume integrand is numerically zero
VELOCITY_TAIL = 8.5


def sigma_of_tau(tau):
    return 2.0 * np.sqrt(tau)


@dataclass(frozen=True)
class WeightedPath:
    """A shot critical path, sampled on a uniform sigma grid."""

    model: object
    tau_bar: float
    sigma_bar: float
    v_mag: float
    direction: float
    sigmas: np.ndarray
    radii: np.ndarray
    length: float
    reduced_dist: float
    jacobians: np.ndarray
    conjugate_sigma: float = None
    minimizing: bool = True
    endpoint_distance: float = 0.0

    @property
    def conjugate_before_end(self):
        return self.conjugate_sigma is not None and self.conjugate_sigma <= self.sigma_bar * (1 + 1e-12)


def _require_warped(model):
    if not isinstance(model, WarpedModel):
        raise TypeError("this operation expects a rotationally symmetric model")


def _jacobian_values(model, v_mag, sigmas):
    """Shooting-map Jacobian along a radial path.

    The n-1 tangential variation fields have magnitude phi(|v| sigma)/|v|
    (phi solves the Jacobi equation with these initial conditions on a
    warped model) and the radial field has magnitude sigma, so

        J(sigma) = sigma * (phi(|v| sigma) / |v|)^(n-1),

    with the |v| -> 0 limit sigma^n.  On the flat cylinder J = sigma^n.
    """
    sigmas = np.asarray(sigmas, dtype=float)
    if isinstance(model, FlatCylinder):
        return sigmas**model.n
    n = model.n
    if v_mag < 1e-12:
        return sigmas**n
    return sigmas * (model.phi(v_mag * sigmas) / v_mag) ** (n - 1)


def shoot_path(model, v_mag, tau_bar, direction=0.0, samples=129):
    """Integrate the critical path with initial velocity magnitude v_mag.

    On warped models the path is the radial line of the covering chart and
    direction is the (irrelevant, recorded) slice angle.  On the cylinder,
    direction is the angle between the velocity and the circle axis.
    Returns a WeightedPath with the Jacobian track and minimality flag.
    """
    if v_mag < 0:
        raise ValueError("velocity magnitude must be nonnegative")
    if tau_bar <= 0:
        raise ValueError("tau_bar must be positive")
    sigma_bar = sigma_of_tau(tau_bar)
    sigmas = np.linspace(0.0, sigma_bar, samples)
    radii = v_mag * sigmas

    conjugate_sigma = None
    if isinstance(model, FlatCylinder):
        arc = radii[-1] * np.cos(direction)
        flat = radii[-1] * np.sin(direction)
        endpoint = (2.0 * np.pi * arc / model.eps, np.array([flat, 0.0][: model.flat_dim]))
        dist = model.distance((0.0, np.zeros(model.flat_dim)), endpoint)
    else:
        _require_warped(model)
        if radii[-1] > model.r_max + 1e-12 and model.first_profile_zero() is None:
            raise ValueError("path leaves the covering chart: raise r_max or lower |v|")
        zero = model.first_profile_zero()
        if zero is not None and v_mag > 1e-12:
            sc = zero / v_mag
            if sc <= sigma_bar * (1 + 1e-12):
                conjugate_sigma = float(sc)
        dist = float(model.pole_distance(radii[-1]))

    length = v_mag**2 * sigma_bar
    reduced = v_mag**2
    minimizing = abs(radii[-1] - dist) <= 1e-9 * (1.0 + radii[-1])
    return WeightedPath(
        model=model,
        tau_bar=float(tau_bar),
        sigma_bar=float(sigma_bar),
        v_mag=float(v_mag),
        direction=float(direction),
        sigmas=sigmas,
        radii=radii,
        length=float(length),
        reduced_dist=float(reduced),
        jacobians=_jacobian_values(model, v_mag, sigmas),
        conjugate_sigma=conjugate_sigma,
        minimizing=bool(minimizing),
        endpoint_distance=dist,
    )


def weighted_length(model, samples, tau_bar):
    """Time-weighted energy of a sampled slice curve from the pole.

    samples is a (k, 3) array of rows (tau, r, psi) with tau increasing to
    tau_bar and r(0+) -> 0; psi is the angle in a totally geodesic 2-plane
    through the pole, where the metric is dr^2 + phi(r)^2 dpsi^2.  The curve
    is re-sampled in sigma with a cubic spline and the energy
    integral (r_sigma^2 + phi^2 psi_sigma^2) dsigma evaluated by Simpson.
    """
    _require_warped(model)
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[1] != 3:
        raise ValueError("expected rows (tau, r, psi)")
    taus, rs, psis = samples.T
    if np.any(np.diff(taus) <= 0):
        raise ValueError("tau samples must be strictly increasing")
    if abs(taus[-1] - tau_bar) > 1e-12 * max(1.0, tau_bar):
        raise ValueError("last sample must sit at tau_bar")
    if taus[0] <= 1e-14 and abs(rs[0]) > 1e-8 * model.r_max:
        raise ValueError("curve must start at the pole")

    sig = sigma_of_tau(taus)
    if taus[0] > 1e-14:
        # samples that skip the singular initial time are bridged to the pole
        sig = np.concatenate(([0.0], sig))
        rs = np.concatenate(([0.0], rs))
        psis = np.concatenate(([psis[0]], psis))
    r_sp = CubicSpline(sig, rs)
    p_sp = CubicSpline(sig, psis)
    grid = np.linspace(0.0, sigma_of_tau(tau_bar), 2001)
    dr = r_sp(grid, 1)
    dp = p_sp(grid, 1)
    phi = model.phi(np.maximum(r_sp(grid), 0.0))
    return float(simpson(dr**2 + phi**2 * dp**2, x=grid))


@dataclass(frozen=True)
class FirstVariationReport:
    integral_term: float
    boundary_term: float
    pairing: float
    fd_derivative: float


def first_variation(model, tau_bar, sigmas, rs, psis, y_r, y_psi):
    """Discrete first variation of the weighted energy along a slice curve.

    Returns the boundary pairing 2<gamma_sigma, Y>(sigma_bar), the integral
    of 2<accel, Y> against dsigma, their difference (the variation pairing),
    and an independent centered finite difference of the energy under the
    perturbation gamma + eps*Y.  For a critical path the integral term
    vanishes and the pairing reduces to the boundary term.
    """
    _require_warped(model)
    sigmas = np.asarray(sigmas, dtype=float)
    rs = np.asarray(rs, dtype=float)
    psis = np.asarray(psis, dtype=float)
    y_r = np.asarray(y_r, dtype=float)
    y_psi = np.asarray(y_psi, dtype=float)
    if abs(y_r[0]) > 1e-14:
        raise ValueError("radial test-field component must vanish at the pole")

    r_sp = CubicSpline(sigmas, rs)
    p_sp = CubicSpline(sigmas, psis)
    yr_sp = CubicSpline(sigmas, y_r)
    yp_sp = CubicSpline(sigmas, y_psi)
    grid = np.linspace(sigmas[0], sigmas[-1], 4001)

    r = r_sp(grid)
    dr, ddr = r_sp(grid, 1), r_sp(grid, 2)
    dp, ddp = p_sp(grid, 1), p_sp(grid, 2)
    phi = model.phi(np.maximum(r, 0.0))
    dphi = model.dphi(np.maximum(r, 0.0))
    acc_r = ddr - phi * dphi * dp**2
    # angular acceleration paired through the metric weight phi^2; written
    # this way the phi'/phi Christoffel term never divides by phi(0) = 0
    acc_p_weighted = phi**2 * ddp + 2.0 * phi * dphi * dr * dp
    inner = acc_r * yr_sp(grid) + acc_p_weighted * yp_sp(grid)
    integral_term = 2.0 * float(simpson(inner, x=grid))

    boundary_term = 2.0 * float(dr[-1] * y_r[-1] + phi[-1] ** 2 * dp[-1] * y_psi[-1])
    pairing = boundary_term - integral_term

    taus = (sigmas / 2.0) ** 2
    eps = 1e-6 * max(1.0, float(np.max(np.abs(rs))))
    vals = []
    for s in (+eps, -eps):
        pert = np.column_stack([taus, rs + s * y_r, psis + s * y_psi])
        vals.append(weighted_length(model, pert, tau_bar))
    fd = (vals[0] - vals[1]) / (2.0 * eps)
    return FirstVariationReport(
        integral_term=integral_term,
        boundary_term=boundary_term,
        pairing=pairing,
        fd_derivative=float(fd),
    )


@dataclass(frozen=True)
class MinimalitySets:
    """Velocity-space thresholds at a fixed final sigma.

    conj_threshold: |v| at which the shooting Jacobian first degenerates.
    cut_threshold: largest |v| whose path still realizes the distance.
    Flags record when a threshold is only range-limited (no degeneration
    inside the covering chart) rather than an actual transition.
    """

    sigma_bar: float
    angles: np.ndarray
    conj_threshold: np.ndarray
    cut_threshold: np.ndarray
    conj_flags: tuple
    cut_flags: tuple

    def nested(self, tol=1e-9):
        return bool(np.all(self.cut_threshold <= self.conj_threshold * (1 + tol) + tol))


def _is_minimizing(model, v, sigma_bar, angle=0.0):
    if isinstance(model, FlatCylinder):
        arc = v * sigma_bar * np.cos(angle)
        flat = v * sigma_bar * np.sin(angle)
        endpoint = (2.0 * np.pi * arc / model.eps, np.concatenate(([flat], np.zeros(model.flat_dim - 1))))
        dist = model.distance((0.0, np.zeros(model.flat_dim)), endpoint)
    else:
        dist = float(model.pole_distance(v * sigma_bar))
    # distance routines are exact to a few ulps on these models, so the
    # equality test can be tight; it floors the threshold accuracy
    return abs(v * sigma_bar - dist) <= 1e-12 * (1.0 + v * sigma_bar)


def minimality_sets(model, sigma_bar, angles=(0.0,)):
    """Locate conjugate and cut thresholds in |v| by bisection.

    Bisection runs to 1e-10 relative in sigma-reach.  On models where the
    predicate never flips inside the chart the thresholds are reported at
    the chart edge and flagged range-limited (warped) or unbounded
    (cylinder directions with no circle component).
    """
    if sigma_bar <= 0:
        raise ValueError("sigma_bar must be positive")
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    conj = np.empty_like(angles)
    cut = np.empty_like(angles)
    conj_flags, cut_flags = [], []

    for i, ang in enumerate(angles):
        if isinstance(model, FlatCylinder):
            conj[i] = np.inf
            conj_flags.append("no-conjugate")
            ca = np.cos(ang)
            if ca <= 1e-12:
                cut[i] = np.inf
                cut_flags.append("unbounded")
                continue
            hi = (model.eps / ca) / sigma_bar
        else:
            _require_warped(model)
            zero = model.first_profile_zero()
            if zero is None:
                conj[i] = model.r_max / sigma_bar
                conj_flags.append("range-limited")
            else:
                conj[i] = zero / sigma_bar
                conj_flags.append("profile-zero")
            hi = conj[i] * 1.2 if zero is not None else model.r_max / sigma_bar

        if _is_minimizing(model, hi, sigma_bar, ang):
            cut[i] = hi
            cut_flags.append("range-limited")
            continue
        lo = 1e-12
        # predicate is monotone (true below the threshold, false above)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if _is_minimizing(model, mid, sigma_bar, ang):
                lo = mid
            else:
                hi = mid
            if (hi - lo) * sigma_bar <= 1e-12 * (1.0 + hi * sigma_bar):
                break
        cut[i] = 0.5 * (lo + hi)
        cut_flags.append("transition")

    return MinimalitySets(
        sigma_bar=float(sigma_bar),
        angles=angles,
        conj_threshold=conj,
        cut_threshold=cut,
        conj_flags=tuple(conj_flags),
        cut_flags=tuple(cut_flags),
    )


@dataclass(frozen=True)
class ShootResult:
    v_mag: float
    reduced_dist: float
    length: float
    distance: float
    candidates: np.ndarray


def reduced_distance(model, target, tau_bar):
    """Reduced distance to a target point by shooting.

    Warped models take target as a radius in [0, r_max] (sphere targets must
    lie within pi*rho of the pole); the shot velocity is recovered by root
    finding on the endpoint distance and checked against the identity
    reduced = distance^2 / (4 tau_bar).  Cylinder targets are
    (angle, flat offset) pairs and the winding images supply the candidate
    list explicitly.
    """
    sigma_bar = sigma_of_tau(tau_bar)
    if isinstance(model, FlatCylinder):
        base = (0.0, np.zeros(model.flat_dim))
        dists = model.image_distances(base, target, 8)
        cands = np.sort((dists / sigma_bar) ** 2)
        dist = float(np.min(dists))
        v = dist / sigma_bar
        return ShootResult(v, v * v, v * v * sigma_bar, dist, cands)

    _require_warped(model)
    target = float(target)
    zero = model.first_profile_zero()
    reach = model.r_max if zero is None else zero
    if target < 0 or target > reach + 1e-12:
        raise ValueError("target radius outside the minimizing range")

    def gap(v):
        return float(model.pole_distance(v * sigma_bar)) - target

    v_hi = reach / sigma_bar
    if target < 1e-14:
        v = 0.0
    elif abs(gap(v_hi)) < 1e-14:
        v = v_hi
    else:
        v = brentq(gap, 0.0, v_hi, xtol=1e-14, rtol=8.9e-16)
    dist = float(model.pole_distance(v * sigma_bar))
    reduced = v * v
    if abs(reduced - dist**2 / (4.0 * tau_bar)) > 1e-6 * max(1.0, reduced):
        raise RuntimeError("shot path does not realize the distance")
    if zero is not None:
        folds = np.arange(4)
        cands = ((2.0 * zero * folds[:, None] + np.array([1.0, -1.0]) * target).ravel() / sigma_bar) ** 2
        cands = np.sort(cands[cands >= 0])
    else:
        cands = np.array([reduced])
    return ShootResult(float(v), float(reduced), float(reduced * sigma_bar), dist, cands)


@dataclass(frozen=True)
class IdentityReport:
    radii: np.ndarray
    tau_bar: float
    gradient_residual: np.ndarray
    time_residual: np.ndarray
    laplacian_slack: np.ndarray
    flags: tuple


def _radial_ricci_integral(model, dist, quad_nodes=401):
    """(1 / tau_bar^{3/2}) * integral tau^{3/2} Ric(X, X) dtau, times tau_bar.

    Along the minimal radial path r(tau) = dist * sqrt(tau / tau_bar) the
    substitution s = sqrt(tau / tau_bar) collapses the weight to
    (dist^2 / 2) * integral s^2 ric_radial(dist * s) ds on [0, 1]; the
    tau_bar division is left to the caller so both normalizations of the
    Jacobian bound can reuse this.
    """
    if dist < 1e-14:
        return 0.0
    s = np.linspace(0.0, 1.0, quad_nodes)
    # the pole is a removable 0/0 of the curvature formulas and carries
    # weight s^2 = 0 here, so skip it rather than special-case it
    integrand = np.zeros_like(s)
    integrand[1:] = s[1:] ** 2 * model.curvature(dist * s[1:]).ric_radial
    return 0.5 * dist**2 * float(simpson(integrand, x=s))


def identity_residuals(model, radii, tau_bar, fd_step=1e-3):
    """Pointwise residuals of the three differential identities.

    For the reduced-distance field built from minimal paths the gradient
    identity tau*|grad|^2 = value and the time identity d(value)/dtau =
    -value/tau hold exactly; the Laplacian obeys a one-sided comparison
    whose slack (bound minus Laplacian) is reported, nonnegative whenever
    the radial Ricci curvature keeps a sign along the path.  Points at or
    beyond the cut radius are flagged and returned as NaN rows.
    """
    _require_warped(model)
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    zero = model.first_profile_zero()
    cut = model.r_max if zero is None else zero
    grad_res = np.full(radii.shape, np.nan)
    time_res = np.full(radii.shape, np.nan)
    slack = np.full(radii.shape, np.nan)
    flags = []

    def value(r, tau):
        return model.pole_distance(r) ** 2 / (4.0 * tau)

    n = model.n
    for i, r in enumerate(radii):
        if r >= cut - 1e-9 or r < 0:
            flags.append("outside-minimizing-range")
            continue
        flags.append("")
        h = fd_step * max(1.0, r)
        h = min(h, 0.49 * (cut - r), 0.49 * max(r, 1e-6) + 1e-12)
        dv = (value(r + h, tau_bar) - value(r - h, tau_bar)) / (2.0 * h)
        grad_res[i] = abs(tau_bar * dv * dv - value(r, tau_bar))
        # 1/tau is not polynomial, so the time difference needs a much
        # smaller step than the (quadratic-exact) radial one
        ht = 1e-5 * tau_bar
        dt = (value(r, tau_bar + ht) - value(r, tau_bar - ht)) / (2.0 * ht)
        time_res[i] = abs(tau_bar * dt + value(r, tau_bar))
        d2v = (value(r + h, tau_bar) - 2.0 * value(r, tau_bar) + value(r - h, tau_bar)) / h**2
        if r < 1e-12:
            lap = n * d2v
        else:
            lap = d2v + (n - 1) * (model.dphi(r) / model.phi(r)) * dv
        bound = n / (2.0 * tau_bar) - _radial_ricci_integral(model, r) / tau_bar
        slack[i] = bound - lap
    return IdentityReport(radii, float(tau_bar), grad_res, time_res, slack, tuple(flags))


def integrand_derivative_check(model, v_mag, taus, tol=1e-6):
    """Monotonicity of the kernel-weighted Jacobian along a fixed velocity.

    The quantity Q(tau) = exp(-reduced) * (4 pi tau)^(-n/2) * J(tau) must be
    non-increasing in tau when Ricci is nonnegative.  Margins are centered
    finite differences -dQ/dtau across the grid; extras carry the analytic
    derivative, the two normalizations of the log-Jacobian bound (the
    tau^{-3/2}-weighted one consistent with the Laplacian comparison, and
    the tau^{-1}-weighted variant), and the drift of the reduced distance
    along the path, which must vanish.  A conjugate point inside the grid
    is an error; the near-conjugate regime is legitimate and just drives
    the log-derivative strongly negative.
    """
    _require_warped(model)
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    if np.any(taus <= 0):
        raise ValueError("tau grid must be positive")
    n = model.n
    zero = model.first_profile_zero()
    smax = sigma_of_tau(np.max(taus))
    if zero is not None and v_mag * smax >= zero - 1e-12:
        raise ValueError("conjugate point inside the tau grid")
    if v_mag * smax > model.r_max + 1e-12:
        raise ValueError("path leaves the covering chart on this grid")

    def q_of(tau):
        sig = sigma_of_tau(tau)
        jac = _jacobian_values(model, v_mag, np.atleast_1d(sig))[0]
        return np.exp(-v_mag**2) * (4.0 * np.pi * tau) ** (-n / 2.0) * jac

    margins = np.empty_like(taus)
    analytic = np.empty_like(taus)
    bound_consistent = np.empty_like(taus)
    bound_literal = np.empty_like(taus)
    logj_rate = np.empty_like(taus)
    for i, t in enumerate(taus):
        dt = 1e-5 * t
        margins[i] = -(q_of(t + dt) - q_of(t - dt)) / (2.0 * dt)
        sig = sigma_of_tau(t)
        r = v_mag * sig
        if v_mag < 1e-12:
            rate = n / (2.0 * t)
        else:
            rate = 1.0 / (2.0 * t) + (n - 1) * v_mag * model.dphi(r) / (np.sqrt(t) * model.phi(r))
        logj_rate[i] = rate
        analytic[i] = q_of(t) * (rate - n / (2.0 * t))
        ric_part = _radial_ricci_integral(model, r)
        bound_consistent[i] = n / (2.0 * t) - ric_part / t
        bound_literal[i] = n / (2.0 * t) - ric_part * np.sqrt(t) / t

    # the reduced distance of the shot path, re-derived from the endpoint
    # distance at each time, must not drift: it is |v|^2 throughout
    along = model.pole_distance(v_mag * sigma_of_tau(taus)) ** 2 / (4.0 * taus)
    drift = float(np.max(np.abs(np.exp(-along) - np.exp(-v_mag**2))))

    return InequalityReport(
        check="kernel-weight-derivative",
        locations=np.full_like(taus, v_mag),
        taus=taus,
        margins=margins,
        tolerance=tol,
        hypothesis="ric-nonnegative" if model.nonnegative_ricci else "ric-sign-indefinite: monotonicity not asserted",
        hypothesis_met=model.nonnegative_ricci,
        resolution=len(taus),
        extras={
            "analytic_derivative": analytic,
            "log_jacobian_rate": logj_rate,
            "rate_bound_comparison_weighted": bound_consistent,
            "rate_bound_plain_weighted": bound_literal,
            "reduced_dist_drift": drift,
        },
    )


@dataclass(frozen=True)
class SectorRegion:
    """Angular cone plus radial velocity window in the tangent space."""

    half_width: float
    v_lo: float = 0.0
    v_hi: float = np.inf
    direction: float = 0.0

    def __post_init__(self):
        if not (0 < self.half_width <= np.pi):
            raise ValueError("half_width must lie in (0, pi]")
        if self.v_lo < 0 or self.v_hi <= self.v_lo:
            raise ValueError("need 0 <= v_lo < v_hi")


@dataclass(frozen=True)
class ReducedVolumeSeries:
    taus: np.ndarray
    tangent: np.ndarray
    manifold: np.ndarray = None
    sector: SectorRegion = None
    note: str = ""

    @property
    def gap(self):
        if self.manifold is None:
            return None
        return float(np.max(np.abs(self.tangent - self.manifold)))

    @property
    def max_forward_difference(self):
        return float(np.max(np.diff(self.tangent)))


def solid_angle(n, half_width):
    """Measure of an angular cone of the given half-width on S^(n-1)."""
    t = np.linspace(0.0, half_width, 2001)
    return sphere_area(n - 1) * float(simpson(np.sin(t) ** (n - 2), x=t))


def reduced_volume(model, taus, sector=None, resolution=2001, manifold_resolution=None):
    """Reduced volume over a tau grid, tangent side plus manifold cross-check.

    Tangent side: Simpson in |v| of the kernel-weighted Jacobian
    exp(-|v|^2) (4 pi tau)^(-n/2) J(tau, v), truncated at the cut threshold,
    times the angular measure (full sphere, or the sector's cone).  The
    |v| upper limit is held tau-independent whenever the chart allows it so
    that flat-model output is constant to machine precision.

    Manifold side (global regions only): the kernel weight at the true
    distance integrated over the model, on an independent radial grid, so
    the comparison exercises quadrature and cut handling rather than a
    shared code path.
    """
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    if np.any(taus <= 0):
        raise ValueError("tau grid must be positive")
    if resolution % 2 == 0:
        resolution += 1
    manifold_resolution = manifold_resolution or 2 * resolution + 1

    if isinstance(model, FlatCylinder):
        if sector is not None:
            raise ValueError("sector truncation on the cylinder is not supported")
        return _cylinder_reduced_volume(model, taus, resolution, manifold_resolution)

    _require_warped(model)
    n = model.n
    angular = sphere_area(n) if sector is None else solid_angle(n, sector.half_width)
    v_lo = 0.0 if sector is None else sector.v_lo
    v_hi = np.inf if sector is None else sector.v_hi

    tangent = np.empty_like(taus)
    note = ""
    for i, t in enumerate(taus):
        sig = sigma_of_tau(t)
        sets = minimality_sets(model, sig)
        cut = sets.cut_threshold[0]
        hi = min(v_hi, cut, VELOCITY_TAIL)
        if "range-limited" in sets.cut_flags and cut < VELOCITY_TAIL:
            note = "velocity tail range-limited by the chart"
        lo = min(v_lo, hi)
        if hi - lo < 1e-15:
            raise ValueError("empty velocity window after cut truncation")
        s = np.linspace(lo, hi, resolution)
        phi = model.phi(np.minimum(s * sig, model.r_max))
        integrand = np.exp(-s * s) * sig * phi ** (n - 1)
        tangent[i] = angular * (4.0 * np.pi * t) ** (-n / 2.0) * float(simpson(integrand, x=s))

    manifold = None
    if sector is None:
        zero = model.first_profile_zero()
        r_edge = model.r_max if zero is None else min(zero, model.r_max)
        manifold = np.empty_like(taus)
        r = np.linspace(0.0, r_edge, manifold_resolution)
        w = sphere_area(n) * model.phi(r) ** (n - 1)
        for i, t in enumerate(taus):
            kern = (4.0 * np.pi * t) ** (-n / 2.0) * np.exp(-r * r / (4.0 * t))
            manifold[i] = float(simpson(kern * w, x=r))

    return ReducedVolumeSeries(taus=taus, tangent=tangent, manifold=manifold, sector=sector, note=note)


def _cylinder_reduced_volume(cyl, taus, resolution, manifold_resolution):
    """Product quadrature on the circle factor times the flat factor.

    Tangent side integrates velocities over the minimizing window
    |v_arc| <= eps / (2 sigma); manifold side integrates the kernel weight
    over the fundamental domain.  Both collapse analytically to
    erf(eps / (4 sqrt(tau))), which the tests pin against these quadratures.
    """
    if cyl.flat_dim != 2:
        raise NotImplementedError("reduced volume implemented for the 3-dimensional cylinder")
    tangent = np.empty_like(taus)
    manifold = np.empty_like(taus)
    for i, t in enumerate(taus):
        sig = sigma_of_tau(t)
        a_hi = cyl.eps / (2.0 * sig)
        a = np.linspace(-min(a_hi, VELOCITY_TAIL), min(a_hi, VELOCITY_TAIL), resolution)
        ia = float(simpson(np.exp(-a * a), x=a))
        b = np.linspace(0.0, VELOCITY_TAIL, resolution)
        ib = float(simpson(np.exp(-b * b) * 2.0 * np.pi * b, x=b))
        tangent[i] = np.pi ** (-1.5) * ia * ib

        arc = np.linspace(-0.5 * cyl.eps, 0.5 * cyl.eps, manifold_resolution)
        ka = float(simpson(np.exp(-arc * arc / (4.0 * t)), x=arc))
        x = np.linspace(0.0, VELOCITY_TAIL * sig, manifold_resolution)
        kx = float(simpson(np.exp(-x * x / (4.0 * t)) * 2.0 * np.pi * x, x=x))
        manifold[i] = (4.0 * np.pi * t) ** (-1.5) * ka * kx
    return ReducedVolumeSeries(taus=taus, tangent=tangent, manifold=manifold, sector=None)
