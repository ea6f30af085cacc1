"""Holomorphic graph curves in C^2: heat comparison and area growth.

A curve {(z, P(z))} with P either a monomial z^d or exp(z) - 1 pulls the
flat metric back to the conformal factor lam(z) = 1 + |P'(z)|^2 on the
chart.  Everything here is normalized so that the flat C^k heat kernel is
(pi t)^{-k} exp(-r^2 / t), i.e. the generator is a quarter of the real
Laplacian; under that convention the totally geodesic case P = z gives
exact equality in the kernel comparison (the factor-2 metric rescales the
coordinate and cancels on the diagonal), which pins the convention.

The comparison asserted is on-diagonal at the origin:

    margin(t) = (pi t)^{-1} - K(0, 0, t) >= 0,

K computed by the radial finite-volume solver on the curve (monomial
generators only; the exponential graph is not radial).  Area growth
A(rho) over {|z|^2 + |P(z)|^2 <= rho^2} feeds the density ratio
(pi rho^2) A(rho) / V0(rho), V0 = pi^2 rho^4 / 2, whose large-rho limit is
the degree-type density: 2 for a line, 2d for z^d, divergent for the
exponential graph (transcendental growth), each estimated with a
Richardson step whose exponent 2 - 2/d comes from the boundary relation
s^2 + s^{2d} = rho^2.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import brentq

from ._kernels import evolve_with_snapshots
from .kahler import conformal_chart_grid
from .reporting import InequalityReport

_GL_X = np.array([-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640])
_GL_W = np.array([0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665, 0.2369268850561891])

AMBIENT_COMPLEX_DIM = 2
INTRINSIC_COMPLEX_DIM = 1

# Hard budget for the exponential generator's region quadrature; rho beyond
# this is reported as a partial result, not computed.
EXP_RHO_BUDGET = 12.0


@dataclass(frozen=True)
class GraphCurve:
    """The graph {(z, P(z))} with its induced conformal factor."""

    kind: str
    degree: int = 1

    def __post_init__(self):
        if self.kind not in ("monomial", "exponential"):
            raise ValueError("kind must be 'monomial' or 'exponential'")
        if self.kind == "monomial" and (self.degree < 1 or self.degree != int(self.degree)):
            raise ValueError("monomial degree must be a positive integer")

    def generator(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind == "monomial":
            return z**self.degree
        return np.exp(z) - 1.0

    def generator_derivative(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind == "monomial":
            return self.degree * z ** (self.degree - 1)
        return np.exp(z)

    def conformal_factor(self, z):
        return 1.0 + np.abs(self.generator_derivative(z)) ** 2

    @property
    def is_radial(self):
        return self.kind == "monomial"

    def radial_factor(self, s):
        """lam as a function of |z|; only monomial generators are radial."""
        if not self.is_radial:
            raise ValueError("the exponential graph's factor is not radial")
        s = np.asarray(s, dtype=float)
        d = self.degree
        return 1.0 + d * d * s ** (2 * d - 2)


def monomial_curve(degree):
    return GraphCurve(kind="monomial", degree=int(degree))


def exponential_curve():
    return GraphCurve(kind="exponential")


@dataclass(frozen=True)
class ConformalMetric:
    """Evaluator bundle for the induced metric."""

    factor: object
    profile: object
    description: str


def induced_graph_metric(curve):
    """Pullback factor lam(z) = 1 + |P'(z)|^2, with radial profile if any."""
    profile = curve.radial_factor if curve.is_radial else None
    desc = f"monomial degree {curve.degree}" if curve.is_radial else "exponential graph"
    return ConformalMetric(factor=curve.conformal_factor, profile=profile, description=desc)


def intrinsic_distance(curve, s):
    """Geodesic distance from the origin along the radial direction.

    Cumulative 5-point Gauss-Legendre of sqrt(lam) over each grid
    interval; for the line this is sqrt(2) s exactly.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    pts = np.concatenate(([0.0], s))
    if np.any(np.diff(pts) < 0):
        raise ValueError("radii must be nonnegative and increasing")
    lo, hi = pts[:-1], pts[1:]
    half = 0.5 * (hi - lo)
    mids = 0.5 * (hi + lo)
    svals = mids[:, None] + half[:, None] * _GL_X[None, :]
    segs = half * (np.sqrt(curve.radial_factor(svals)) @ _GL_W)
    return np.cumsum(segs)


def _auto_chart_extent(curve, t_max):
    s = 1.0
    while intrinsic_distance(curve, np.array([s]))[0] ** 2 < 45.0 * t_max:
        s *= 1.25
        if s > 1e3:
            raise RuntimeError("cannot size the chart for this horizon")
    return s


def _graded_steps(t0, targets, ratio):
    """Step sizes growing like ratio * t, hitting each target exactly."""
    dts, snap_after = [], []
    t = t0
    for target in targets:
        while t < target * (1.0 - 1e-14):
            dt = min(ratio * t, target - t)
            dts.append(dt)
            t += dt
        t = target
        snap_after.append(len(dts))
    return np.asarray(dts), np.asarray(snap_after)


def _on_diagonal_kernel(curve, ts, s_max, resolution, seed_factor=0.1, step_ratio=0.02):
    """K(0, 0, t) for a monomial curve by the radial chart solver.

    Seeds the flat parametrix in intrinsic distance at t0 = seed_factor *
    min(ts), normalized to unit discrete mass, and reads off the origin
    node value at each requested time.
    """
    grid = conformal_chart_grid(curve.radial_factor, s_max, resolution)
    rg = intrinsic_distance(curve, grid.nodes[1:])
    rg = np.concatenate(([0.0], rg))
    if rg[-1] ** 2 < 40.0 * max(ts):
        raise ValueError("chart too small for the requested time horizon")
    t0 = seed_factor * min(ts)
    u0 = np.exp(-rg * rg / t0) / (np.pi * t0)
    u0 /= float(grid.cell_meas @ u0)
    dts, snap_after = _graded_steps(t0, ts, step_ratio)
    scales = np.ones(len(dts) + 1)
    snaps = evolve_with_snapshots(u0, grid.cell_meas, grid.face_coef, dts, scales, snap_after)
    masses = snaps @ grid.cell_meas
    if np.max(np.abs(masses - 1.0)) > 1e-6:
        raise RuntimeError("intrinsic kernel solve lost mass")
    return snaps[:, 0]


def subvariety_heat_comparison(curve, ts, s_max=None, resolution=None, method="auto", tol=1e-6, seed_factor=0.1):
    """On-diagonal flat-ambient versus intrinsic kernel comparison.

    method 'closed-form' uses the exact isometry value (pi t)^{-1},
    available only for the line; 'solve' runs the radial solver; 'auto'
    takes the closed form for the line and solves otherwise.  The default
    resolution puts the cell size well under the seed width
    sqrt(seed_factor * min(ts)).
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if np.any(ts <= 0) or np.any(np.diff(ts) <= 0):
        raise ValueError("t grid must be positive and increasing")
    if not curve.is_radial:
        raise ValueError("the on-diagonal solver needs a radial (monomial) generator")
    flat_diag = 1.0 / (np.pi * ts)
    line = curve.degree == 1
    if method == "auto":
        method = "closed-form" if line else "solve"
    if method == "closed-form":
        if not line:
            raise ValueError("closed-form diagonal is only known for the line")
        kernel = flat_diag.copy()
        note = "totally geodesic: intrinsic kernel equals the flat one exactly"
        resolution = 0
    elif method == "solve":
        if s_max is None:
            s_max = _auto_chart_extent(curve, float(ts[-1]))
        if resolution is None:
            seed_width = np.sqrt(seed_factor * float(ts[0]))
            resolution = max(3000, int(np.ceil(s_max / (0.07 * seed_width))))
        kernel = _on_diagonal_kernel(curve, ts, s_max, resolution, seed_factor=seed_factor)
        note = ""
    else:
        raise ValueError("method must be 'auto', 'closed-form' or 'solve'")
    return InequalityReport(
        check="subvariety-kernel-comparison",
        locations=np.zeros_like(ts),
        taus=ts,
        margins=flat_diag - kernel,
        tolerance=tol,
        hypothesis="holomorphic-graph-flat-ambient",
        hypothesis_met=True,
        resolution=resolution,
        note=note,
        extras={"kernel_diagonal": kernel, "flat_diagonal": flat_diag, "pi_t_kernel": np.pi * ts * kernel},
    )


# ------------------------------------------------------------- area growth


@dataclass(frozen=True)
class AreaSeries:
    """Intrinsic area of the curve inside ambient balls, with densities."""

    rhos: np.ndarray
    areas: np.ndarray
    ratios: np.ndarray
    nu_partial: np.ndarray
    note: str = ""

    def __post_init__(self):
        if not (len(self.rhos) == len(self.areas) == len(self.ratios) == len(self.nu_partial)):
            raise ValueError("series columns must align")


def _monomial_area(curve, rho, resolution):
    d = curve.degree
    f = lambda s: s * s + s ** (2 * d) - rho * rho
    s_star = brentq(f, 0.0, max(rho, rho ** (1.0 / d)) + 1.0)
    cells = max(64, resolution // 16)
    edges = np.linspace(0.0, s_star, cells + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mids = 0.5 * (edges[1:] + edges[:-1])
    svals = mids[:, None] + half[:, None] * _GL_X[None, :]
    return 2.0 * np.pi * float(np.sum(half * ((curve.radial_factor(svals) * svals) @ _GL_W)))


def _exp_slice_measure(x, c, scan=2000):
    """Length of {y >= 0 : y^2 - 2 e^x cos y <= c}, doubled for symmetry.

    The level set can be a union of intervals when e^x is large, so the
    scan isolates sign changes and brentq refines each crossing.
    """
    ex = np.exp(x)
    y_hi = np.sqrt(max(c + 2.0 * ex, 0.0)) + 1.0
    ys = np.linspace(0.0, y_hi, scan)
    g = ys * ys - 2.0 * ex * np.cos(ys) - c
    inside = g <= 0.0
    if not inside.any():
        return 0.0
    total = 0.0
    start = None
    fn = lambda y: y * y - 2.0 * ex * np.cos(y) - c
    for i in range(len(ys)):
        if inside[i] and start is None:
            start = ys[i] if i == 0 else brentq(fn, ys[i - 1], ys[i])
        elif not inside[i] and start is not None:
            total += brentq(fn, ys[i - 1], ys[i]) - start
            start = None
    if start is not None:
        total += ys[-1] - start
    return 2.0 * total


def _exp_area(rho, resolution):
    edge = lambda x: x * x + (np.exp(x) - 1.0) ** 2 - rho * rho
    x_lo = brentq(edge, -rho - 1.0, 0.0)
    x_hi = brentq(edge, 0.0, np.log(rho + 2.0))
    n = resolution + (resolution + 1) % 2  # odd node count for Simpson
    xs = np.linspace(x_lo, x_hi, n)
    vals = np.array(
        [(1.0 + np.exp(2.0 * x)) * _exp_slice_measure(x, rho * rho - x * x - np.exp(2.0 * x) - 1.0) for x in xs]
    )
    return float(simpson(vals, x=xs))


def area_function(curve, rhos, resolution=2000):
    """A(rho) over the ambient-ball slices, with density ratio columns.

    ratio = (pi rho^2) A / V0 with V0 = pi^2 rho^4 / 2; nu_partial is the
    running sup of the ratio.  Exponential-generator areas beyond the
    quadrature budget are left as NaN and flagged in the note.
    """
    rhos = np.atleast_1d(np.asarray(rhos, dtype=float))
    if np.any(rhos <= 0) or np.any(np.diff(rhos) <= 0):
        raise ValueError("rho grid must be positive and increasing")
    note = ""
    if curve.is_radial:
        areas = np.array([_monomial_area(curve, r, resolution) for r in rhos])
    else:
        areas = np.full(len(rhos), np.nan)
        for i, r in enumerate(rhos):
            if r > EXP_RHO_BUDGET:
                note = f"quadrature budget reached: partial series, rho <= {EXP_RHO_BUDGET:g}"
                continue
            areas[i] = _exp_area(r, resolution)
        if np.all(np.isnan(areas)):
            raise ValueError("no rho value within the quadrature budget")
    ratios = 2.0 * areas / (np.pi * rhos * rhos)
    nu_partial = np.fmax.accumulate(np.where(np.isnan(ratios), -np.inf, ratios))
    nu_partial[np.isneginf(nu_partial)] = np.nan
    return AreaSeries(rhos=rhos, areas=areas, ratios=ratios, nu_partial=nu_partial, note=note)


def admissible_radius_fraction(intrinsic_dim=1):
    """Largest rho'/rho allowed in the two-scale density comparison."""
    return 1.0 / np.sqrt(2.0 + 4.0 * intrinsic_dim)


@dataclass(frozen=True)
class RatioComparison:
    rho_small: float
    rho_big: float
    lhs: float
    rhs_basis: float

    @property
    def quotient(self):
        return self.lhs / self.rhs_basis


def ratio_monotonicity(curve, rho_small, rho_big, resolution=2000):
    """Two-scale density comparison at the admissible separation.

    Requires rho_small <= rho_big / sqrt(6) (intrinsic complex dimension
    1); the bound's constant is not pinned down, so the quotient is
    reported empirically rather than asserted.
    """
    if rho_small > admissible_radius_fraction() * rho_big:
        raise ValueError("scale pair violates the admissible-radius gate")
    series = area_function(curve, [rho_small, rho_big], resolution=resolution)
    v0 = 0.5 * np.pi**2 * series.rhos**4
    vals = series.areas * series.rhos**2 / v0
    return RatioComparison(
        rho_small=float(rho_small), rho_big=float(rho_big), lhs=float(vals[0]), rhs_basis=float(vals[1])
    )


@dataclass(frozen=True)
class LelongEstimate:
    value: float
    diverges: bool
    rhos: np.ndarray
    ratios: np.ndarray
    exponent: float
    note: str = ""


def lelong_number_estimate(curve, rho_max, resolution=2000):
    """Density at infinity from a rho-doubling ladder.

    Monomial generators get a one-step Richardson extrapolation with
    exponent 2 - 2/d (the density error of z^d decays like rho^{2/d - 2});
    an increasing ladder whose increments do not shrink is flagged as
    divergent and the partial sup is reported instead.
    """
    ladder = rho_max * np.array([0.125, 0.25, 0.5, 1.0])
    series = area_function(curve, ladder, resolution=resolution)
    r = series.ratios
    if np.any(np.isnan(r)):
        raise ValueError("rho_max exceeds the quadrature budget")
    inc = np.diff(r)
    growing = np.all(inc > 0) and inc[-1] > 1e-6 and inc[-1] >= 0.9 * inc[-2]
    if growing:
        return LelongEstimate(
            value=np.inf, diverges=True, rhos=ladder, ratios=r, exponent=np.nan,
            note="ratio increments non-shrinking: density diverges (partial sup %.4f)" % r.max(),
        )
    d = curve.degree if curve.is_radial else None
    if d == 1 or abs(inc[-1]) < 1e-12:
        return LelongEstimate(value=float(r[-1]), diverges=False, rhos=ladder, ratios=r, exponent=0.0)
    p = 2.0 - 2.0 / d
    value = r[-1] + (r[-1] - r[-2]) / (2.0**p - 1.0)
    return LelongEstimate(value=float(value), diverges=False, rhos=ladder, ratios=r, exponent=p)


# ----------------------------------------------- compact-factor volume growth


@dataclass(frozen=True)
class VolumeGrowthReport:
    """Ball volumes in the product of C with a round two-sphere."""

    rhos: np.ndarray
    volumes: np.ndarray
    normalized: np.ndarray
    limit: float

    @property
    def max_limit_gap(self):
        return float(np.max(np.abs(self.normalized - self.limit))) / self.limit


def volume_growth_consistency(rhos=(10.0, 20.0, 40.0), resolution=4001):
    """V(rho) / rho^2 stabilization for the product with a compact factor.

    The ball volume integrates the C-slice disk area over the sphere
    factor: V = 2 pi^2 * integral_0^{min(rho, pi)} (rho^2 - sigma^2)
    sin(sigma) d sigma, which tends to (pi * sphere area) * rho^2; the
    normalized series must approach 4 pi^2.
    """
    rhos = np.atleast_1d(np.asarray(rhos, dtype=float))
    vols = []
    for rho in rhos:
        sig = np.linspace(0.0, min(rho, np.pi), resolution)
        vols.append(2.0 * np.pi**2 * simpson((rho * rho - sig * sig) * np.sin(sig), x=sig))
    vols = np.asarray(vols)
    return VolumeGrowthReport(
        rhos=rhos, volumes=vols, normalized=vols / rhos**2, limit=4.0 * np.pi**2
    )
