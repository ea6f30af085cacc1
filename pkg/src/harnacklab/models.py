"""Rotationally symmetric model geometries.

A warped model is the metric  dr^2 + phi(r)^2 g_{S^{n-1}}  on a geodesic ball
around a pole, described entirely by the warping profile phi.  Closed-form
profiles cover the constant-curvature cases; arbitrary profiles come in as
sampled tables and are interpolated by cubic splines (second derivatives from
the spline, which is stable near the pole).  A flat cylinder S^1(eps) x R^{n-1}
is kept as a separate type since its distance function needs winding images.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq
from scipy.special import gamma

KINDS = ("euclidean", "sphere", "hyperbolic", "custom")

# Tolerance for the smooth-pole conditions phi(0)=0, phi'(0)=1 on custom tables.
POLE_TOL = 1e-6


def sphere_area(n):
    """Area of the unit (n-1)-sphere in R^n."""
    return 2.0 * np.pi ** (n / 2.0) / gamma(n / 2.0)


def unit_ball_volume(n):
    """Volume of the unit ball in R^n."""
    return np.pi ** (n / 2.0) / gamma(n / 2.0 + 1.0)


@dataclass(frozen=True)
class CurvatureSample:
    """Curvature entries of a warped model at one radius."""

    r: float
    ric_radial: float
    ric_tangential: float
    sec_radial: float
    sec_tangential: float


@dataclass(frozen=True)
class WarpedModel:
    """Immutable warped-product model; safe to share across workers."""

    kind: str
    n: int
    r_max: float
    phi: object
    dphi: object
    ddphi: object
    ricci_certificate: float
    certificate_nodes: int
    params: dict = field(default_factory=dict)

    def curvature(self, r):
        """Curvature sample at radius r (vectorized over r)."""
        r = np.asarray(r, dtype=float)
        p = self.phi(r)
        dp = self.dphi(r)
        ddp = self.ddphi(r)
        sec_rad = -ddp / p
        sec_tan = (1.0 - dp * dp) / (p * p)
        ric_rad = (self.n - 1) * sec_rad
        ric_tan = sec_rad + (self.n - 2) * sec_tan
        if r.ndim == 0:
            return CurvatureSample(
                float(r), float(ric_rad), float(ric_tan), float(sec_rad), float(sec_tan)
            )
        return CurvatureSample(r, ric_rad, ric_tan, sec_rad, sec_tan)

    @property
    def nonnegative_ricci(self):
        return self.ricci_certificate >= -1e-12

    def first_profile_zero(self):
        """First positive zero of phi in (0, r_max], or None.

        The tangential Jacobi factor along a unit-speed radial geodesic is
        phi itself, so this locates the first conjugate radius.
        """
        if self.kind == "sphere":
            z = np.pi * self.params["rho"]
            return z if z <= self.r_max + 1e-12 else None
        rr = np.linspace(0.0, self.r_max, 4097)[1:]
        vals = self.phi(rr)
        sign = np.signbit(vals)
        if not sign.any():
            return None
        k = int(np.argmax(sign))
        lo = rr[k - 1] if k > 0 else rr[0] / 2.0
        return brentq(self.phi, lo, rr[k], xtol=1e-14)

    def pole_distance(self, r_cover):
        """Distance from the pole to the point at covering radius r_cover.

        Inside the polar chart the distance is the radius itself; on a sphere
        a covering radius past pi*rho folds back across the antipode.
        """
        r_cover = np.asarray(r_cover, dtype=float)
        if self.kind == "sphere":
            half = np.pi * self.params["rho"]
            return half - np.abs(np.mod(r_cover, 2.0 * half) - half)
        return r_cover


def load_profile_table(path):
    """Read a two-column (r, phi) plain-text table; '#' starts a comment."""
    data = np.loadtxt(path, comments="#")
    if data.ndim != 2 or data.shape[1] != 2:
        raise ValueError("profile table must have exactly two columns (r, phi)")
    return data[:, 0], data[:, 1]


def build_model(kind, n, r_max, profile=None, rho=1.0, k=1.0, certificate_nodes=2048):
    """Construct a WarpedModel with evaluable phi, phi', phi''.

    Parameters
    ----------
    kind : one of  euclidean | sphere | hyperbolic | custom.
    n : dimension, >= 2.
    r_max : radial extent of the model.
    profile : for kind="custom", either a path to a two-column text table or
        a pair of arrays (r, phi); interpolated by a cubic spline.
    rho : sphere radius (kind="sphere").
    k : hyperbolic scale, phi = sinh(k r)/k (kind="hyperbolic").
    certificate_nodes : grid size for the Ricci-sign certificate (the
        certificate is a grid minimum, not a proof).
    """
    if kind not in KINDS:
        raise ValueError("unknown model kind %r" % (kind,))
    if n < 2:
        raise ValueError("dimension must be >= 2")
    if r_max <= 0:
        raise ValueError("r_max must be positive")
    params = {}

    if kind == "euclidean":
        phi = lambda r: np.asarray(r, dtype=float) + 0.0
        dphi = lambda r: np.ones_like(np.asarray(r, dtype=float))
        ddphi = lambda r: np.zeros_like(np.asarray(r, dtype=float))
    elif kind == "sphere":
        if rho <= 0:
            raise ValueError("sphere radius must be positive")
        if r_max > np.pi * rho + 1e-12:
            raise ValueError("sphere model cannot extend beyond pi*rho")
        params["rho"] = float(rho)
        phi = lambda r: rho * np.sin(np.asarray(r, dtype=float) / rho)
        dphi = lambda r: np.cos(np.asarray(r, dtype=float) / rho)
        ddphi = lambda r: -np.sin(np.asarray(r, dtype=float) / rho) / rho
    elif kind == "hyperbolic":
        if k <= 0:
            raise ValueError("hyperbolic scale must be positive")
        params["k"] = float(k)
        phi = lambda r: np.sinh(k * np.asarray(r, dtype=float)) / k
        dphi = lambda r: np.cosh(k * np.asarray(r, dtype=float))
        ddphi = lambda r: k * np.sinh(k * np.asarray(r, dtype=float))
    else:
        if profile is None:
            raise ValueError("custom kind requires a profile table")
        if isinstance(profile, (str, bytes)) or hasattr(profile, "read"):
            r_tab, phi_tab = load_profile_table(profile)
        else:
            r_tab, phi_tab = (np.asarray(a, dtype=float) for a in profile)
        if r_tab[0] > 1e-12:
            raise ValueError("profile table must start at r = 0")
        if r_tab[-1] < r_max - 1e-12:
            raise ValueError("profile table does not cover r_max")
        spline = CubicSpline(r_tab, phi_tab)
        if abs(spline(0.0)) > POLE_TOL:
            raise ValueError("pole condition phi(0) = 0 violated by table")
        if abs(spline(0.0, 1) - 1.0) > POLE_TOL:
            raise ValueError("pole condition phi'(0) = 1 violated by table")
        interior = np.linspace(0.0, r_max, 4097)[1:]
        if np.min(spline(interior)) <= 0.0:
            raise ValueError("profile must stay positive on (0, r_max]")
        phi = spline
        dphi = spline.derivative(1)
        ddphi = spline.derivative(2)

    grid = np.linspace(0.0, r_max, certificate_nodes + 1)[1:]
    p = phi(grid)
    dp = dphi(grid)
    ddp = ddphi(grid)
    # an antipodal pole (phi -> 0 at r_max) makes the formulas 0/0 there;
    # curvature is smooth across it, so dropping such nodes loses nothing
    keep = np.abs(p) > 1e-9 * r_max
    p, dp, ddp = p[keep], dp[keep], ddp[keep]
    ric_rad = -(n - 1) * ddp / p
    ric_tan = -ddp / p + (n - 2) * (1.0 - dp * dp) / (p * p)
    certificate = float(min(ric_rad.min(), ric_tan.min()))

    return WarpedModel(
        kind=kind,
        n=int(n),
        r_max=float(r_max),
        phi=phi,
        dphi=dphi,
        ddphi=ddphi,
        ricci_certificate=certificate,
        certificate_nodes=int(certificate_nodes),
        params=params,
    )


def ball_volume(model, r, quad_nodes=2048):
    """V(r) = omega_{n-1} * integral_0^r phi(s)^{n-1} ds (composite Simpson)."""
    if not 0.0 < r <= model.r_max + 1e-12:
        raise ValueError("radius outside (0, r_max]")
    if quad_nodes % 2:
        quad_nodes += 1
    s = np.linspace(0.0, r, quad_nodes + 1)
    integrand = model.phi(s) ** (model.n - 1)
    return sphere_area(model.n) * simpson(integrand, x=s)


def bishop_gromov_ratio(model, r_grid, quad_nodes=2048):
    """Normalized volume ratios V(r) / (omega_n r^n) on an increasing grid.

    Returns (ratio series, sector series phi^{n-1}/r^{n-1}, max forward
    difference of the ratio series).  Flat models read exactly 1.
    """
    r_grid = np.asarray(r_grid, dtype=float)
    if np.any(np.diff(r_grid) <= 0):
        raise ValueError("r grid must be strictly increasing")
    wn = unit_ball_volume(model.n)
    ratios = np.array(
        [ball_volume(model, r, quad_nodes) / (wn * r**model.n) for r in r_grid]
    )
    sector = (model.phi(r_grid) / r_grid) ** (model.n - 1)
    max_fwd = float(np.max(np.diff(ratios))) if len(ratios) > 1 else 0.0
    return ratios, sector, max_fwd


@dataclass(frozen=True)
class FlatCylinder:
    """S^1(eps) x R^{flat_dim} with the product flat metric.

    eps is the circumference of the circle factor.  Ricci curvature is
    identically zero; distances are minima over circle winding images.
    """

    eps: float
    flat_dim: int

    @property
    def n(self):
        return self.flat_dim + 1

    def arc_coordinate(self, angle):
        """Arc-length position on the circle for an angle in radians."""
        return angle * self.eps / (2.0 * np.pi)

    def distance(self, a, b):
        """Distance between points given as (angle, flat-coordinate array)."""
        da = self.arc_coordinate(b[0] - a[0])
        # reduce the arc offset to [-eps/2, eps/2); images further out are
        # dominated by the k = 0 one, so the winding minimum is exact here
        da = (da + 0.5 * self.eps) % self.eps - 0.5 * self.eps
        dx = np.asarray(b[1], dtype=float) - np.asarray(a[1], dtype=float)
        return float(np.hypot(da, np.linalg.norm(dx)))

    def image_distances(self, a, b, n_images):
        """Distances to the 2*n_images+1 winding images (for kernel sums)."""
        da = self.arc_coordinate(b[0] - a[0])
        dx = np.linalg.norm(np.asarray(b[1], dtype=float) - np.asarray(a[1], dtype=float))
        ks = np.arange(-n_images, n_images + 1)
        return np.hypot(da + ks * self.eps, dx)

    def ball_volume(self, r):
        """Exact volume of the metric ball of radius r around any point.

        Integrates slab cross sections of the fundamental domain; for
        r >= eps/2 and flat_dim = 2 this is pi*(r^2 eps - eps^3/12).
        """
        if self.flat_dim != 2:
            raise NotImplementedError("exact ball volume implemented for n = 3")
        if r <= 0.5 * self.eps:
            return 4.0 * np.pi * r**3 / 3.0
        return np.pi * (r * r * self.eps - self.eps**3 / 12.0)
