"""Hot inner loops for the Crank-Nicolson finite-volume steppers.

Every radial solve in this package advances a conservation-form scheme

    d/dt ( scale(t) * c_i * u_i ) = f_i (u_{i+1} - u_i) - f_{i-1} (u_i - u_{i-1})

where ``c`` holds cell volumes, ``f`` holds face diffusion coefficients and
``scale`` is a time-dependent measure multiplier (identically 1 for static
metrics).  Crank-Nicolson averaging of the right side gives one tridiagonal
solve per step; summing the update telescopes the fluxes, so the discrete
mass ``scale * sum(c * u)`` is conserved to solver roundoff by construction.

Two interchangeable implementations are provided:

* a numba ``@njit`` kernel that runs the whole time loop in compiled code,
* a pure numpy/scipy path using LAPACK banded solves step by step.

The numba path is used when numba imports cleanly and the environment
variable ``HARNACKLAB_NO_NUMBA`` is unset (or "0").  Both paths implement
the same arithmetic; ``benchmarks/bench_kernels.py`` times them head to head.
"""

import os

import numpy as np
from scipy.linalg import solve_banded

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and os.environ.get("HARNACKLAB_NO_NUMBA", "0") != "1"

# Negative nodal values smaller than this fraction of max|u| are clamped to
# zero (Crank-Nicolson tail oscillation); anything larger aborts the solve.
NEG_CLAMP_REL = 1e-10


def _evolve_segment_py(u, cell_vol, face_coef, scales, dts):
    """Pure numpy/scipy twin of the jitted segment loop.

    Advances ``u`` in place through ``len(dts)`` Crank-Nicolson steps.
    ``scales`` has one more entry than ``dts`` (value before each step and
    after the last).  Returns 0 on success, or 1-based step index at which
    a non-clampable negative value appeared.
    """
    n = u.shape[0]
    ab = np.zeros((3, n))
    rhs = np.empty(n)
    for j in range(dts.shape[0]):
        dt = dts[j]
        s0 = scales[j]
        s1 = scales[j + 1]
        m0 = s0 * cell_vol / dt
        m1 = s1 * cell_vol / dt
        flux = face_coef * np.diff(u)
        rhs[:] = m0 * u
        rhs[:-1] += 0.5 * flux
        rhs[1:] -= 0.5 * flux
        ab[0, 1:] = -0.5 * face_coef
        ab[2, :-1] = -0.5 * face_coef
        ab[1, :] = m1
        ab[1, :-1] += 0.5 * face_coef
        ab[1, 1:] += 0.5 * face_coef
        u[:] = solve_banded((1, 1), ab, rhs)
        umin = u.min()
        if umin < 0.0:
            if umin < -NEG_CLAMP_REL * np.abs(u).max():
                return j + 1
            np.clip(u, 0.0, None, out=u)
    return 0


def _evolve_segment_loops(u, cell_vol, face_coef, scales, dts):
    # Same scheme written as explicit loops with an in-place Thomas solve;
    # this is the function handed to numba.njit below.
    n = u.shape[0]
    diag = np.empty(n)
    upper = np.empty(n)
    rhs = np.empty(n)
    for j in range(dts.shape[0]):
        dt = dts[j]
        s0 = scales[j]
        s1 = scales[j + 1]
        for i in range(n):
            m0 = s0 * cell_vol[i] / dt
            m1 = s1 * cell_vol[i] / dt
            acc = m0 * u[i]
            d = m1
            if i > 0:
                fl = face_coef[i - 1]
                acc -= 0.5 * fl * (u[i] - u[i - 1])
                d += 0.5 * fl
            if i < n - 1:
                fr = face_coef[i]
                acc += 0.5 * fr * (u[i + 1] - u[i])
                d += 0.5 * fr
            rhs[i] = acc
            diag[i] = d
        # Thomas forward sweep: eliminate the lower band (-0.5 * face_coef).
        upper[0] = -0.5 * face_coef[0] / diag[0]
        rhs[0] = rhs[0] / diag[0]
        for i in range(1, n):
            low = -0.5 * face_coef[i - 1]
            denom = diag[i] - low * upper[i - 1]
            if i < n - 1:
                upper[i] = -0.5 * face_coef[i] / denom
            rhs[i] = (rhs[i] - low * rhs[i - 1]) / denom
        u[n - 1] = rhs[n - 1]
        for i in range(n - 2, -1, -1):
            u[i] = rhs[i] - upper[i] * u[i + 1]
        umin = u[0]
        umax = 0.0
        for i in range(n):
            if u[i] < umin:
                umin = u[i]
            a = abs(u[i])
            if a > umax:
                umax = a
        if umin < 0.0:
            if umin < -NEG_CLAMP_REL * umax:
                return j + 1
            for i in range(n):
                if u[i] < 0.0:
                    u[i] = 0.0
    return 0


if USE_NUMBA:
    _evolve_segment_jit = numba.njit(cache=True)(_evolve_segment_loops)
    evolve_segment = _evolve_segment_jit
    BACKEND = "numba"
else:
    evolve_segment = _evolve_segment_py
    BACKEND = "numpy"


def evolve_with_snapshots(u0, cell_vol, face_coef, dts, scales, snap_after):
    """Run the stepper, recording the state after selected steps.

    Parameters
    ----------
    u0 : (n,) initial nodal values (not mutated).
    cell_vol : (n,) static cell volumes.
    face_coef : (n-1,) face diffusion coefficients.
    dts : (m,) time steps.
    scales : (m+1,) measure multiplier at each step boundary.
    snap_after : increasing int array of step counts (0 allowed for the
        initial state, m for the final one) at which to record ``u``.

    Returns the (len(snap_after), n) snapshot array.  Raises
    ``FloatingPointError`` if the scheme produces a significant negative
    value (positivity violation).
    """
    u = np.array(u0, dtype=float, copy=True)
    snaps = np.empty((len(snap_after), u.shape[0]))
    pos = 0
    done = 0
    for k, target in enumerate(snap_after):
        if target > done:
            status = evolve_segment(
                u, cell_vol, face_coef, scales[done : target + 1], dts[done:target]
            )
            if status != 0:
                raise FloatingPointError(
                    "positivity violated at step %d of segment ending %d"
                    % (status, target)
                )
            done = target
        snaps[pos] = u
        pos += 1
    return snaps


def discrete_mass(u, cell_vol, scale=1.0):
    """The mass functional the stepper conserves exactly."""
    return scale * float(np.dot(cell_vol, u))
