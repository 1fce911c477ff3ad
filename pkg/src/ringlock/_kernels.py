"""Low-level numba kernels for the phase dynamics.

This is the single authoritative implementation of the velocity field and
the classical RK4 stepper; everything in dynamics.py is a thin wrapper.  No
fastmath anywhere: the standard and telescopic schemes must produce
bit-identical trajectories whenever the coupling function is odd, which
requires IEEE-faithful arithmetic and a fixed order of accumulation.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def trig_eval(orders, cc, cs, c0, x):
    """Evaluate c0 + sum_i cc[i]*cos(orders[i]*x) + cs[i]*sin(orders[i]*x)."""
    acc = c0
    for i in range(orders.shape[0]):
        nx = orders[i] * x
        acc += cc[i] * np.cos(nx) + cs[i] * np.sin(nx)
    return acc


@njit(cache=True, nogil=True)
def velocity(orders, cc, cs, c0, omega, theta, is_ring, is_standard, out):
    """Phase velocities for one state, written into ``out``.

    Telescopic scheme: oscillator k feels +f(theta[k-1]-theta[k]) from the
    left and -f(theta[k]-theta[k+1]) from the right.  Standard scheme: it
    feels +f(theta[k-1]-theta[k]) and +f(theta[k+1]-theta[k]).  Rings add
    the seam pair (last, first) with the same rule; chains omit it.
    """
    n = theta.shape[0]
    for k in range(n):
        out[k] = omega[k]
    for k in range(n - 1):
        d = theta[k] - theta[k + 1]
        fd = trig_eval(orders, cc, cs, c0, d)
        out[k + 1] += fd
        if is_standard:
            out[k] += trig_eval(orders, cc, cs, c0, -d)
        else:
            out[k] -= fd
    if is_ring:
        t = theta[n - 1] - theta[0]
        ft = trig_eval(orders, cc, cs, c0, t)
        out[0] += ft
        if is_standard:
            out[n - 1] += trig_eval(orders, cc, cs, c0, -t)
        else:
            out[n - 1] -= ft


@njit(cache=True, nogil=True)
def _step(orders, cc, cs, c0, omega, theta, is_ring, is_standard, dt, k1, k2, k3, k4, tmp):
    """One classical RK4 step in place.  Returns False if theta went non-finite."""
    n = theta.shape[0]
    half = 0.5 * dt
    velocity(orders, cc, cs, c0, omega, theta, is_ring, is_standard, k1)
    for i in range(n):
        tmp[i] = theta[i] + half * k1[i]
    velocity(orders, cc, cs, c0, omega, tmp, is_ring, is_standard, k2)
    for i in range(n):
        tmp[i] = theta[i] + half * k2[i]
    velocity(orders, cc, cs, c0, omega, tmp, is_ring, is_standard, k3)
    for i in range(n):
        tmp[i] = theta[i] + dt * k3[i]
    velocity(orders, cc, cs, c0, omega, tmp, is_ring, is_standard, k4)
    sixth = dt / 6.0
    q = 0.0
    for i in range(n):
        theta[i] += sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])
        q += theta[i]
    return np.isfinite(q)


@njit(cache=True, nogil=True)
def rk4_steps(orders, cc, cs, c0, omega, theta, is_ring, is_standard, dt, nsteps):
    """Advance theta in place by nsteps fixed RK4 steps.  0 = ok, 1 = non-finite."""
    n = theta.shape[0]
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    tmp = np.empty(n)
    for _ in range(nsteps):
        if not _step(orders, cc, cs, c0, omega, theta, is_ring, is_standard, dt,
                     k1, k2, k3, k4, tmp):
            return 1
    return 0


@njit(cache=True, nogil=True)
def observe_window(orders, cc, cs, c0, omega, theta, is_ring, is_standard, dt,
                   nsteps, early_tol):
    """Step through an observation window, collecting lock statistics.

    Samples the state before the first step and after every step.  Tracks,
    over all samples: the largest deviation of any instantaneous velocity
    from the instantaneous spatial mean (``spread``); the largest range swept
    by any consecutive phase difference (``drift``); per-oscillator velocity
    extremes; and the running mean of the spatial-mean velocity.

    If early_tol > 0, returns as soon as spread or drift reaches early_tol,
    since the lock verdict is already decided negative.

    Returns (status, spread, drift, freq_mean, vmin, vmax, steps_done) with
    status 0 = window completed, 1 = state went non-finite, 2 = early exit.
    """
    n = theta.shape[0]
    v = np.empty(n)
    vmin = np.empty(n)
    vmax = np.empty(n)
    dmin = np.empty(n - 1)
    dmax = np.empty(n - 1)
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    tmp = np.empty(n)

    velocity(orders, cc, cs, c0, omega, theta, is_ring, is_standard, v)
    m = 0.0
    for i in range(n):
        m += v[i]
    m /= n
    spread = 0.0
    for i in range(n):
        vmin[i] = v[i]
        vmax[i] = v[i]
        s = abs(v[i] - m)
        if s > spread:
            spread = s
    for k in range(n - 1):
        d = theta[k] - theta[k + 1]
        dmin[k] = d
        dmax[k] = d
    drift = 0.0
    mean_sum = m
    samples = 1
    steps_done = 0

    for _ in range(nsteps):
        if not _step(orders, cc, cs, c0, omega, theta, is_ring, is_standard, dt,
                     k1, k2, k3, k4, tmp):
            return 1, spread, drift, mean_sum / samples, vmin, vmax, steps_done
        steps_done += 1
        velocity(orders, cc, cs, c0, omega, theta, is_ring, is_standard, v)
        m = 0.0
        for i in range(n):
            m += v[i]
        m /= n
        mean_sum += m
        samples += 1
        for i in range(n):
            if v[i] < vmin[i]:
                vmin[i] = v[i]
            if v[i] > vmax[i]:
                vmax[i] = v[i]
            s = abs(v[i] - m)
            if s > spread:
                spread = s
        for k in range(n - 1):
            d = theta[k] - theta[k + 1]
            if d < dmin[k]:
                dmin[k] = d
            if d > dmax[k]:
                dmax[k] = d
            r = dmax[k] - dmin[k]
            if r > drift:
                drift = r
        if early_tol > 0.0 and (spread >= early_tol or drift >= early_tol):
            return 2, spread, drift, mean_sum / samples, vmin, vmax, steps_done

    return 0, spread, drift, mean_sum / samples, vmin, vmax, steps_done
