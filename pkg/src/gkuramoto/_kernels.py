"""Jit-compiled integration kernels.

These are performance-only fast paths for simulate(); the reference
implementations live in model.py and the two are cross-checked in tests.
Phases are wrapped into [0, 2*pi) after each full RK4 step, not between
stages.
"""

import numpy as np
from numba import njit

TWO_PI = 2.0 * np.pi


@njit(cache=True)
def _mean_field_deriv(theta, K, omega, c0, beta, cs, sn, out):
    n = theta.shape[0]
    zr = 0.0
    zi = 0.0
    for i in range(n):
        cs[i] = np.cos(theta[i])
        sn[i] = np.sin(theta[i])
        zr += cs[i]
        zi += sn[i]
    zr /= n
    zi /= n
    r = np.sqrt(zr * zr + zi * zi)
    big = np.arctan2(zi, zr)
    sa = r * np.sin(big - beta)
    ca = r * np.cos(big - beta)
    for i in range(n):
        # r*sin(Theta - beta - theta_i) expanded to reuse cos/sin of theta_i
        out[i] = omega + K[i] * (c0 + (sa * cs[i] - ca * sn[i]))


@njit(cache=True)
def mean_field_run(theta0, K, omega, c0, beta, dt, n_steps, record_stride):
    """RK4 integration of the mean-field model; records r, Theta every stride steps."""
    n = theta0.shape[0]
    theta = theta0.copy()
    n_rec = n_steps // record_stride + 1
    r_rec = np.empty(n_rec)
    th_rec = np.empty(n_rec)
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    tmp = np.empty(n)
    cs = np.empty(n)
    sn = np.empty(n)
    idx = 0
    ok = True
    for step in range(n_steps + 1):
        if step % record_stride == 0:
            zr = 0.0
            zi = 0.0
            for i in range(n):
                zr += np.cos(theta[i])
                zi += np.sin(theta[i])
            zr /= n
            zi /= n
            r_rec[idx] = np.sqrt(zr * zr + zi * zi)
            th_rec[idx] = np.arctan2(zi, zr)
            if not np.isfinite(r_rec[idx]):
                ok = False
                break
            idx += 1
        if step == n_steps:
            break
        _mean_field_deriv(theta, K, omega, c0, beta, cs, sn, k1)
        for i in range(n):
            tmp[i] = theta[i] + 0.5 * dt * k1[i]
        _mean_field_deriv(tmp, K, omega, c0, beta, cs, sn, k2)
        for i in range(n):
            tmp[i] = theta[i] + 0.5 * dt * k2[i]
        _mean_field_deriv(tmp, K, omega, c0, beta, cs, sn, k3)
        for i in range(n):
            tmp[i] = theta[i] + dt * k3[i]
        _mean_field_deriv(tmp, K, omega, c0, beta, cs, sn, k4)
        for i in range(n):
            theta[i] = (theta[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])) % TWO_PI
    return r_rec, th_rec, theta, ok


@njit(cache=True)
def _network_deriv(theta, data, indices, indptr, Krow, omega, c0, beta, cs, sn, out):
    n = theta.shape[0]
    for i in range(n):
        cs[i] = np.cos(theta[i])
        sn[i] = np.sin(theta[i])
    for i in range(n):
        ur = 0.0
        ui = 0.0
        for p in range(indptr[i], indptr[i + 1]):
            j = indices[p]
            w = data[p]
            ur += w * cs[j]
            ui += w * sn[j]
        # sum_j W_ij sin(theta_j - theta_i - beta) = Im(u * exp(-i(theta_i + beta)))
        cb = np.cos(theta[i] + beta)
        sb = np.sin(theta[i] + beta)
        out[i] = omega + c0 * Krow[i] + (ui * cb - ur * sb)


@njit(cache=True)
def network_run(theta0, data, indices, indptr, Krow, omega, c0, beta, dt, n_steps, record_stride):
    """RK4 integration of the sparse network model."""
    n = theta0.shape[0]
    theta = theta0.copy()
    n_rec = n_steps // record_stride + 1
    r_rec = np.empty(n_rec)
    th_rec = np.empty(n_rec)
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    tmp = np.empty(n)
    cs = np.empty(n)
    sn = np.empty(n)
    idx = 0
    ok = True
    for step in range(n_steps + 1):
        if step % record_stride == 0:
            zr = 0.0
            zi = 0.0
            for i in range(n):
                zr += np.cos(theta[i])
                zi += np.sin(theta[i])
            zr /= n
            zi /= n
            r_rec[idx] = np.sqrt(zr * zr + zi * zi)
            th_rec[idx] = np.arctan2(zi, zr)
            if not np.isfinite(r_rec[idx]):
                ok = False
                break
            idx += 1
        if step == n_steps:
            break
        _network_deriv(theta, data, indices, indptr, Krow, omega, c0, beta, cs, sn, k1)
        for i in range(n):
            tmp[i] = theta[i] + 0.5 * dt * k1[i]
        _network_deriv(tmp, data, indices, indptr, Krow, omega, c0, beta, cs, sn, k2)
        for i in range(n):
            tmp[i] = theta[i] + 0.5 * dt * k2[i]
        _network_deriv(tmp, data, indices, indptr, Krow, omega, c0, beta, cs, sn, k3)
        for i in range(n):
            tmp[i] = theta[i] + dt * k3[i]
        _network_deriv(tmp, data, indices, indptr, Krow, omega, c0, beta, cs, sn, k4)
        for i in range(n):
            theta[i] = (theta[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])) % TWO_PI
    return r_rec, th_rec, theta, ok
