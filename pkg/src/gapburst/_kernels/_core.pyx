# cython: language_level=3
"""Compiled time-stepping kernels.

Mirrors ``pure.py`` operation for operation; keep the two files in sync.
"""

import numpy as np

cimport numpy as cnp

from gapburst.errors import StepSizeTooLarge
from gapburst._kernels.pure import _dde_stencils

cnp.import_array()

BACKEND_NAME = "cython"

FIELD_ZERO = 0
FIELD_CONSTANT = 1
FIELD_BATH = 2

MAX_ACCEPTED_STEPS = 50_000_000

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double cabs(double complex)


cdef inline double complex _field_env(
    double t,
    int kind,
    double complex f0c,
    double om_rel,
    double[:] b_om,
    double[:] b_amp,
    double[:] b_ph,
) nogil:
    cdef double complex acc = 0
    cdef Py_ssize_t m
    if kind == 0:
        return 0
    if kind == 1:
        return f0c * cexp(1j * om_rel * t)
    for m in range(b_om.shape[0]):
        acc = acc + b_amp[m] * cexp(1j * (b_om[m] * t - b_ph[m]))
    return acc


def averaged_rk4(
    double g,
    double alpha,
    double gamma1,
    double zeta,
    double w0,
    double s0,
    double dt,
    double t_end,
    double ds_max=0.01,
    double dw_frac=0.5,
    double rec_ds=1e-3,
    rec_dt=None,
    int max_halvings=60,
):
    cdef double rdt
    if rec_dt is None:
        rdt = t_end / 5000.0
    else:
        rdt = rec_dt

    cdef double t = 0.0
    cdef double w = w0
    cdef double s = s0
    cdef double h_base = dt
    cdef double h_cur = h_base
    cdef double h, w1, s1, dw_lim, t_rec, s_rec
    cdef double kw1, ks1, kw2, ks2, kw3, ks3, kw4, ks4, wa, sa
    cdef long n_acc = 0
    cdef long n_rej = 0
    cdef int halvings
    cdef bint easy

    t_out = [t]
    w_out = [w]
    s_out = [s]
    t_rec = t
    s_rec = s

    cdef double t_limit = t_end * (1.0 - 1e-12)
    while t < t_limit:
        h = h_cur
        if t + h > t_end:
            h = t_end - t
        halvings = 0
        while True:
            kw1 = -2.0 * (1.0 - g * s) * w + 2.0 * alpha * s * s
            ks1 = -g * w - alpha * s - gamma1 * (s - zeta)
            wa = w + 0.5 * h * kw1
            sa = s + 0.5 * h * ks1
            kw2 = -2.0 * (1.0 - g * sa) * wa + 2.0 * alpha * sa * sa
            ks2 = -g * wa - alpha * sa - gamma1 * (sa - zeta)
            wa = w + 0.5 * h * kw2
            sa = s + 0.5 * h * ks2
            kw3 = -2.0 * (1.0 - g * sa) * wa + 2.0 * alpha * sa * sa
            ks3 = -g * wa - alpha * sa - gamma1 * (sa - zeta)
            wa = w + h * kw3
            sa = s + h * ks3
            kw4 = -2.0 * (1.0 - g * sa) * wa + 2.0 * alpha * sa * sa
            ks4 = -g * wa - alpha * sa - gamma1 * (sa - zeta)
            w1 = w + (h / 6.0) * (kw1 + 2.0 * kw2 + 2.0 * kw3 + kw4)
            s1 = s + (h / 6.0) * (ks1 + 2.0 * ks2 + 2.0 * ks3 + ks4)
            dw_lim = w if w >= w1 else w1
            if dw_lim < 1e-300:
                dw_lim = 1e-300
            dw_lim = dw_frac * dw_lim
            if w1 >= 0.0 and abs(s1 - s) <= ds_max and abs(w1 - w) <= dw_lim:
                break
            halvings += 1
            if halvings > max_halvings:
                raise StepSizeTooLarge(
                    "averaged step collapsed below dt/2^%d at t=%.6g"
                    % (max_halvings, t)
                )
            h *= 0.5
            h_cur = h
            n_rej += 1
        dw_lim = w if w >= w1 else w1
        if dw_lim < 1e-300:
            dw_lim = 1e-300
        easy = (
            abs(s1 - s) <= 0.25 * ds_max
            and abs(w1 - w) <= 0.25 * dw_frac * dw_lim
        )
        t += h
        w = w1
        s = s1
        n_acc += 1
        if n_acc > MAX_ACCEPTED_STEPS:
            raise StepSizeTooLarge("averaged integration exceeded step budget")
        if easy:
            h_cur = 2.0 * h_cur
            if h_cur > h_base:
                h_cur = h_base
        if abs(s - s_rec) >= rec_ds or t - t_rec >= rdt:
            t_out.append(t)
            w_out.append(w)
            s_out.append(s)
            t_rec = t
            s_rec = s
    if t_out[len(t_out) - 1] != t:
        t_out.append(t)
        w_out.append(w)
        s_out.append(s)
    return (
        np.array(t_out),
        np.array(w_out),
        np.array(s_out),
        int(n_acc),
        int(n_rej),
    )


cdef void _rhs_ode(
    double complex[:, :] kmat,
    double complex[:] u,
    double[:] s,
    double t,
    double gamma1,
    double zeta,
    double complex decay,
    int field_kind,
    double complex f0c,
    double om_rel,
    double[:] b_om,
    double[:] b_amp,
    double[:] b_ph,
    double complex[:] du,
    double[:] ds,
    Py_ssize_t n,
) nogil:
    cdef Py_ssize_t i, j
    cdef double complex fe, acc, cu
    fe = _field_env(t, field_kind, f0c, om_rel, b_om, b_amp, b_ph)
    for i in range(n):
        acc = fe
        for j in range(n):
            acc = acc + kmat[i, j] * u[j]
        du[i] = -decay * u[i] + s[i] * acc
        cu = u[i].conjugate() * acc
        ds[i] = -gamma1 * (s[i] - zeta) - 4.0 * cu.real


def direct_rk4(
    cnp.ndarray[cnp.complex128_t, ndim=2] kmat_in,
    cnp.ndarray[cnp.complex128_t, ndim=1] u0,
    cnp.ndarray[cnp.float64_t, ndim=1] s0,
    double gamma1,
    double zeta,
    double delta,
    double dt,
    long n_steps,
    int field_kind,
    double complex f0c,
    double om_rel,
    cnp.ndarray[cnp.float64_t, ndim=1] b_om,
    cnp.ndarray[cnp.float64_t, ndim=1] b_amp,
    cnp.ndarray[cnp.float64_t, ndim=1] b_ph,
    long record_every=1,
    bint check_bloch=True,
    double bloch_tol=1e-3,
):
    cdef Py_ssize_t n = u0.shape[0]
    cdef double complex decay = 1j * delta + 1.0

    u_arr = u0.astype(complex).copy()
    s_arr = s0.astype(float).copy()
    ut = np.empty(n, dtype=complex)
    st = np.empty(n, dtype=float)
    du1 = np.empty(n, dtype=complex)
    du2 = np.empty(n, dtype=complex)
    du3 = np.empty(n, dtype=complex)
    du4 = np.empty(n, dtype=complex)
    ds1 = np.empty(n, dtype=float)
    ds2 = np.empty(n, dtype=float)
    ds3 = np.empty(n, dtype=float)
    ds4 = np.empty(n, dtype=float)

    cdef double complex[:, :] K = kmat_in
    cdef double complex[:] u = u_arr
    cdef double[:] s = s_arr
    cdef double complex[:] utv = ut
    cdef double[:] stv = st
    cdef double complex[:] d1 = du1
    cdef double complex[:] d2 = du2
    cdef double complex[:] d3 = du3
    cdef double complex[:] d4 = du4
    cdef double[:] e1 = ds1
    cdef double[:] e2 = ds2
    cdef double[:] e3 = ds3
    cdef double[:] e4 = ds4
    cdef double[:] bo = b_om
    cdef double[:] ba = b_amp
    cdef double[:] bp = b_ph

    cdef long n_rec = n_steps // record_every + 1
    cdef long extra = 1 if n_steps % record_every != 0 else 0
    t_out = np.empty(n_rec + extra)
    s_out = np.empty(n_rec + extra)
    w_out = np.empty(n_rec + extra)
    c_out = np.empty(n_rec + extra)
    cdef double[:] tov = t_out
    cdef double[:] sov = s_out
    cdef double[:] wov = w_out
    cdef double[:] cov = c_out

    cdef long m, idx
    cdef Py_ssize_t i
    cdef double t, ball, bi, sm, wm
    cdef double complex cm
    cdef double bloch_max = 0.0

    for i in range(n):
        bi = 4.0 * cabs(u[i]) ** 2 + s[i] * s[i]
        if bi > bloch_max:
            bloch_max = bi

    sm = 0.0
    wm = 0.0
    cm = 0
    for i in range(n):
        sm += s[i]
        wm += cabs(u[i]) ** 2
        cm = cm + u[i]
    tov[0] = 0.0
    sov[0] = sm / n
    wov[0] = wm / n
    cov[0] = cabs(cm / n) ** 2

    idx = 1
    for m in range(n_steps):
        t = m * dt
        _rhs_ode(K, u, s, t, gamma1, zeta, decay, field_kind,
                 f0c, om_rel, bo, ba, bp, d1, e1, n)
        for i in range(n):
            utv[i] = u[i] + 0.5 * dt * d1[i]
            stv[i] = s[i] + 0.5 * dt * e1[i]
        _rhs_ode(K, utv, stv, t + 0.5 * dt, gamma1, zeta, decay, field_kind,
                 f0c, om_rel, bo, ba, bp, d2, e2, n)
        for i in range(n):
            utv[i] = u[i] + 0.5 * dt * d2[i]
            stv[i] = s[i] + 0.5 * dt * e2[i]
        _rhs_ode(K, utv, stv, t + 0.5 * dt, gamma1, zeta, decay, field_kind,
                 f0c, om_rel, bo, ba, bp, d3, e3, n)
        for i in range(n):
            utv[i] = u[i] + dt * d3[i]
            stv[i] = s[i] + dt * e3[i]
        _rhs_ode(K, utv, stv, t + dt, gamma1, zeta, decay, field_kind,
                 f0c, om_rel, bo, ba, bp, d4, e4, n)
        ball = 0.0
        for i in range(n):
            u[i] = u[i] + (dt / 6.0) * (d1[i] + 2.0 * d2[i] + 2.0 * d3[i] + d4[i])
            s[i] = s[i] + (dt / 6.0) * (e1[i] + 2.0 * e2[i] + 2.0 * e3[i] + e4[i])
            bi = 4.0 * cabs(u[i]) ** 2 + s[i] * s[i]
            if bi > ball:
                ball = bi
        if ball > bloch_max:
            bloch_max = ball
        if check_bloch and ball > 1.0 + bloch_tol:
            raise StepSizeTooLarge(
                "Bloch radius %.6g at t=%.6g; reduce dt" % (ball, (m + 1) * dt)
            )
        if (m + 1) % record_every == 0 or m == n_steps - 1:
            sm = 0.0
            wm = 0.0
            cm = 0
            for i in range(n):
                sm += s[i]
                wm += cabs(u[i]) ** 2
                cm = cm + u[i]
            tov[idx] = (m + 1) * dt
            sov[idx] = sm / n
            wov[idx] = wm / n
            cov[idx] = cabs(cm / n) ** 2
            idx += 1
    return (
        t_out[:idx],
        s_out[:idx],
        w_out[:idx],
        c_out[:idx],
        u_arr,
        s_arr,
        bloch_max,
    )


def direct_rk4_dde(
    cnp.ndarray[cnp.complex128_t, ndim=2] kmat_in,
    gmat_in,
    cnp.ndarray[cnp.complex128_t, ndim=1] u0,
    cnp.ndarray[cnp.float64_t, ndim=1] s0,
    double gamma1,
    double zeta,
    double delta,
    double two_omega0,
    cnp.ndarray[cnp.float64_t, ndim=2] tau,
    double dt,
    long n_steps,
    int field_kind,
    double complex f0c,
    double om_rel,
    cnp.ndarray[cnp.float64_t, ndim=1] b_om,
    cnp.ndarray[cnp.float64_t, ndim=1] b_amp,
    cnp.ndarray[cnp.float64_t, ndim=1] b_ph,
    long record_every=1,
    bint check_bloch=True,
    double bloch_tol=1e-3,
):
    cdef Py_ssize_t n = u0.shape[0]
    cdef double complex decay = 1j * delta + 1.0
    cdef bint use_cr = gmat_in is not None

    nu = tau / dt
    offs_np, wts_np = _dde_stencils(nu)
    cdef long pad = int(np.ceil(nu.max())) + 4
    hist_np = np.empty((pad + n_steps + 1, n), dtype=complex)
    hist_np[: pad + 1] = u0

    if use_cr:
        g_np = np.ascontiguousarray(gmat_in, dtype=complex)
    else:
        g_np = np.zeros((n, n), dtype=complex)

    u_arr = u0.astype(complex).copy()
    s_arr = s0.astype(float).copy()
    ut = np.empty(n, dtype=complex)
    st = np.empty(n, dtype=float)
    du1 = np.empty(n, dtype=complex)
    du2 = np.empty(n, dtype=complex)
    du3 = np.empty(n, dtype=complex)
    du4 = np.empty(n, dtype=complex)
    ds1 = np.empty(n, dtype=float)
    ds2 = np.empty(n, dtype=float)
    ds3 = np.empty(n, dtype=float)
    ds4 = np.empty(n, dtype=float)

    cdef double complex[:, :] K = kmat_in
    cdef double complex[:, :] G = g_np
    cdef double complex[:, :] hist = hist_np
    cdef long[:, :, :] offs = offs_np
    cdef double[:, :, :, :] wts = wts_np
    cdef double complex[:] u = u_arr
    cdef double[:] s = s_arr
    cdef double complex[:] utv = ut
    cdef double[:] stv = st
    cdef double complex[:] d1 = du1
    cdef double complex[:] d2 = du2
    cdef double complex[:] d3 = du3
    cdef double complex[:] d4 = du4
    cdef double[:] e1 = ds1
    cdef double[:] e2 = ds2
    cdef double[:] e3 = ds3
    cdef double[:] e4 = ds4
    cdef double[:] bo = b_om
    cdef double[:] ba = b_amp
    cdef double[:] bp = b_ph

    cdef long n_rec = n_steps // record_every + 1
    cdef long extra = 1 if n_steps % record_every != 0 else 0
    t_out = np.empty(n_rec + extra)
    s_out = np.empty(n_rec + extra)
    w_out = np.empty(n_rec + extra)
    c_out = np.empty(n_rec + extra)
    cdef double[:] tov = t_out
    cdef double[:] sov = s_out
    cdef double[:] wov = w_out
    cdef double[:] cov = c_out

    cdef long m, idx, head, base
    cdef Py_ssize_t i, j
    cdef double t, ball, bi, sm, wm
    cdef double complex cm
    cdef double bloch_max = 0.0

    for i in range(n):
        bi = 4.0 * cabs(u[i]) ** 2 + s[i] * s[i]
        if bi > bloch_max:
            bloch_max = bi

    sm = 0.0
    wm = 0.0
    cm = 0
    for i in range(n):
        sm += s[i]
        wm += cabs(u[i]) ** 2
        cm = cm + u[i]
    tov[0] = 0.0
    sov[0] = sm / n
    wov[0] = wm / n
    cov[0] = cabs(cm / n) ** 2

    idx = 1
    for m in range(n_steps):
        t = m * dt
        head = pad + m
        _rhs_dde(K, G, use_cr, hist, offs, wts, 0, head,
                 u, s, t, gamma1, zeta, decay, two_omega0,
                 field_kind, f0c, om_rel, bo, ba, bp, d1, e1, n)
        for i in range(n):
            utv[i] = u[i] + 0.5 * dt * d1[i]
            stv[i] = s[i] + 0.5 * dt * e1[i]
        _rhs_dde(K, G, use_cr, hist, offs, wts, 1, head,
                 utv, stv, t + 0.5 * dt, gamma1, zeta, decay, two_omega0,
                 field_kind, f0c, om_rel, bo, ba, bp, d2, e2, n)
        for i in range(n):
            utv[i] = u[i] + 0.5 * dt * d2[i]
            stv[i] = s[i] + 0.5 * dt * e2[i]
        _rhs_dde(K, G, use_cr, hist, offs, wts, 1, head,
                 utv, stv, t + 0.5 * dt, gamma1, zeta, decay, two_omega0,
                 field_kind, f0c, om_rel, bo, ba, bp, d3, e3, n)
        for i in range(n):
            utv[i] = u[i] + dt * d3[i]
            stv[i] = s[i] + dt * e3[i]
        _rhs_dde(K, G, use_cr, hist, offs, wts, 2, head,
                 utv, stv, t + dt, gamma1, zeta, decay, two_omega0,
                 field_kind, f0c, om_rel, bo, ba, bp, d4, e4, n)
        ball = 0.0
        for i in range(n):
            u[i] = u[i] + (dt / 6.0) * (d1[i] + 2.0 * d2[i] + 2.0 * d3[i] + d4[i])
            s[i] = s[i] + (dt / 6.0) * (e1[i] + 2.0 * e2[i] + 2.0 * e3[i] + e4[i])
            hist[head + 1, i] = u[i]
            bi = 4.0 * cabs(u[i]) ** 2 + s[i] * s[i]
            if bi > ball:
                ball = bi
        if ball > bloch_max:
            bloch_max = ball
        if check_bloch and ball > 1.0 + bloch_tol:
            raise StepSizeTooLarge(
                "Bloch radius %.6g at t=%.6g; reduce dt" % (ball, (m + 1) * dt)
            )
        if (m + 1) % record_every == 0 or m == n_steps - 1:
            sm = 0.0
            wm = 0.0
            cm = 0
            for i in range(n):
                sm += s[i]
                wm += cabs(u[i]) ** 2
                cm = cm + u[i]
            tov[idx] = (m + 1) * dt
            sov[idx] = sm / n
            wov[idx] = wm / n
            cov[idx] = cabs(cm / n) ** 2
            idx += 1
    return (
        t_out[:idx],
        s_out[:idx],
        w_out[:idx],
        c_out[:idx],
        u_arr,
        s_arr,
        bloch_max,
    )


cdef void _rhs_dde(
    double complex[:, :] kmat,
    double complex[:, :] gmat,
    bint use_cr,
    double complex[:, :] hist,
    long[:, :, :] offs,
    double[:, :, :, :] wts,
    int stage_ci,
    long head,
    double complex[:] u,
    double[:] s,
    double t,
    double gamma1,
    double zeta,
    double complex decay,
    double two_omega0,
    int field_kind,
    double complex f0c,
    double om_rel,
    double[:] b_om,
    double[:] b_amp,
    double[:] b_ph,
    double complex[:] du,
    double[:] ds,
    Py_ssize_t n,
) nogil:
    cdef Py_ssize_t i, j
    cdef long base
    cdef double complex fe, acc, ud, cu, crf
    fe = _field_env(t, field_kind, f0c, om_rel, b_om, b_amp, b_ph)
    crf = 0
    if use_cr:
        crf = cexp(1j * two_omega0 * t)
    for i in range(n):
        acc = fe
        for j in range(n):
            if j == i:
                continue
            base = head + offs[stage_ci, i, j]
            ud = (
                wts[stage_ci, i, j, 0] * hist[base, j]
                + wts[stage_ci, i, j, 1] * hist[base + 1, j]
                + wts[stage_ci, i, j, 2] * hist[base + 2, j]
                + wts[stage_ci, i, j, 3] * hist[base + 3, j]
            )
            acc = acc + kmat[i, j] * ud
            if use_cr:
                acc = acc + crf * gmat[i, j] * ud.conjugate()
        du[i] = -decay * u[i] + s[i] * acc
        cu = u[i].conjugate() * acc
        ds[i] = -gamma1 * (s[i] - zeta) - 4.0 * cu.real
