"""Pure-Python/numpy time-stepping kernels.

Reference implementation of the hot loops.  The compiled backend in
``_core`` mirrors these routines operation for operation; behavior must be
kept identical when editing either file.

All kernels use classical fixed-stage fourth-order Runge-Kutta.  The
averaged kernel adds step halving/doubling around the burst, the direct
kernels integrate the per-atom amplitude equations with either instantaneous
(matrix) coupling or delayed coupling via an interpolated history buffer.
"""

import numpy as np

from ..errors import StepSizeTooLarge

BACKEND_NAME = "python"

FIELD_ZERO = 0
FIELD_CONSTANT = 1
FIELD_BATH = 2

# Hard cap on accepted averaged steps; prevents unbounded loops when the
# step controller is driven into pathological parameter corners.
MAX_ACCEPTED_STEPS = 50_000_000


def averaged_rk4(
    g,
    alpha,
    gamma1,
    zeta,
    w0,
    s0,
    dt,
    t_end,
    ds_max=0.01,
    dw_frac=0.5,
    rec_ds=1e-3,
    rec_dt=None,
    max_halvings=60,
):
    """Integrate the two-variable averaged system with step control.

    Steps are rejected and halved when the population moves by more than
    ds_max, when the coherence changes by more than dw_frac relative, or
    when the coherence would go negative.  Easy steps grow the step back
    toward the base dt.  Output is recorded on population change rec_ds or
    elapsed time rec_dt, whichever comes first, plus both endpoints.
    """
    if rec_dt is None:
        rec_dt = t_end / 5000.0

    def rhs(w, s):
        dw = -2.0 * (1.0 - g * s) * w + 2.0 * alpha * s * s
        ds = -g * w - alpha * s - gamma1 * (s - zeta)
        return dw, ds

    t = 0.0
    w = float(w0)
    s = float(s0)
    h_base = float(dt)
    h_cur = h_base
    t_out = [t]
    w_out = [w]
    s_out = [s]
    t_rec = t
    s_rec = s
    n_acc = 0
    n_rej = 0

    t_limit = t_end * (1.0 - 1e-12)
    while t < t_limit:
        h = h_cur
        if t + h > t_end:
            h = t_end - t
        halvings = 0
        while True:
            kw1, ks1 = rhs(w, s)
            kw2, ks2 = rhs(w + 0.5 * h * kw1, s + 0.5 * h * ks1)
            kw3, ks3 = rhs(w + 0.5 * h * kw2, s + 0.5 * h * ks2)
            kw4, ks4 = rhs(w + h * kw3, s + h * ks3)
            w1 = w + (h / 6.0) * (kw1 + 2.0 * kw2 + 2.0 * kw3 + kw4)
            s1 = s + (h / 6.0) * (ks1 + 2.0 * ks2 + 2.0 * ks3 + ks4)
            dw_lim = dw_frac * max(w, w1, 1e-300)
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
        easy = (
            abs(s1 - s) <= 0.25 * ds_max
            and abs(w1 - w) <= 0.25 * dw_frac * max(w, w1, 1e-300)
        )
        t += h
        w = w1
        s = s1
        n_acc += 1
        if n_acc > MAX_ACCEPTED_STEPS:
            raise StepSizeTooLarge("averaged integration exceeded step budget")
        if easy:
            h_cur = min(2.0 * h_cur, h_base)
        if abs(s - s_rec) >= rec_ds or t - t_rec >= rec_dt:
            t_out.append(t)
            w_out.append(w)
            s_out.append(s)
            t_rec = t
            s_rec = s
    if t_out[-1] != t:
        t_out.append(t)
        w_out.append(w)
        s_out.append(s)
    return (
        np.array(t_out),
        np.array(w_out),
        np.array(s_out),
        n_acc,
        n_rej,
    )


def _field_env(t, kind, f0c, om_rel, b_om, b_amp, b_ph):
    """Driving envelope in the rotating frame at time t."""
    if kind == FIELD_ZERO:
        return 0.0 + 0.0j
    if kind == FIELD_CONSTANT:
        return f0c * np.exp(1j * om_rel * t)
    return complex(np.sum(b_amp * np.exp(1j * (b_om * t - b_ph))))


def direct_rk4(
    kmat,
    u0,
    s0,
    gamma1,
    zeta,
    delta,
    dt,
    n_steps,
    field_kind,
    f0c,
    om_rel,
    b_om,
    b_amp,
    b_ph,
    record_every=1,
    check_bloch=True,
    bloch_tol=1e-3,
):
    """Integrate the per-atom amplitude equations with matrix coupling.

    kmat is the complex coupling matrix (zero diagonal); the coupling term
    for atom i is sum_j kmat[i, j] * u_j evaluated at the current time.
    Returns recorded means, final state and the largest Bloch-ball radius
    seen along the trajectory.
    """
    n = u0.shape[0]
    u = u0.astype(complex).copy()
    s = np.asarray(s0, dtype=float).copy()
    decay = 1j * delta + 1.0

    def rhs(u, s, t):
        fe = _field_env(t, field_kind, f0c, om_rel, b_om, b_amp, b_ph)
        f = fe + kmat @ u
        du = -decay * u + s * f
        ds = -gamma1 * (s - zeta) - 4.0 * np.real(np.conj(u) * f)
        return du, ds

    n_rec = n_steps // record_every + 1
    extra = 1 if n_steps % record_every != 0 else 0
    t_out = np.empty(n_rec + extra)
    s_out = np.empty(n_rec + extra)
    w_out = np.empty(n_rec + extra)
    c_out = np.empty(n_rec + extra)

    def record(idx, t):
        t_out[idx] = t
        s_out[idx] = s.mean()
        w_out[idx] = float(np.mean(np.abs(u) ** 2))
        c_out[idx] = float(np.abs(u.mean()) ** 2)

    bloch_max = float(np.max(4.0 * np.abs(u) ** 2 + s * s))
    record(0, 0.0)
    idx = 1
    for m in range(n_steps):
        t = m * dt
        du1, ds1 = rhs(u, s, t)
        du2, ds2 = rhs(u + 0.5 * dt * du1, s + 0.5 * dt * ds1, t + 0.5 * dt)
        du3, ds3 = rhs(u + 0.5 * dt * du2, s + 0.5 * dt * ds2, t + 0.5 * dt)
        du4, ds4 = rhs(u + dt * du3, s + dt * ds3, t + dt)
        u = u + (dt / 6.0) * (du1 + 2.0 * du2 + 2.0 * du3 + du4)
        s = s + (dt / 6.0) * (ds1 + 2.0 * ds2 + 2.0 * ds3 + ds4)
        ball = float(np.max(4.0 * np.abs(u) ** 2 + s * s))
        if ball > bloch_max:
            bloch_max = ball
        if check_bloch and ball > 1.0 + bloch_tol:
            raise StepSizeTooLarge(
                "Bloch radius %.6g at t=%.6g; reduce dt" % (ball, (m + 1) * dt)
            )
        if (m + 1) % record_every == 0 or m == n_steps - 1:
            record(idx, (m + 1) * dt)
            idx += 1
    return (
        t_out[:idx],
        s_out[:idx],
        w_out[:idx],
        c_out[:idx],
        u,
        s,
        bloch_max,
    )


def _lagrange_weights(theta):
    """Cubic Lagrange weights on integer nodes 0..3 at position theta."""
    t1 = theta - 1.0
    t2 = theta - 2.0
    t3 = theta - 3.0
    return np.array(
        [
            -t1 * t2 * t3 / 6.0,
            theta * t2 * t3 / 2.0,
            -theta * t1 * t3 / 2.0,
            theta * t1 * t2 / 6.0,
        ]
    )


def _dde_stencils(nu, stages=(0.0, 0.5, 1.0)):
    """Per-pair interpolation offsets and weights for each stage time.

    For stage offset c the lookup lands at grid coordinate m + c - nu.
    The four-point stencil is chosen to end at or before the current head
    sample m, so only already-computed history is read.
    """
    n = nu.shape[0]
    offs = np.zeros((len(stages), n, n), dtype=np.int64)
    wts = np.zeros((len(stages), n, n, 4))
    for ci, c in enumerate(stages):
        rel = c - nu
        p = np.floor(rel).astype(np.int64)
        n0 = np.where(p >= -1, -3, p - 1)
        theta = rel - n0
        for a in range(n):
            for b in range(n):
                offs[ci, a, b] = n0[a, b]
                wts[ci, a, b] = _lagrange_weights(theta[a, b])
    return offs, wts


def direct_rk4_dde(
    kmat,
    gmat,
    u0,
    s0,
    gamma1,
    zeta,
    delta,
    two_omega0,
    tau,
    dt,
    n_steps,
    field_kind,
    f0c,
    om_rel,
    b_om,
    b_amp,
    b_ph,
    record_every=1,
    check_bloch=True,
    bloch_tol=1e-3,
):
    """Integrate the amplitude equations with true propagation delays.

    The coupling term for atom i reads sum_j kmat[i, j] * u_j(t - tau_ij),
    with the history interpolated by a four-point cubic stencil on the
    uniform step grid.  Pre-history (t < 0) is the constant initial
    amplitude.  When gmat is nonzero its contribution
    sum_j gmat[i, j] * conj(u_j(t - tau_ij)) * exp(i*two_omega0*t) is added
    (fast counter-rotating part, diagnostic use).
    """
    n = u0.shape[0]
    u = u0.astype(complex).copy()
    s = np.asarray(s0, dtype=float).copy()
    decay = 1j * delta + 1.0
    use_cr = gmat is not None

    nu = tau / dt
    offs, wts = _dde_stencils(nu)
    pad = int(np.ceil(nu.max())) + 4 if n > 1 else 8
    hist = np.empty((pad + n_steps + 1, n), dtype=complex)
    hist[: pad + 1] = u0

    cols = np.broadcast_to(np.arange(n), (n, n))
    gather_cols = cols[:, :, None]

    def delayed(stage_ci, head):
        rows = (head + offs[stage_ci])[:, :, None] + np.arange(4)[None, None, :]
        vals = hist[rows, gather_cols]
        return np.sum(wts[stage_ci] * vals, axis=2)

    def rhs(u, s, t, stage_ci, head):
        ud = delayed(stage_ci, head)
        f = _field_env(t, field_kind, f0c, om_rel, b_om, b_amp, b_ph)
        f = f + np.sum(kmat * ud, axis=1)
        if use_cr:
            cr = np.exp(1j * two_omega0 * t)
            f = f + cr * np.sum(gmat * np.conj(ud), axis=1)
        du = -decay * u + s * f
        ds = -gamma1 * (s - zeta) - 4.0 * np.real(np.conj(u) * f)
        return du, ds

    n_rec = n_steps // record_every + 1
    extra = 1 if n_steps % record_every != 0 else 0
    t_out = np.empty(n_rec + extra)
    s_out = np.empty(n_rec + extra)
    w_out = np.empty(n_rec + extra)
    c_out = np.empty(n_rec + extra)

    def record(idx, t):
        t_out[idx] = t
        s_out[idx] = s.mean()
        w_out[idx] = float(np.mean(np.abs(u) ** 2))
        c_out[idx] = float(np.abs(u.mean()) ** 2)

    bloch_max = float(np.max(4.0 * np.abs(u) ** 2 + s * s))
    record(0, 0.0)
    idx = 1
    for m in range(n_steps):
        t = m * dt
        head = pad + m
        du1, ds1 = rhs(u, s, t, 0, head)
        du2, ds2 = rhs(
            u + 0.5 * dt * du1, s + 0.5 * dt * ds1, t + 0.5 * dt, 1, head
        )
        du3, ds3 = rhs(
            u + 0.5 * dt * du2, s + 0.5 * dt * ds2, t + 0.5 * dt, 1, head
        )
        du4, ds4 = rhs(u + dt * du3, s + dt * ds3, t + dt, 2, head)
        u = u + (dt / 6.0) * (du1 + 2.0 * du2 + 2.0 * du3 + du4)
        s = s + (dt / 6.0) * (ds1 + 2.0 * ds2 + 2.0 * ds3 + ds4)
        hist[head + 1] = u
        ball = float(np.max(4.0 * np.abs(u) ** 2 + s * s))
        if ball > bloch_max:
            bloch_max = ball
        if check_bloch and ball > 1.0 + bloch_tol:
            raise StepSizeTooLarge(
                "Bloch radius %.6g at t=%.6g; reduce dt" % (ball, (m + 1) * dt)
            )
        if (m + 1) % record_every == 0 or m == n_steps - 1:
            record(idx, (m + 1) * dt)
            idx += 1
    return (
        t_out[:idx],
        s_out[:idx],
        w_out[:idx],
        c_out[:idx],
        u,
        s,
        bloch_max,
    )
