"""Closed two-variable dynamics of the ensemble means.

Averaging the per-atom equations over atoms and decoupling third moments
leaves the mean coherence w = <|u|^2> and mean population difference s:

    dw/dt = -2 (1 - g s) w + 2 alpha s^2
    ds/dt = -g w - alpha s - gamma1 (s - zeta)

where g is the mean gain coupling and alpha the effective squared drive
amplitude.  The integrator is fixed-order with step halving around the
burst, where w grows by many orders of magnitude within a fraction of a
lifetime.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ._kernels import get_backend
from .analysis import build_series
from .errors import InvalidParameter, NoFixedPointInGainRegime

GAIN_PLATEAU = "gain_plateau"
FIELD_DOMINATED = "field_dominated"
DEEXCITED = "deexcited"

# Root bracketing keeps this distance away from domain endpoints where the
# stationary coherence diverges.
BRACKET_MARGIN = 1e-12


def integrate_averaged(
    g,
    alpha,
    gamma1,
    zeta,
    w0,
    s0,
    t_end,
    dt=0.1,
    ds_max=0.01,
    rec_ds=1e-3,
    rec_dt=None,
    backend=None,
):
    """Integrate the averaged system and return the recorded series.

    Recording is event driven: a sample is kept whenever s has moved by
    rec_ds or rec_dt time has elapsed, so bursts are resolved without
    storing every accepted step.
    """
    for name, val in (("g", g), ("alpha", alpha), ("gamma1", gamma1),
                      ("zeta", zeta), ("w0", w0), ("s0", s0)):
        if not np.isfinite(val):
            raise InvalidParameter("%s must be finite" % name)
    if alpha < 0:
        raise InvalidParameter("alpha must be nonnegative")
    if gamma1 < 0:
        raise InvalidParameter("gamma1 must be nonnegative")
    if w0 < 0:
        raise InvalidParameter("w0 must be nonnegative")
    if not -1.0 <= s0 <= 1.0:
        raise InvalidParameter("s0 must lie in [-1, 1]")
    if dt <= 0 or t_end <= 0:
        raise InvalidParameter("dt and t_end must be positive")

    kern = get_backend(backend)
    t, w, s, n_acc, n_rej = kern.averaged_rk4(
        g, alpha, gamma1, zeta, w0, s0, dt, t_end,
        ds_max=ds_max, rec_ds=rec_ds, rec_dt=rec_dt,
    )
    meta = {
        "solver": "averaged",
        "backend": kern.BACKEND_NAME,
        "g": float(g),
        "alpha": float(alpha),
        "gamma1": float(gamma1),
        "zeta": float(zeta),
        "dt": float(dt),
        "t_end": float(t_end),
        "n_accepted": int(n_acc),
        "n_rejected": int(n_rej),
        "final_w": float(w[-1]),
        "final_s": float(s[-1]),
    }
    return build_series(t, s, w, g, meta=meta)


@dataclass
class FixedPoint:
    """Stationary state of the averaged system."""

    w: float
    s: float
    eta: float
    branch: str

    def as_dict(self):
        return {
            "w": float(self.w),
            "s": float(self.s),
            "eta": float(self.eta),
            "branch": self.branch,
        }


def _branch_label(g, alpha, w_star, s_star):
    # The gain term g*w and the drive term alpha*s compete in the
    # population balance; whichever dominates at the root names the branch.
    if g * w_star > alpha * abs(s_star):
        return GAIN_PLATEAU
    return FIELD_DOMINATED


def stationary_point(g, alpha, gamma1, zeta):
    """Fixed point of the averaged flow.

    For alpha = 0 the point is analytic: the population pins at 1/g when
    the pump holds the gain (g*zeta > 1), otherwise the ensemble relaxes
    to zeta with zero coherence.  For alpha > 0 the stationary coherence
    w = alpha s^2 / (1 - g s) is substituted into the population balance
    and the root located inside the domain where 1 - g s > 0.
    """
    for name, val in (("g", g), ("alpha", alpha), ("gamma1", gamma1),
                      ("zeta", zeta)):
        if not np.isfinite(val):
            raise InvalidParameter("%s must be finite" % name)
    if alpha < 0 or gamma1 < 0:
        raise InvalidParameter("alpha and gamma1 must be nonnegative")
    if not -1.0 <= zeta <= 1.0:
        raise InvalidParameter("zeta must lie in [-1, 1]")

    if alpha == 0.0:
        if g * zeta > 1.0:
            s_star = 1.0 / g
            w_star = gamma1 * (zeta - s_star) / g
            return FixedPoint(
                w=w_star, s=s_star, eta=0.5 * (1.0 + s_star),
                branch=GAIN_PLATEAU,
            )
        return FixedPoint(
            w=0.0, s=zeta, eta=0.5 * (1.0 + zeta), branch=DEEXCITED
        )

    def balance(s):
        w = alpha * s * s / (1.0 - g * s)
        return -g * w - alpha * s - gamma1 * (s - zeta)

    if g > 0:
        lo, hi = -1.0, min(1.0, 1.0 / g - BRACKET_MARGIN)
    elif g < 0:
        lo, hi = max(-1.0, 1.0 / g + BRACKET_MARGIN), 1.0
    else:
        lo, hi = -1.0, 1.0
    f_lo = balance(lo)
    f_hi = balance(hi)
    if f_lo == 0.0:
        s_star = lo
    elif f_hi == 0.0:
        s_star = hi
    elif f_lo * f_hi > 0:
        raise NoFixedPointInGainRegime(
            "no sign change in [%.6g, %.6g] for g=%.6g alpha=%.6g"
            % (lo, hi, g, alpha)
        )
    else:
        s_star = brentq(balance, lo, hi, xtol=1e-15)
    w_star = alpha * s_star * s_star / (1.0 - g * s_star)
    return FixedPoint(
        w=w_star,
        s=s_star,
        eta=0.5 * (1.0 + s_star),
        branch=_branch_label(g, alpha, w_star, s_star),
    )
