"""Effective coupling constants of an ensemble.

Each atom couples to the others through the medium-mediated pair kernel.
Splitting the kernel into oscillating and decaying parts gives, per atom,
a dimensionless gain coupling ``g`` (from the sin component) and a
collective frequency shift ``delta_l`` (from the cos component).  Both are
sums over partner atoms of sinc-like terms weighted by gamma_s.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInitialState, InvalidParameter


def coupling_vectors(ensemble):
    """Per-atom gain couplings and level shifts.

    Returns
    -------
    g : ndarray, shape (n,)
        g[i] = gamma_s * sum_{j != i} sin(r_ij) / r_ij
    delta_l : ndarray, shape (n,)
        delta_l[i] = gamma_s * sum_{j != i} cos(r_ij) / r_ij
    """
    n = ensemble.n_atoms
    if n == 1:
        return np.zeros(1), np.zeros(1)
    r = ensemble.distances()
    off = ~np.eye(n, dtype=bool)
    g_mat = np.zeros((n, n))
    d_mat = np.zeros((n, n))
    g_mat[off] = np.sin(r[off]) / r[off]
    d_mat[off] = np.cos(r[off]) / r[off]
    scale = ensemble.gamma_s
    return scale * g_mat.sum(axis=1), scale * d_mat.sum(axis=1)


@dataclass
class CouplingSummary:
    """Ensemble-averaged couplings and derived thresholds."""

    g: float
    delta_l: float
    g_per_atom: np.ndarray
    delta_l_per_atom: np.ndarray
    g_spread: float
    alpha_c: float
    eta_infinity: float

    def as_dict(self):
        return {
            "g": float(self.g),
            "delta_l": float(self.delta_l),
            "g_per_atom": [float(x) for x in self.g_per_atom],
            "delta_l_per_atom": [float(x) for x in self.delta_l_per_atom],
            "g_spread": float(self.g_spread),
            "alpha_c": None if self.alpha_c is None else float(self.alpha_c),
            "eta_infinity": None
            if self.eta_infinity is None
            else float(self.eta_infinity),
        }


def summarize(ensemble):
    """Mean couplings plus the critical drive and stationary excitation."""
    g_vec, d_vec = coupling_vectors(ensemble)
    g = float(g_vec.mean())
    delta_l = float(d_vec.mean())
    if g_vec.size > 1 and abs(g) > 0:
        spread = float(np.max(np.abs(g_vec - g)) / abs(g))
    else:
        spread = 0.0
    alpha_c = critical_alpha_or_none(g, ensemble.u0, ensemble.s0)
    eta = eta_infinity(g)
    return CouplingSummary(
        g=g,
        delta_l=delta_l,
        g_per_atom=g_vec,
        delta_l_per_atom=d_vec,
        g_spread=spread,
        alpha_c=alpha_c,
        eta_infinity=eta,
    )


def collective_frequency(omega0, delta_l, s):
    """Population-dependent collective transition frequency."""
    return omega0 + delta_l * s


def collective_width(g, s):
    """Population-dependent collective width in linewidth units.

    Negative values signal net gain (stimulated regime).
    """
    return 1.0 - g * s


def critical_alpha(g, u0, s0):
    """Drive strength separating field-dominated from collective decay."""
    if not np.isfinite(g) or g <= 0:
        raise InvalidParameter("g must be positive and finite")
    if s0 == 0:
        raise DegenerateInitialState(
            "no finite drive threshold at zero initial inversion"
        )
    num = (1.0 - g * s0) ** 2 + 4.0 * g * g * abs(u0) ** 2
    return num / (4.0 * g * g * s0 * s0)


def critical_alpha_or_none(g, u0, s0):
    """Like critical_alpha, but None outside its domain (g <= 0 or s0 = 0)."""
    if g <= 0 or s0 == 0:
        return None
    return critical_alpha(g, u0, s0)


def eta_infinity(g):
    """Predicted stationary excitation fraction, defined for g > 1."""
    if g > 1.0:
        return 0.5 * (1.0 + 1.0 / g)
    return None
