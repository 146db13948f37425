"""Polariton band structure of the host medium.

The medium couples a photon branch (slope ``photon_speed``) to a matter
branch (flat, or a cosine band of width 2*branch_b).  Diagonalizing the
two-mode quadratic form at each wavevector yields the upper and lower
polariton branches; between them lies a gap in which no mode propagates.
Frequencies are in single-atom linewidth units and wavevectors in
resonance-wavenumber units, matching the ensemble scaling.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter

FLAT = "flat"
COSINE = "cosine"

IN_GAP = "in_gap"
LOWER_BRANCH = "in_lower_continuum"
UPPER_BRANCH = "in_upper_continuum"
AT_EDGE = "at_edge"


@dataclass
class MediumModel:
    """Dispersive host parameters.

    omega_t is the matter resonance, omega_p the coupling (plasma-like)
    frequency controlling the gap width, photon_speed the slope of the bare
    photon branch in scaled units.  The cosine branch adds a tight-binding
    band omega_t + branch_b*(1 - cos(branch_a*k)).
    """

    omega_t: float = 95.0
    omega_p: float = 40.0
    branch: str = FLAT
    branch_b: float = 5.0
    branch_a: float = 1.0
    photon_speed: float = 100.0

    def __post_init__(self):
        if self.branch not in (FLAT, COSINE):
            raise InvalidParameter("branch must be %r or %r" % (FLAT, COSINE))
        for name in ("omega_t", "photon_speed"):
            if not np.isfinite(getattr(self, name)) or getattr(self, name) <= 0:
                raise InvalidParameter("%s must be positive" % name)
        if not np.isfinite(self.omega_p) or self.omega_p < 0:
            raise InvalidParameter("omega_p must be nonnegative")
        if self.branch == COSINE:
            if not np.isfinite(self.branch_b) or self.branch_b < 0:
                raise InvalidParameter("branch_b must be nonnegative")
            if not np.isfinite(self.branch_a) or self.branch_a <= 0:
                raise InvalidParameter("branch_a must be positive")


@dataclass
class PolaritonBands:
    """Sampled polariton branches and the band gap between them."""

    k: np.ndarray
    omega_minus: np.ndarray
    omega_plus: np.ndarray
    gap_low: float
    gap_high: float
    edges_exact: bool

    def as_dict(self):
        return {
            "gap_low": float(self.gap_low),
            "gap_high": float(self.gap_high),
            "gap_width": float(self.gap_high - self.gap_low),
            "edges_exact": bool(self.edges_exact),
            "k_min": float(self.k[0]),
            "k_max": float(self.k[-1]),
            "n_k": int(self.k.size),
        }


def matter_branch(model, k):
    """Bare matter dispersion omega_k."""
    k = np.asarray(k, dtype=float)
    if model.branch == FLAT:
        return np.full_like(k, model.omega_t)
    return model.omega_t + model.branch_b * (1.0 - np.cos(model.branch_a * k))


def polariton_branches(model, k):
    """Upper and lower polariton branches on the wavevector grid ``k``.

    The squared branch frequencies are the eigenvalues of the two-mode
    quadratic form coupling the photon line photon_speed*k to the matter
    branch with strength omega_p.
    """
    k = np.asarray(k, dtype=float)
    if k.ndim != 1 or k.size < 2:
        raise InvalidParameter("k grid must be 1-d with at least 2 points")
    if not np.all(np.isfinite(k)) or np.any(k < 0):
        raise InvalidParameter("k grid must be finite and nonnegative")
    if np.any(np.diff(k) <= 0):
        raise InvalidParameter("k grid must be strictly increasing")

    a = matter_branch(model, k) ** 2
    q = (model.photon_speed * k) ** 2
    p = model.omega_p ** 2
    s = a + p + q
    # Discriminant in cancellation-free form: (a-q)^2 + p*(p + 2a + 2q).
    disc = (a - q) ** 2 + p * (p + 2.0 * a + 2.0 * q)
    d = np.sqrt(disc)
    w_plus = np.sqrt(0.5 * (s + d))
    # The squared roots multiply to a*q, so the small root is computed from
    # the large one instead of the cancellation-prone difference (s - d)/2.
    w_minus = np.sqrt(a) * np.sqrt(q) / w_plus

    if model.branch == FLAT:
        gap_low = model.omega_t
        gap_high = float(np.hypot(model.omega_t, model.omega_p))
        exact = True
    else:
        gap_low = float(w_minus.max())
        gap_high = float(w_plus.min())
        exact = False
    return PolaritonBands(
        k=k,
        omega_minus=w_minus,
        omega_plus=w_plus,
        gap_low=gap_low,
        gap_high=gap_high,
        edges_exact=exact,
    )


def classify_frequency(bands, omega, edge_tol=1e-6):
    """Locate ``omega`` relative to the band gap.

    Returns one of the strings "in_gap", "in_lower_continuum",
    "in_upper_continuum" or "at_edge".  The edge verdict uses a relative
    tolerance on both gap edges.
    """
    if not np.isfinite(omega) or omega < 0:
        raise InvalidParameter("omega must be finite and nonnegative")
    scale = max(1.0, abs(bands.gap_low), abs(bands.gap_high))
    if abs(omega - bands.gap_low) <= edge_tol * scale:
        return AT_EDGE
    if abs(omega - bands.gap_high) <= edge_tol * scale:
        return AT_EDGE
    if bands.gap_low < omega < bands.gap_high:
        return IN_GAP
    if omega < bands.gap_low:
        return LOWER_BRANCH
    return UPPER_BRANCH
