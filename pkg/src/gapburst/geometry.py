"""Atomic ensemble construction and validation.

Positions are stored in scaled units: lengths carry a factor of the
resonance wavenumber, so a coordinate value of 2*pi is one resonance
wavelength.  All builders return an :class:`Ensemble`.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateInitialState,
    InvalidParameter,
    MinimumSeparationViolated,
)
from .rng import substream

# Allowed slack when testing that the initial state sits inside the Bloch
# ball: 4|u0|^2 + s0^2 <= 1 + BLOCH_SLACK.
BLOCH_SLACK = 1e-9


@dataclass
class Ensemble:
    """A set of identical two-level impurity atoms in the medium.

    Attributes
    ----------
    positions : ndarray, shape (n, 3)
        Scaled coordinates (length times resonance wavenumber).
    omega0 : float
        Atomic transition frequency in units of the single-atom linewidth.
    gamma1 : float
        Longitudinal (population) relaxation rate, same units.
    gamma_s : float
        Coupling strength prefactor shared by every pairwise term.
    u0 : complex
        Initial transition-dipole amplitude, identical for all atoms.  The
        zero default stays on the unstable manifold; seed a small nonzero
        value (with s0 adjusted onto the Bloch sphere) to trigger decay.
    s0 : float
        Initial population difference, identical for all atoms.
    zeta : float
        Stationary population difference the medium relaxes toward.
    r_min : float
        Smallest allowed scaled pair separation.
    """

    positions: np.ndarray
    omega0: float = 100.0
    gamma1: float = 1e-3
    gamma_s: float = 1.0
    u0: complex = 0.0j
    s0: float = 1.0
    zeta: float = 1.0
    r_min: float = 1e-3
    _distances: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float)
        if self.positions.ndim != 2 or self.positions.shape[1] != 3:
            raise InvalidParameter("positions must have shape (n, 3)")
        if self.positions.shape[0] < 1:
            raise InvalidParameter("ensemble needs at least one atom")
        self.validate()

    @property
    def n_atoms(self):
        return self.positions.shape[0]

    def distances(self):
        """Pairwise scaled separations, shape (n, n), zeros on the diagonal."""
        if self._distances is None:
            diff = self.positions[:, None, :] - self.positions[None, :, :]
            self._distances = np.sqrt((diff * diff).sum(axis=2))
        return self._distances

    def validate(self):
        """Check finiteness, parameter ranges, separations and initial state."""
        if not np.all(np.isfinite(self.positions)):
            raise InvalidParameter("positions must be finite")
        for name in ("omega0", "gamma1", "gamma_s", "s0", "zeta", "r_min"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise InvalidParameter("%s must be finite" % name)
        if not np.isfinite(self.u0):
            raise InvalidParameter("u0 must be finite")
        if self.omega0 <= 0:
            raise InvalidParameter("omega0 must be positive")
        if self.gamma1 < 0:
            raise InvalidParameter("gamma1 must be nonnegative")
        if self.gamma_s < 0:
            raise InvalidParameter("gamma_s must be nonnegative")
        if self.r_min <= 0:
            raise InvalidParameter("r_min must be positive")
        if not -1.0 <= self.zeta <= 1.0:
            raise InvalidParameter("zeta must lie in [-1, 1]")
        ball = 4.0 * abs(self.u0) ** 2 + self.s0 * self.s0
        if ball > 1.0 + BLOCH_SLACK:
            raise DegenerateInitialState(
                "initial state outside Bloch ball: 4|u0|^2 + s0^2 = %.9g" % ball
            )
        if self.n_atoms > 1:
            d = self.distances()
            off = d[~np.eye(self.n_atoms, dtype=bool)]
            closest = off.min()
            if closest < self.r_min:
                raise MinimumSeparationViolated(
                    "closest pair at %.6g is under r_min=%.6g"
                    % (closest, self.r_min)
                )
        return self


def _with_common(positions, kwargs):
    return Ensemble(positions=np.asarray(positions, dtype=float), **kwargs)


def chain(n_atoms, spacing, **kwargs):
    """Atoms evenly spaced along the z axis."""
    if n_atoms < 1:
        raise InvalidParameter("n_atoms must be at least 1")
    if spacing <= 0 and n_atoms > 1:
        raise InvalidParameter("spacing must be positive")
    z = np.arange(n_atoms) * float(spacing)
    pos = np.zeros((n_atoms, 3))
    pos[:, 2] = z
    return _with_common(pos, kwargs)


def cubic(n_side, spacing, **kwargs):
    """Simple cubic cluster of n_side**3 atoms."""
    if n_side < 1:
        raise InvalidParameter("n_side must be at least 1")
    if spacing <= 0 and n_side > 1:
        raise InvalidParameter("spacing must be positive")
    axis = np.arange(n_side) * float(spacing)
    grid = np.meshgrid(axis, axis, axis, indexing="ij")
    pos = np.stack([g.ravel() for g in grid], axis=1)
    return _with_common(pos, kwargs)


def random_sphere(n_atoms, radius, seed, max_tries=10000, **kwargs):
    """Atoms drawn uniformly from a ball of the given scaled radius.

    Points are placed one at a time; a candidate closer than r_min to any
    accepted point is redrawn.  Placement is deterministic for a given seed.
    """
    if n_atoms < 1:
        raise InvalidParameter("n_atoms must be at least 1")
    if radius <= 0:
        raise InvalidParameter("radius must be positive")
    r_min = kwargs.get("r_min", 1e-3)
    gen = substream(seed, "geometry")
    accepted = []
    for _ in range(n_atoms):
        placed = False
        for _ in range(max_tries):
            cand = gen.uniform(-radius, radius, size=3)
            if cand @ cand > radius * radius:
                continue
            if all(np.linalg.norm(cand - p) >= r_min for p in accepted):
                accepted.append(cand)
                placed = True
                break
        if not placed:
            raise MinimumSeparationViolated(
                "could not place %d atoms with r_min=%.3g in radius %.3g"
                % (n_atoms, r_min, radius)
            )
    return _with_common(np.array(accepted), kwargs)


def explicit(positions, **kwargs):
    """Ensemble from user-supplied coordinates."""
    return _with_common(positions, kwargs)
