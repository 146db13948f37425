"""External driving field and its effective drive strength.

The field enters the dynamics as a lab-frame analytic signal D(t).  Three
models are supported: no field, a constant-amplitude monochromatic drive,
and a bath of independent oscillators with seeded random phases.

The averaged equations do not see D(t) directly; they see the mean squared
filtered amplitude alpha, obtained by passing the field through the
collective response (frequency Omega, width Gamma) and time-averaging the
squared modulus once transients have died out.
"""

import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.signal import lfilter

from .errors import GapburstError, InvalidParameter, NonpositiveGamma
from .rng import STREAM_IDS

ZERO = "zero"
CONSTANT = "constant_resonant"
BATH = "oscillator_bath"


@dataclass
class FieldModel:
    """Parameters of the external drive.

    mode selects the model.  f0 and drive_omega describe the monochromatic
    drive; bath_freqs and bath_amps list the oscillator bath.  Bath phases
    are not stored: they are drawn per run from the seeded phase stream.
    """

    mode: str = ZERO
    f0: complex = 0.0 + 0.0j
    drive_omega: float = 100.0
    bath_freqs: np.ndarray = dc_field(default_factory=lambda: np.zeros(0))
    bath_amps: np.ndarray = dc_field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        if self.mode not in (ZERO, CONSTANT, BATH):
            raise InvalidParameter(
                "field mode must be one of %r" % [ZERO, CONSTANT, BATH]
            )
        self.bath_freqs = np.asarray(self.bath_freqs, dtype=float)
        self.bath_amps = np.asarray(self.bath_amps, dtype=float)
        if self.mode == BATH:
            if self.bath_freqs.size == 0:
                raise InvalidParameter("oscillator bath needs at least one mode")
            if self.bath_freqs.shape != self.bath_amps.shape:
                raise InvalidParameter("bath freqs and amps must match in length")
            if not np.all(np.isfinite(self.bath_freqs)):
                raise InvalidParameter("bath frequencies must be finite")
            if not np.all(np.isfinite(self.bath_amps)):
                raise InvalidParameter("bath amplitudes must be finite")
        if not np.isfinite(self.f0):
            raise InvalidParameter("f0 must be finite")
        if not np.isfinite(self.drive_omega):
            raise InvalidParameter("drive_omega must be finite")


def make_bath(n_modes, center, width, amplitude):
    """Evenly spaced bath with total power amplitude**2.

    Per-mode amplitudes carry 1/sqrt(n_modes) so the summed squared
    amplitude is independent of the mode count.
    """
    if n_modes < 1:
        raise InvalidParameter("bath needs n_modes >= 1")
    if width < 0:
        raise InvalidParameter("bath width must be nonnegative")
    if n_modes == 1:
        freqs = np.array([float(center)])
    else:
        freqs = np.linspace(center - width / 2.0, center + width / 2.0, n_modes)
    amps = np.full(n_modes, amplitude / np.sqrt(n_modes))
    return FieldModel(mode=BATH, bath_freqs=freqs, bath_amps=amps)


def bath_phases(model, seed, index=0):
    """Random phases of the bath oscillators for the given seed.

    ``index`` selects an independent realization; realizations with
    different indices never share draws.
    """
    ss = np.random.SeedSequence(seed, spawn_key=(STREAM_IDS["bath"], index))
    gen = np.random.Generator(np.random.PCG64(ss))
    return gen.uniform(0.0, 2.0 * np.pi, size=model.bath_freqs.size)


def sample_field(model, t, seed=0, index=0):
    """Lab-frame analytic signal of the drive on the time grid ``t``."""
    t = np.asarray(t, dtype=float)
    if model.mode == ZERO:
        return np.zeros(t.shape, dtype=complex)
    if model.mode == CONSTANT:
        return model.f0 * np.exp(-1j * model.drive_omega * t)
    phases = bath_phases(model, seed, index)
    out = np.zeros(t.shape, dtype=complex)
    for w, a, p in zip(model.bath_freqs, model.bath_amps, phases):
        out += a * np.exp(-1j * (w * t + p))
    return out


@dataclass
class AlphaEstimate:
    """Effective drive strength with convergence metadata."""

    value: float
    rel_err: float
    n_samples: int
    n_seeds: int

    def as_dict(self):
        return {
            "value": float(self.value),
            "rel_err": float(self.rel_err),
            "n_samples": int(self.n_samples),
            "n_seeds": int(self.n_seeds),
        }


def _filtered_mean_square(model, omega, gamma_coll, seed, index, t_max, n):
    """Tail average of |M(t)|^2 for one field realization.

    M solves dM/dt = -gamma_coll*M + exp(i*omega*t)*D(t), M(0) = 0,
    discretized by an exponentially weighted trapezoid recursion that is
    unconditionally stable for gamma_coll > 0.
    """
    t = np.linspace(0.0, t_max, n + 1)
    h = t[1] - t[0]
    d = sample_field(model, t, seed, index)
    g = np.exp(1j * omega * t) * d
    a = np.exp(-gamma_coll * h)
    y = lfilter([h / 2.0, h * a / 2.0], [1.0, -a], g)
    # The filter starts from y[0] = (h/2) g[0]; the integral starts from 0.
    m = y - (h / 2.0) * g[0] * a ** np.arange(t.size)
    tail = t >= 0.5 * t_max
    return float(np.mean(np.abs(m[tail]) ** 2))


def alpha_effective(
    model,
    omega,
    gamma_coll,
    seed=0,
    t_max=50.0,
    n_samples=2000,
    n_seeds=8,
    rel_tol=1e-4,
    max_doublings=6,
):
    """Effective squared drive amplitude seen by the collective mode.

    Averages the filtered intensity over the trailing half of [0, t_max]
    and, for the oscillator bath, over n_seeds phase realizations.  The
    quadrature is refined by doubling until two consecutive estimates agree
    to rel_tol; exceeding max_doublings raises.
    """
    if gamma_coll <= 0:
        raise NonpositiveGamma(
            "collective width %.6g is not positive; no stationary filter"
            % gamma_coll
        )
    if t_max <= 0 or n_samples < 8:
        raise InvalidParameter("t_max must be positive and n_samples >= 8")
    if t_max * gamma_coll < 10.0:
        warnings.warn(
            "t_max = %.3g is short against the filter time 1/%.3g; "
            "the tail average may retain transients" % (t_max, gamma_coll),
            stacklevel=2,
        )
    if model.mode == ZERO:
        return AlphaEstimate(0.0, 0.0, n_samples, 0)
    reps = n_seeds if model.mode == BATH else 1

    def estimate(n):
        acc = 0.0
        for j in range(reps):
            acc += _filtered_mean_square(
                model, omega, gamma_coll, seed, j, t_max, n
            )
        return acc / reps

    n = int(n_samples)
    prev = estimate(n)
    for _ in range(max_doublings):
        n *= 2
        cur = estimate(n)
        rel = abs(cur - prev) / max(abs(cur), 1e-300)
        if rel < rel_tol:
            return AlphaEstimate(cur, rel, n, reps)
        prev = cur
    raise GapburstError(
        "alpha estimate did not converge to %g after %d refinements"
        % (rel_tol, max_doublings)
    )
