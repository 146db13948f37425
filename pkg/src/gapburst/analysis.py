"""Time-series containers and post-run analysis.

Solvers produce a :class:`TimeSeries` of ensemble means; the functions here
locate emission bursts, test the trailing plateau against the predicted
stationary excitation, and classify the dynamical regime from the coupling
constants alone.
"""

from dataclasses import dataclass, field

import numpy as np

from .couplings import eta_infinity
from .errors import EmptySeries, InvalidParameter, NotStationary

LOCALIZED = "localized"
PARTIAL = "partial"
DEEXCITED = "deexcited"

REGIME_SINGLE_ATOM = "localized_single_atom"
REGIME_FIELD = "field_dominated"
REGIME_BURST = "coherent_burst"
REGIME_INTERMEDIATE = "intermediate"


@dataclass
class TimeSeries:
    """Recorded ensemble means on a strictly increasing time grid.

    eta is the excitation fraction (1 + s_mean)/2 and intensity the
    coherence-weighted emission proxy g * w_mean.  w_coherent, when
    present, is |mean u|^2 and measures phase alignment across atoms.
    """

    t: np.ndarray
    s_mean: np.ndarray
    w_mean: np.ndarray
    eta: np.ndarray
    intensity: np.ndarray
    w_coherent: np.ndarray = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        for name in ("s_mean", "w_mean", "eta", "intensity"):
            arr = np.asarray(getattr(self, name), dtype=float)
            setattr(self, name, arr)
            if arr.shape != self.t.shape:
                raise InvalidParameter("%s length differs from t" % name)
        if self.w_coherent is not None:
            self.w_coherent = np.asarray(self.w_coherent, dtype=float)
            if self.w_coherent.shape != self.t.shape:
                raise InvalidParameter("w_coherent length differs from t")
        if self.t.size == 0:
            raise EmptySeries("series has no samples")
        if self.t.size > 1 and np.any(np.diff(self.t) <= 0):
            raise InvalidParameter("t must be strictly increasing")

    @property
    def n_samples(self):
        return self.t.size


def build_series(t, s_mean, w_mean, g, w_coherent=None, meta=None):
    """Assemble a TimeSeries from solver output, deriving eta and intensity."""
    s_mean = np.asarray(s_mean, dtype=float)
    w_mean = np.asarray(w_mean, dtype=float)
    return TimeSeries(
        t=t,
        s_mean=s_mean,
        w_mean=w_mean,
        eta=0.5 * (1.0 + s_mean),
        intensity=g * w_mean,
        w_coherent=w_coherent,
        meta=dict(meta or {}),
    )


@dataclass
class Burst:
    """One contiguous interval where intensity exceeds the threshold."""

    t_start: float
    t_end: float
    t_peak: float
    peak: float
    fwhm: float

    def as_dict(self):
        return {
            "t_start": float(self.t_start),
            "t_end": float(self.t_end),
            "t_peak": float(self.t_peak),
            "peak": float(self.peak),
            "fwhm": float(self.fwhm),
        }


@dataclass
class BurstReport:
    """Bursts of a series plus quiet-time statistics."""

    bursts: list
    count: int
    threshold: float
    peak: float
    t_first: float
    quiescent_fraction: float
    max_quiescent_frac: float

    def as_dict(self):
        return {
            "bursts": [b.as_dict() for b in self.bursts],
            "count": int(self.count),
            "threshold": float(self.threshold),
            "peak": float(self.peak),
            "t_first": None if self.t_first is None else float(self.t_first),
            "quiescent_fraction": float(self.quiescent_fraction),
            "max_quiescent_frac": float(self.max_quiescent_frac),
        }


def _cross_time(t0, i0, t1, i1, level):
    """Linear interpolation of the time where intensity crosses level."""
    if i1 == i0:
        return t0
    return t0 + (level - i0) * (t1 - t0) / (i1 - i0)


def _half_width(t, inten, lo, hi, peak_idx, half, left_edge, right_edge):
    """Width at the level `half` around peak_idx, clamped to the burst.

    The search includes the segments straddling the run boundaries, where
    the half-maximum crossing lands whenever half exceeds the detection
    threshold.  Shallower crossings fall back to the burst interval itself.
    """
    n = t.size
    left = left_edge
    k = peak_idx
    stop = max(lo - 1, 0)
    while k > stop:
        if inten[k - 1] < half <= inten[k]:
            left = _cross_time(t[k - 1], inten[k - 1], t[k], inten[k], half)
            break
        k -= 1
    right = right_edge
    k = peak_idx
    stop = min(hi + 1, n - 1)
    while k < stop:
        if inten[k + 1] < half <= inten[k]:
            right = _cross_time(t[k], inten[k], t[k + 1], inten[k + 1], half)
            break
        k += 1
    return right - left


def detect_bursts(series, threshold_frac=0.1):
    """Maximal intervals where intensity stays at or above the threshold.

    The threshold is threshold_frac times the global intensity maximum.
    Interval edges are linearly interpolated between samples; the width of
    each burst is its full width at half its own maximum.  Quiet-time
    statistics cover everything outside the detected intervals.
    """
    if not 0.0 < threshold_frac < 1.0:
        raise InvalidParameter("threshold_frac must lie in (0, 1)")
    if series.n_samples < 2:
        raise EmptySeries("burst detection needs at least 2 samples")
    t = series.t
    inten = series.intensity
    peak = float(inten.max())
    if peak <= 0.0:
        return BurstReport(
            bursts=[],
            count=0,
            threshold=0.0,
            peak=peak,
            t_first=None,
            quiescent_fraction=1.0,
            max_quiescent_frac=0.0,
        )
    thr = threshold_frac * peak
    above = inten >= thr
    bursts = []
    outside_max = 0.0
    n = t.size
    i = 0
    while i < n:
        if not above[i]:
            if inten[i] > outside_max:
                outside_max = float(inten[i])
            i += 1
            continue
        j = i
        while j + 1 < n and above[j + 1]:
            j += 1
        seg = inten[i : j + 1]
        rel_pk = int(np.argmax(seg))
        pk_idx = i + rel_pk
        pk = float(inten[pk_idx])
        if i > 0:
            t_start = _cross_time(t[i - 1], inten[i - 1], t[i], inten[i], thr)
        else:
            t_start = float(t[0])
        if j + 1 < n:
            t_end = _cross_time(t[j], inten[j], t[j + 1], inten[j + 1], thr)
        else:
            t_end = float(t[-1])
        fwhm = _half_width(t, inten, i, j, pk_idx, 0.5 * pk, t_start, t_end)
        bursts.append(
            Burst(
                t_start=t_start,
                t_end=t_end,
                t_peak=float(t[pk_idx]),
                peak=pk,
                fwhm=fwhm,
            )
        )
        i = j + 1
    below = ~above
    quiet = 0.0
    for k in range(n - 1):
        if below[k] and below[k + 1]:
            quiet += t[k + 1] - t[k]
    span = t[-1] - t[0]
    return BurstReport(
        bursts=bursts,
        count=len(bursts),
        threshold=thr,
        peak=peak,
        t_first=bursts[0].t_peak if bursts else None,
        quiescent_fraction=quiet / span if span > 0 else 0.0,
        max_quiescent_frac=outside_max / peak,
    )


@dataclass
class StationaryReport:
    """Trailing-plateau statistics against the predicted stationary state."""

    s_infinity: float
    eta_infinity: float
    predicted_eta: float
    deviation: float
    slope: float
    verdict: str

    def as_dict(self):
        return {
            "s_infinity": float(self.s_infinity),
            "eta_infinity": float(self.eta_infinity),
            "predicted_eta": None
            if self.predicted_eta is None
            else float(self.predicted_eta),
            "deviation": None if self.deviation is None else float(self.deviation),
            "slope": float(self.slope),
            "verdict": self.verdict,
        }


def stationary_excitation(
    series, g=None, window_frac=0.1, slope_tol=1e-3, localization_tol=0.02
):
    """Plateau value of the excitation over the trailing window.

    Fits a line to s_mean over the last window_frac of the time span and
    requires the relative slope to stay under slope_tol, else raises
    NotStationary.  When the mean coupling g is supplied and exceeds 1 the
    report includes the predicted stationary excitation (1 + 1/g)/2 and the
    relative deviation from it.
    """
    if series.n_samples < 2:
        raise EmptySeries("plateau analysis needs at least 2 samples")
    t = series.t
    span = t[-1] - t[0]
    if span <= 0:
        raise EmptySeries("series spans zero time")
    mask = t >= t[-1] - window_frac * span
    if mask.sum() < 2:
        raise EmptySeries("plateau window has fewer than 2 samples")
    tw = t[mask]
    sw = series.s_mean[mask]
    tc = tw - tw.mean()
    slope = float(np.polyfit(tc, sw, 1)[0])
    sbar = float(sw.mean())
    rel_slope = abs(slope) / max(abs(sbar), 0.01)
    if rel_slope > slope_tol:
        raise NotStationary(
            "relative slope %.3g exceeds %.3g over trailing window"
            % (rel_slope, slope_tol)
        )
    eta_inf = 0.5 * (1.0 + sbar)
    predicted = eta_infinity(g) if g is not None else None
    deviation = None
    if predicted is not None:
        deviation = abs(eta_inf - predicted) / predicted
    if eta_inf >= 1.0 - localization_tol:
        verdict = LOCALIZED
    elif eta_inf <= localization_tol:
        verdict = DEEXCITED
    else:
        verdict = PARTIAL
    return StationaryReport(
        s_infinity=sbar,
        eta_infinity=eta_inf,
        predicted_eta=predicted,
        deviation=deviation,
        slope=slope,
        verdict=verdict,
    )


def classify_regime(g, alpha, alpha_c, g_min=5.0, ratio_max=0.1, g_tol=1e-9):
    """Dynamical regime from the coupling constants.

    Checked in order: negligible coupling, drive above the critical value,
    strong coupling with weak drive, everything else.  A missing alpha_c
    (undefined threshold) is treated as infinite.
    """
    if alpha < 0:
        raise InvalidParameter("alpha must be nonnegative")
    if abs(g) <= g_tol:
        return REGIME_SINGLE_ATOM
    if alpha_c is not None and alpha > alpha_c:
        return REGIME_FIELD
    if g > g_min and (alpha_c is None or alpha < ratio_max * alpha_c):
        return REGIME_BURST
    return REGIME_INTERMEDIATE
