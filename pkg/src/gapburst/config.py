"""Run configuration: INI-style parsing, validation and canonical output.

A run file has up to six sections (run, ensemble, medium, solver, analysis,
sweep), each a flat key = value table.  Parsing is strict: unknown sections
or keys are rejected, and validation reports every problem found rather
than stopping at the first.  ``canonical_text`` emits a normalized file
that parses back to an equal configuration.
"""

import configparser
import io
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

_ENSEMBLE_KINDS = ("chain", "cubic", "random_sphere", "explicit")
_BRANCHES = ("flat", "cosine")
_FIELD_MODES = ("zero", "constant_resonant", "oscillator_bath")
_SOLVERS = ("averaged", "direct")
_RETARDATIONS = ("phase", "none", "full_dde")


def _positive(v):
    return None if v > 0 else "must be positive"


def _nonnegative(v):
    return None if v >= 0 else "must be nonnegative"


def _unit_interval(v):
    return None if 0.0 < v < 1.0 else "must lie strictly between 0 and 1"


def _bloch_range(v):
    return None if -1.0 <= v <= 1.0 else "must lie in [-1, 1]"


def _finite(v):
    return None if np.isfinite(v) else "must be finite"


def _at_least_one(v):
    return None if v >= 1 else "must be at least 1"


def _key(kind, default, checks=()):
    return {"kind": kind, "default": default, "checks": tuple(checks)}


SCHEMA = {
    "run": {
        "seed": _key("int", 0, [_nonnegative]),
        "out_dir": _key("str", "out"),
    },
    "ensemble": {
        "kind": _key(("choice", _ENSEMBLE_KINDS), "chain"),
        "n_atoms": _key("int", 2, [_at_least_one]),
        "n_side": _key("int", 2, [_at_least_one]),
        "spacing": _key("float", 1.0, [_finite, _positive]),
        "radius": _key("float", 1.0, [_finite, _positive]),
        "positions": _key("positions", None),
        "omega0": _key("float", 100.0, [_finite, _positive]),
        "gamma1": _key("float", 1e-3, [_finite, _nonnegative]),
        "gamma_s": _key("float", 1.0, [_finite, _nonnegative]),
        "u0_real": _key("float", 1e-3, [_finite]),
        "u0_imag": _key("float", 0.0, [_finite]),
        "s0": _key("float", 1.0, [_finite, _bloch_range]),
        "zeta": _key("float", None, [_finite, _bloch_range]),
        "r_min": _key("float", 1e-3, [_finite, _positive]),
    },
    "medium": {
        "omega_t": _key("float", 95.0, [_finite, _positive]),
        "omega_p": _key("float", 40.0, [_finite, _nonnegative]),
        "branch": _key(("choice", _BRANCHES), "flat"),
        "branch_b": _key("float", 5.0, [_finite, _nonnegative]),
        "branch_a": _key("float", 1.0, [_finite, _positive]),
        "photon_speed": _key("float", None, [_finite, _positive]),
        "k_max": _key("float", 2.0, [_finite, _positive]),
        "n_k": _key("int", 512, [lambda v: None if v >= 2 else "must be >= 2"]),
        "field_mode": _key(("choice", _FIELD_MODES), "zero"),
        "f0_real": _key("float", 0.0, [_finite]),
        "f0_imag": _key("float", 0.0, [_finite]),
        "drive_omega": _key("float", None, [_finite]),
        "bath_frequencies": _key("floatlist", None),
        "bath_amplitudes": _key("floatlist", None),
        "bath_n_modes": _key("int", 0, [_nonnegative]),
        "bath_center": _key("float", None, [_finite]),
        "bath_width": _key("float", 10.0, [_finite, _nonnegative]),
        "bath_amplitude": _key("float", 0.0, [_finite, _nonnegative]),
        "alpha": _key("float", None, [_finite, _nonnegative]),
        "alpha_t_max": _key("float", 50.0, [_finite, _positive]),
        "alpha_n_samples": _key("int", 2000,
                                [lambda v: None if v >= 8 else "must be >= 8"]),
        "alpha_n_seeds": _key("int", 8, [_at_least_one]),
    },
    "solver": {
        "solver": _key(("choice", _SOLVERS), "averaged"),
        "retardation": _key(("choice", _RETARDATIONS), "phase"),
        "dt": _key("float", 0.01, [_finite, _positive]),
        "t_end": _key("float", 100.0, [_finite, _positive]),
        "detuning": _key("float", 0.0, [_finite]),
        "counter_rotating": _key("bool", False),
        "record_every": _key("int", 1, [_at_least_one]),
        "w0": _key("float", None, [_finite, _nonnegative]),
        "ds_max": _key("float", 0.01, [_finite, _positive]),
        "rec_ds": _key("float", 1e-3, [_finite, _positive]),
        "rec_dt": _key("float", None, [_finite, _positive]),
    },
    "analysis": {
        "burst_threshold": _key("float", 0.1, [_finite, _unit_interval]),
        "plateau_tol": _key("float", 1e-3, [_finite, _positive]),
        "plateau_window": _key("float", 0.1, [_finite, _unit_interval]),
        "localization_tol": _key("float", 0.02, [_finite, _unit_interval]),
        "regime_g_min": _key("float", 5.0, [_finite]),
        "regime_ratio_max": _key("float", 0.1, [_finite, _positive]),
        "edge_tol": _key("float", 1e-6, [_finite, _positive]),
    },
    "sweep": {
        "g": _key("floatlist", None),
        "alpha": _key("floatlist", None),
        "jobs": _key("int", None, [_at_least_one]),
    },
}

_SECTION_ORDER = ("run", "ensemble", "medium", "solver", "analysis", "sweep")


@dataclass
class RunConfig:
    """Fully resolved configuration; sections map to typed value dicts."""

    sections: dict

    def __getitem__(self, section):
        return self.sections[section]

    def __eq__(self, other):
        return isinstance(other, RunConfig) and self.sections == other.sections

    @property
    def seed(self):
        return self.sections["run"]["seed"]

    @property
    def out_dir(self):
        return self.sections["run"]["out_dir"]

    def as_dict(self):
        out = {}
        for sec in _SECTION_ORDER:
            vals = {}
            for k, v in self.sections[sec].items():
                if isinstance(v, tuple):
                    v = [list(p) if isinstance(p, tuple) else p for p in v]
                vals[k] = v
            out[sec] = vals
        return out


def _coerce(kind, raw, where, problems):
    if isinstance(kind, tuple) and kind[0] == "choice":
        val = raw.strip()
        if val not in kind[1]:
            problems.append(
                "%s: %r is not one of %s" % (where, val, ", ".join(kind[1]))
            )
            return None
        return val
    raw = raw.strip()
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "bool":
            low = raw.lower()
            if low in ("true", "1", "yes", "on"):
                return True
            if low in ("false", "0", "no", "off"):
                return False
            raise ValueError(raw)
        if kind == "str":
            return raw
        if kind == "floatlist":
            parts = [p.strip() for p in raw.split(",") if p.strip()]
            if not parts:
                raise ValueError("empty list")
            return tuple(float(p) for p in parts)
        if kind == "positions":
            groups = [p.strip() for p in raw.split(";") if p.strip()]
            if not groups:
                raise ValueError("empty positions")
            out = []
            for grp in groups:
                comps = [c.strip() for c in grp.split(",")]
                if len(comps) != 3:
                    raise ValueError("each position needs 3 components")
                out.append(tuple(float(c) for c in comps))
            return tuple(out)
    except ValueError as exc:
        problems.append("%s: cannot parse %r as %s (%s)" % (where, raw, kind, exc))
        return None
    raise AssertionError("unhandled kind %r" % (kind,))


def _check_value(entry, value, where, problems):
    if value is None:
        return
    kind = entry["kind"]
    if kind == "floatlist":
        for i, v in enumerate(value):
            if not np.isfinite(v):
                problems.append("%s[%d]: must be finite" % (where, i))
        return
    if kind == "positions":
        for i, p in enumerate(value):
            if not all(np.isfinite(c) for c in p):
                problems.append("%s[%d]: must be finite" % (where, i))
        return
    for check in entry["checks"]:
        msg = check(value)
        if msg is not None:
            problems.append("%s: %s" % (where, msg))


def _cross_validate(sections, problems):
    ens = sections["ensemble"]
    med = sections["medium"]
    sol = sections["solver"]
    if ens["kind"] == "explicit" and ens["positions"] is None:
        problems.append("ensemble.positions: required when kind = explicit")
    if ens["kind"] != "explicit" and ens["positions"] is not None:
        problems.append("ensemble.positions: only valid when kind = explicit")
    if med["field_mode"] == "oscillator_bath":
        has_list = med["bath_frequencies"] is not None
        has_gen = med["bath_n_modes"] >= 1
        if not has_list and not has_gen:
            problems.append(
                "medium: oscillator_bath needs bath_frequencies or bath_n_modes"
            )
        if has_list and has_gen:
            problems.append(
                "medium: give bath_frequencies or bath_n_modes, not both"
            )
    if med["bath_amplitudes"] is not None:
        if med["bath_frequencies"] is None:
            problems.append(
                "medium.bath_amplitudes: requires bath_frequencies"
            )
        elif len(med["bath_amplitudes"]) != len(med["bath_frequencies"]):
            problems.append(
                "medium.bath_amplitudes: length differs from bath_frequencies"
            )
    if sol["counter_rotating"] and sol["retardation"] != "full_dde":
        problems.append(
            "solver.counter_rotating: requires retardation = full_dde"
        )
    # Only per-atom integration needs a valid single-atom state; the
    # averaged moments (w0, s0) are not constrained by the Bloch ball.
    if sol["solver"] == "direct":
        u0sq = ens["u0_real"] ** 2 + ens["u0_imag"] ** 2
        if 4.0 * u0sq + ens["s0"] ** 2 > 1.0 + 1e-9:
            problems.append(
                "ensemble: direct solver needs 4|u0|^2 + s0^2 <= 1"
            )


def _resolve(sections):
    ens = sections["ensemble"]
    med = sections["medium"]
    sol = sections["solver"]
    if ens["zeta"] is None:
        ens["zeta"] = ens["s0"]
    if med["photon_speed"] is None:
        med["photon_speed"] = ens["omega0"]
    if med["drive_omega"] is None:
        med["drive_omega"] = ens["omega0"]
    if med["bath_center"] is None:
        med["bath_center"] = ens["omega0"]
    if sol["rec_dt"] is None:
        sol["rec_dt"] = sol["t_end"] / 5000.0


def parse_config_text(text):
    """Parse configuration text; raises ConfigError listing every problem."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("parse error: %s" % exc) from None

    problems = []
    sections = {}
    for sec in _SECTION_ORDER:
        sections[sec] = {k: entry["default"] for k, entry in SCHEMA[sec].items()}
    for sec in parser.sections():
        if sec not in SCHEMA:
            problems.append("unknown section [%s]" % sec)
            continue
        for key, raw in parser.items(sec):
            if key not in SCHEMA[sec]:
                problems.append("unknown key %s.%s" % (sec, key))
                continue
            entry = SCHEMA[sec][key]
            where = "%s.%s" % (sec, key)
            val = _coerce(entry["kind"], raw, where, problems)
            if val is not None:
                _check_value(entry, val, where, problems)
                sections[sec][key] = val
    if not problems:
        _cross_validate(sections, problems)
    if problems:
        raise ConfigError(problems)
    _resolve(sections)
    return RunConfig(sections=sections)


def parse_config(path):
    """Parse a configuration file from disk."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("cannot read %s: %s" % (path, exc)) from None
    return parse_config_text(text)


def _format_value(kind, value):
    if isinstance(kind, tuple):
        return str(value)
    if kind == "bool":
        return "true" if value else "false"
    if kind == "float":
        return repr(float(value))
    if kind == "int":
        return str(int(value))
    if kind == "str":
        return str(value)
    if kind == "floatlist":
        return ", ".join(repr(float(v)) for v in value)
    if kind == "positions":
        return "; ".join(
            ", ".join(repr(float(c)) for c in p) for p in value
        )
    raise AssertionError("unhandled kind %r" % (kind,))


def canonical_text(cfg):
    """Normalized configuration text; parses back to an equal RunConfig."""
    buf = io.StringIO()
    for sec in _SECTION_ORDER:
        buf.write("[%s]\n" % sec)
        for key, entry in SCHEMA[sec].items():
            val = cfg.sections[sec].get(key)
            if val is None:
                continue
            buf.write("%s = %s\n" % (key, _format_value(entry["kind"], val)))
        buf.write("\n")
    return buf.getvalue()


def default_config():
    """RunConfig with every key at its default."""
    return parse_config_text("")
