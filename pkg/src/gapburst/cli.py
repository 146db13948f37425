"""Command-line interface and artifact writers.

Subcommands: spectrum, couplings, simulate, sweep, analyze.  Every run is
driven by a configuration file; artifacts are a CSV series plus JSON
summaries, written deterministically so identical invocations produce
identical bytes.  Exit codes: 0 success, 2 configuration problems, 3
runtime failures (physics or numerics).
"""

import argparse
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import averaged as avg_mod
from . import dynamics as dyn_mod
from . import field as field_mod
from . import geometry
from .analysis import (
    classify_regime,
    detect_bursts,
    stationary_excitation,
    TimeSeries,
)
from .config import canonical_text, parse_config, parse_config_text
from .couplings import coupling_vectors, critical_alpha_or_none, eta_infinity
from .errors import ConfigError, GapburstError, NotStationary
from .spectrum import MediumModel, classify_frequency, polariton_branches

CSV_COLUMNS = ("t", "s_mean", "w_mean", "eta", "intensity")


def _clean(obj):
    """Recursively replace non-finite floats with None for strict JSON."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    return obj


def write_json(path, obj):
    text = json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_series_csv(path, series, seed):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# seed = %d\n" % seed)
        fh.write(",".join(CSV_COLUMNS) + "\n")
        cols = [series.t, series.s_mean, series.w_mean, series.eta,
                series.intensity]
        for row in zip(*cols):
            fh.write(",".join("%.17g" % v for v in row) + "\n")


def read_series_csv(path):
    with open(path, "r", encoding="utf-8") as fh:
        body = "".join(ln for ln in fh if not ln.startswith("#"))
    data = np.genfromtxt(io.StringIO(body), delimiter=",", names=True)
    data = np.atleast_1d(data)
    return TimeSeries(
        t=data["t"],
        s_mean=data["s_mean"],
        w_mean=data["w_mean"],
        eta=data["eta"],
        intensity=data["intensity"],
    )


def build_positions_ensemble(cfg, seed):
    """Ensemble used for geometry-derived couplings (neutral initial state)."""
    return _build_ensemble(cfg, seed, neutral_state=True)


def build_ensemble(cfg, seed):
    """Ensemble with the configured initial state (direct solver)."""
    return _build_ensemble(cfg, seed, neutral_state=False)


def _build_ensemble(cfg, seed, neutral_state):
    ens = cfg["ensemble"]
    common = {
        "omega0": ens["omega0"],
        "gamma1": ens["gamma1"],
        "gamma_s": ens["gamma_s"],
        "r_min": ens["r_min"],
        "zeta": ens["zeta"],
    }
    if neutral_state:
        common["u0"] = 0.0 + 0.0j
        common["s0"] = 0.0
    else:
        common["u0"] = complex(ens["u0_real"], ens["u0_imag"])
        common["s0"] = ens["s0"]
    kind = ens["kind"]
    if kind == "chain":
        return geometry.chain(ens["n_atoms"], ens["spacing"], **common)
    if kind == "cubic":
        return geometry.cubic(ens["n_side"], ens["spacing"], **common)
    if kind == "random_sphere":
        return geometry.random_sphere(
            ens["n_atoms"], ens["radius"], seed, **common
        )
    return geometry.explicit(np.array(ens["positions"]), **common)


def build_medium(cfg):
    med = cfg["medium"]
    return MediumModel(
        omega_t=med["omega_t"],
        omega_p=med["omega_p"],
        branch=med["branch"],
        branch_b=med["branch_b"],
        branch_a=med["branch_a"],
        photon_speed=med["photon_speed"],
    )


def build_field(cfg):
    med = cfg["medium"]
    mode = med["field_mode"]
    if mode == field_mod.ZERO:
        return field_mod.FieldModel()
    if mode == field_mod.CONSTANT:
        return field_mod.FieldModel(
            mode=mode,
            f0=complex(med["f0_real"], med["f0_imag"]),
            drive_omega=med["drive_omega"],
        )
    if med["bath_frequencies"] is not None:
        freqs = np.array(med["bath_frequencies"], dtype=float)
        if med["bath_amplitudes"] is not None:
            amps = np.array(med["bath_amplitudes"], dtype=float)
        else:
            amps = np.full(
                freqs.size, med["bath_amplitude"] / np.sqrt(freqs.size)
            )
        return field_mod.FieldModel(mode=mode, bath_freqs=freqs, bath_amps=amps)
    return field_mod.make_bath(
        med["bath_n_modes"],
        med["bath_center"],
        med["bath_width"],
        med["bath_amplitude"],
    )


def coupling_summary_dict(cfg, seed):
    """Coupling constants from the configured geometry and initial state."""
    ens_cfg = cfg["ensemble"]
    ensemble = build_positions_ensemble(cfg, seed)
    g_vec, d_vec = coupling_vectors(ensemble)
    g = float(g_vec.mean())
    delta_l = float(d_vec.mean())
    if g_vec.size > 1 and abs(g) > 0:
        spread = float(np.max(np.abs(g_vec - g)) / abs(g))
    else:
        spread = 0.0
    u0 = complex(ens_cfg["u0_real"], ens_cfg["u0_imag"])
    a_c = critical_alpha_or_none(g, u0, ens_cfg["s0"])
    return {
        "g": g,
        "delta_l": delta_l,
        "g_per_atom": [float(x) for x in g_vec],
        "delta_l_per_atom": [float(x) for x in d_vec],
        "g_spread": spread,
        "alpha_c": a_c,
        "eta_infinity": eta_infinity(g),
        "n_atoms": int(ensemble.n_atoms),
    }


def resolve_alpha(cfg, seed, g, delta_l):
    """Effective drive strength for the averaged equations.

    Explicit medium.alpha wins; otherwise zero field gives zero and a live
    field model is filtered through the collective response at the initial
    state.  Returns (alpha, detail dict or None).
    """
    med = cfg["medium"]
    ens = cfg["ensemble"]
    if med["alpha"] is not None:
        return float(med["alpha"]), None
    model = build_field(cfg)
    if model.mode == field_mod.ZERO:
        return 0.0, None
    omega = ens["omega0"] + delta_l * ens["s0"]
    gamma_coll = 1.0 - g * ens["s0"]
    est = field_mod.alpha_effective(
        model,
        omega,
        gamma_coll,
        seed=seed,
        t_max=med["alpha_t_max"],
        n_samples=med["alpha_n_samples"],
        n_seeds=med["alpha_n_seeds"],
    )
    return est.value, est.as_dict()


def _analysis_blocks(series, g, alpha, alpha_c, ana):
    bursts = detect_bursts(series, threshold_frac=ana["burst_threshold"])
    try:
        stat = stationary_excitation(
            series,
            g=g,
            window_frac=ana["plateau_window"],
            slope_tol=ana["plateau_tol"],
            localization_tol=ana["localization_tol"],
        ).as_dict()
    except NotStationary as exc:
        stat = {"status": "not_stationary", "reason": str(exc)}
    except GapburstError as exc:
        stat = {"status": "unavailable", "reason": str(exc)}
    regime = classify_regime(
        g,
        alpha,
        alpha_c,
        g_min=ana["regime_g_min"],
        ratio_max=ana["regime_ratio_max"],
    )
    return bursts.as_dict(), stat, regime


def _fixed_point_dict(g, alpha, gamma1, zeta):
    try:
        return avg_mod.stationary_point(g, alpha, gamma1, zeta).as_dict()
    except GapburstError as exc:
        return {"status": "unavailable", "reason": str(exc)}


def run_simulate(cfg, out_dir, seed, solver=None, g_override=None,
                 alpha_override=None):
    """Run one simulation and write series.csv + summary.json."""
    os.makedirs(out_dir, exist_ok=True)
    sol = cfg["solver"]
    ens = cfg["ensemble"]
    ana = cfg["analysis"]
    solver = solver or sol["solver"]
    coup = coupling_summary_dict(cfg, seed)
    g = coup["g"] if g_override is None else float(g_override)
    if alpha_override is None:
        alpha, alpha_detail = resolve_alpha(cfg, seed, g, coup["delta_l"])
    else:
        alpha, alpha_detail = float(alpha_override), None
    alpha_c = critical_alpha_or_none(
        g, complex(ens["u0_real"], ens["u0_imag"]), ens["s0"]
    )

    if solver == "averaged":
        w0 = sol["w0"]
        if w0 is None:
            w0 = ens["u0_real"] ** 2 + ens["u0_imag"] ** 2
        series = avg_mod.integrate_averaged(
            g,
            alpha,
            ens["gamma1"],
            ens["zeta"],
            w0,
            ens["s0"],
            t_end=sol["t_end"],
            dt=sol["dt"],
            ds_max=sol["ds_max"],
            rec_ds=sol["rec_ds"],
            rec_dt=sol["rec_dt"],
        )
    else:
        ensemble = build_ensemble(cfg, seed)
        series = dyn_mod.integrate_direct(
            ensemble,
            t_end=sol["t_end"],
            dt=sol["dt"],
            field_model=build_field(cfg),
            retardation=sol["retardation"],
            detuning=sol["detuning"],
            counter_rotating=sol["counter_rotating"],
            seed=seed,
            record_every=sol["record_every"],
        )

    bursts, stat, regime = _analysis_blocks(series, g, alpha, alpha_c, ana)
    summary = {
        "seed": int(seed),
        "solver": series.meta,
        "couplings": coup,
        "g": g,
        "alpha": alpha,
        "alpha_detail": alpha_detail,
        "alpha_c": alpha_c,
        "fixed_point": _fixed_point_dict(g, alpha, ens["gamma1"], ens["zeta"]),
        "bursts": bursts,
        "stationary": stat,
        "regime": regime,
        "series_file": "series.csv",
        "config": cfg.as_dict(),
    }
    write_series_csv(os.path.join(out_dir, "series.csv"), series, seed)
    write_json(os.path.join(out_dir, "summary.json"), summary)
    return summary


def run_spectrum(cfg, out_dir, seed):
    os.makedirs(out_dir, exist_ok=True)
    med = cfg["medium"]
    ens = cfg["ensemble"]
    ana = cfg["analysis"]
    model = build_medium(cfg)
    k = np.linspace(0.0, med["k_max"], med["n_k"])
    bands = polariton_branches(model, k)
    verdict = classify_frequency(bands, ens["omega0"], edge_tol=ana["edge_tol"])
    path_csv = os.path.join(out_dir, "spectrum.csv")
    with open(path_csv, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# seed = %d\n" % seed)
        fh.write("k,omega_minus,omega_plus\n")
        for row in zip(bands.k, bands.omega_minus, bands.omega_plus):
            fh.write(",".join("%.17g" % v for v in row) + "\n")
    info = bands.as_dict()
    info.update(
        {
            "seed": int(seed),
            "omega0": float(ens["omega0"]),
            "omega0_location": verdict,
            "medium": {
                "omega_t": model.omega_t,
                "omega_p": model.omega_p,
                "branch": model.branch,
                "branch_b": model.branch_b,
                "branch_a": model.branch_a,
                "photon_speed": model.photon_speed,
            },
            "series_file": "spectrum.csv",
        }
    )
    write_json(os.path.join(out_dir, "spectrum.json"), info)
    return info


def run_couplings(cfg, out_dir, seed):
    coup = coupling_summary_dict(cfg, seed)
    coup["seed"] = int(seed)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        write_json(os.path.join(out_dir, "couplings.json"), coup)
    return coup


def run_analyze(cfg, out_dir, seed):
    """Re-analyze an existing series.csv in out_dir."""
    series_path = os.path.join(out_dir, "series.csv")
    if not os.path.exists(series_path):
        raise GapburstError("no series.csv in %s; run simulate first" % out_dir)
    series = read_series_csv(series_path)
    summary_path = os.path.join(out_dir, "summary.json")
    if os.path.exists(summary_path):
        with open(summary_path, "r", encoding="utf-8") as fh:
            prior = json.load(fh)
        g = prior["g"]
        alpha = prior["alpha"]
        alpha_c = prior["alpha_c"]
    else:
        coup = coupling_summary_dict(cfg, seed)
        g = coup["g"]
        alpha, _ = resolve_alpha(cfg, seed, g, coup["delta_l"])
        ens = cfg["ensemble"]
        alpha_c = critical_alpha_or_none(
            g, complex(ens["u0_real"], ens["u0_imag"]), ens["s0"]
        )
    bursts, stat, regime = _analysis_blocks(
        series, g, alpha, alpha_c, cfg["analysis"]
    )
    result = {
        "seed": int(seed),
        "g": g,
        "alpha": alpha,
        "alpha_c": alpha_c,
        "bursts": bursts,
        "stationary": stat,
        "regime": regime,
    }
    write_json(os.path.join(out_dir, "analysis.json"), result)
    return result


def _sweep_point(args):
    cfg_text, g, alpha, run_dir, seed = args
    cfg = parse_config_text(cfg_text)
    summary = run_simulate(
        cfg, run_dir, seed, solver="averaged",
        g_override=g, alpha_override=alpha,
    )
    stat = summary["stationary"]
    eta_inf = stat.get("eta_infinity")
    return {
        "g": g,
        "alpha": alpha,
        "alpha_c": summary["alpha_c"],
        "regime": summary["regime"],
        "eta_infinity": eta_inf,
        "burst_count": summary["bursts"]["count"],
    }


def run_sweep(cfg, out_dir, seed, jobs):
    """Grid of averaged runs over coupling and drive strength."""
    os.makedirs(out_dir, exist_ok=True)
    swp = cfg["sweep"]
    coup = coupling_summary_dict(cfg, seed)
    if swp["g"] is not None:
        g_list = [float(v) for v in swp["g"]]
    else:
        g_list = [coup["g"]]
    if swp["alpha"] is not None:
        a_list = [float(v) for v in swp["alpha"]]
    else:
        alpha, _ = resolve_alpha(cfg, seed, coup["g"], coup["delta_l"])
        a_list = [alpha]
    cfg_text = canonical_text(cfg)
    tasks = []
    idx = 0
    for g in g_list:
        for a in a_list:
            run_dir = os.path.join(out_dir, "run_%03d" % idx)
            tasks.append((cfg_text, g, a, run_dir, seed))
            idx += 1
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]
    agg_path = os.path.join(out_dir, "sweep.csv")
    with open(agg_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# seed = %d\n" % seed)
        fh.write("g,alpha,alpha_c,regime,eta_infinity,burst_count\n")
        for row in rows:
            a_c = row["alpha_c"]
            eta_inf = row["eta_infinity"]
            fh.write(
                "%.17g,%.17g,%s,%s,%s,%d\n"
                % (
                    row["g"],
                    row["alpha"],
                    "nan" if a_c is None else "%.17g" % a_c,
                    row["regime"],
                    "nan" if eta_inf is None else "%.17g" % eta_inf,
                    row["burst_count"],
                )
            )
    write_json(
        os.path.join(out_dir, "sweep.json"),
        {
            "seed": int(seed),
            "n_runs": len(rows),
            "g_values": g_list,
            "alpha_values": a_list,
            "rows": rows,
            "aggregate_file": "sweep.csv",
        },
    )
    return rows


def _resolve_jobs(args, cfg):
    if args.jobs is not None:
        return max(1, args.jobs)
    env = os.environ.get("APP_JOBS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError("APP_JOBS must be an integer, not %r" % env)
    if cfg["sweep"]["jobs"] is not None:
        return cfg["sweep"]["jobs"]
    return 1


def make_parser():
    parser = argparse.ArgumentParser(
        prog="gapburst",
        description="Collective emission of impurity atoms in a band-gap medium",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("spectrum", "polariton branches and gap classification"),
        ("couplings", "ensemble coupling constants"),
        ("simulate", "integrate one configuration"),
        ("sweep", "grid of averaged runs over g and alpha"),
        ("analyze", "re-run burst and plateau analysis on a series"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="configuration file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="run seed")
        p.add_argument(
            "--solver",
            choices=("direct", "averaged"),
            default=None,
            help="override solver selection",
        )
        p.add_argument("--jobs", type=int, default=None,
                       help="parallel workers for sweep")
    return parser


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = parse_config(args.config)
        seed = args.seed if args.seed is not None else cfg.seed
        out_dir = args.out if args.out is not None else cfg.out_dir
        if args.command == "spectrum":
            result = run_spectrum(cfg, out_dir, seed)
        elif args.command == "couplings":
            result = run_couplings(cfg, out_dir, seed)
        elif args.command == "simulate":
            result = run_simulate(cfg, out_dir, seed, solver=args.solver)
        elif args.command == "sweep":
            jobs = _resolve_jobs(args, cfg)
            result = run_sweep(cfg, out_dir, seed, jobs)
        else:
            result = run_analyze(cfg, out_dir, seed)
    except ConfigError as exc:
        print(
            json.dumps({"error": "config", "problems": exc.problems}, indent=2),
            file=sys.stderr,
        )
        return 2
    except GapburstError as exc:
        print(
            json.dumps(
                {"error": type(exc).__name__, "message": str(exc)}, indent=2
            ),
            file=sys.stderr,
        )
        return 3
    print(json.dumps(_clean(_brief(args.command, result)), sort_keys=True))
    return 0


def _brief(command, result):
    """One-line stdout digest per subcommand."""
    if command == "simulate":
        return {
            "g": result["g"],
            "alpha": result["alpha"],
            "regime": result["regime"],
            "burst_count": result["bursts"]["count"],
            "stationary": result["stationary"].get("eta_infinity"),
            "out": result["series_file"],
        }
    if command == "sweep":
        return {"n_runs": len(result)}
    if command == "spectrum":
        return {
            "gap_low": result["gap_low"],
            "gap_high": result["gap_high"],
            "omega0_location": result["omega0_location"],
        }
    if command == "couplings":
        return {
            "g": result["g"],
            "delta_l": result["delta_l"],
            "alpha_c": result["alpha_c"],
        }
    return {
        "regime": result["regime"],
        "burst_count": result["bursts"]["count"],
    }


if __name__ == "__main__":
    sys.exit(main())
