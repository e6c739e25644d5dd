"""Command-line entry point: ``nvthermo <subcommand> [options]``."""

import argparse
from collections import OrderedDict
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ENV_VAR, grid, load_config, resolve_config
from .demos import RECIPES, demo_config_path
from .errors import NVThermoError, ParseError, ValidationError
from .extraction import (
    linear_drift_tensor,
    manifold_frequencies,
    parse_site,
    rf_to_absolute,
    site_name,
    temperature_sweep,
)
from .fitting import TempSeries, fit_fringe, fit_line_weighted, fit_odmr_dips, weighted_mean
from .ramsey import RamseyTrace, fringe_model, FringeParams, simulate_odmr, simulate_ramsey
from .spin import diagonalize
from .svg import Figure
from .tables import (
    SPECTRUM_COLUMNS,
    TRACE_COLUMNS,
    format_table,
    parse_expansion_table,
    parse_measurements,
    parse_phonon_table,
    parse_two_column,
)
from .thermo import (
    PhononModeTable,
    ThermoModel,
    a_of_T,
    a_zero,
    bose_einstein,
    dA_dT,
    delta_A_dyn,
    delta_A_stc,
    merge_degenerate_modes,
)


def _emit(text, args):
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _system(cfg, args):
    system = cfg.spin_system()
    if args.field_gauss is not None:
        system = system.with_field((0.0, 0.0, args.field_gauss))
    return system


def _seed(cfg, args):
    return cfg.simulation.seed if args.seed is None else args.seed


def _compact(label):
    parts = [f"mS={label.mS:+d}"]
    if label.mI_N is not None:
        parts.append(f"mN={label.mI_N:+d}")
    parts.extend(f"mC{k + 1}={'+' if m > 0 else '-'}1/2" for k, m in enumerate(label.mI_C))
    return " ".join(parts)


def _transition_kind(a, b):
    """Name of the single spin that flips by one quantum between two labels, else None."""
    diffs = []
    if a.mS != b.mS:
        diffs.append(("electron", abs(a.mS - b.mS)))
    if a.mI_N != b.mI_N:
        diffs.append(("N14", abs(a.mI_N - b.mI_N)))
    for k, (x, y) in enumerate(zip(a.mI_C, b.mI_C)):
        if x != y:
            diffs.append((site_name(k), abs(x - y)))
    if len(diffs) == 1 and diffs[0][1] == 1:
        return diffs[0][0]
    return None


def cmd_transitions(args, cfg):
    system = _system(cfg, args)
    d = diagonalize(system)
    rows = []
    if args.levels:
        cols = ("index", "label", "energy_Hz", "overlap")
        for k, lab in enumerate(d.labels):
            rows.append((k, _compact(lab), d.eigenvalues[k], lab.overlap))
    else:
        cols = ("kind", "manifold_mS", "from", "to", "frequency_Hz")
        n = len(d.labels)
        for i in range(n):
            for j in range(i + 1, n):
                a, b = d.labels[i], d.labels[j]
                kind = _transition_kind(a, b)
                if kind is None:
                    continue
                hi, lo = (a, b) if d.eigenvalues[i] >= d.eigenvalues[j] else (b, a)
                manifold = "" if kind == "electron" else f"{a.mS:+d}"
                freq = abs(d.eigenvalues[j] - d.eigenvalues[i])
                rows.append((kind, manifold, _compact(lo), _compact(hi), freq))
        rows.sort(key=lambda r: (r[0] != "electron", r[0], r[1], r[4]))
    _emit(format_table(cols, rows, {"B_G": " ".join(repr(b) for b in system.B)}), args)


def cmd_extract(args, cfg):
    system = _system(cfg, args)
    nucleus = args.nucleus or cfg.simulation.nucleus
    idx = parse_site(nucleus, system)
    temps = [args.temp_k] if args.temp_k is not None else grid(cfg.simulation.temperatures_K)
    tensor_at = linear_drift_tensor(system.carbons[idx], cfg.simulation.tempco_Hz_per_K, cfg.simulation.t_ref_K)
    rows = temperature_sweep(system, temps, tensor_at, idx)
    cols = ("T_K", "omegaPlus_Hz", "omegaMinus_Hz", "mean_Hz", "couplingNorm_Hz", "remainder_Hz")
    _emit(format_table(cols, rows, {"nucleus": site_name(idx), "Bz_G": system.B[2]}), args)
    if args.plot:
        T = np.array([r["T_K"] for r in rows])
        mean = np.array([r["mean_Hz"] for r in rows])
        ref = np.floor(mean.min() / 1e3)
        fig = Figure(f"{site_name(idx)} two-manifold mean", "T (K)", f"A - {ref:.0f} kHz (Hz)")
        fig.add(T, mean - ref * 1e3, "mean", style="markers")
        fig.save(args.plot)


def cmd_simulate_ramsey(args, cfg):
    sim = cfg.simulation
    system = _system(cfg, args)
    nucleus = args.nucleus or sim.nucleus
    manifold = args.manifold if args.manifold is not None else sim.manifold
    freqs = manifold_frequencies(system, nucleus)
    true = freqs.omega_plus if manifold == 1 else freqs.omega_minus
    rf = sim.rf_Hz if sim.rf_Hz is not None else true - sim.detuning_Hz
    times = grid(sim.times_s)
    trace = simulate_ramsey(
        system, nucleus, manifold, rf, times,
        t2star=sim.t2star_s, stretch=sim.stretch, amplitude=sim.amplitude,
        offset=sim.offset, baseline=sim.baseline, phase=sim.phase_rad,
        noise_sigma=sim.noise_sigma, seed=_seed(cfg, args), polarization=sim.polarization,
    )
    meta = OrderedDict(
        nucleus=freqs.nucleus, manifold=manifold, rf_Hz=rf, true_frequency_Hz=true,
        detuning_Hz=true - rf, noise_sigma=sim.noise_sigma, seed=_seed(cfg, args),
    )
    _emit(format_table(TRACE_COLUMNS, zip(trace.times, trace.signal), meta), args)
    if args.plot:
        fig = Figure("Ramsey fringe", "free evolution t (s)", "contrast")
        fig.add(trace.times, trace.signal, "simulated", style="markers")
        fig.save(args.plot)


def cmd_fit_fringe(args, cfg):
    path = args.trace or cfg.resolve(cfg.paths.trace)
    if path is None:
        raise ValidationError("no trace given (use --trace or paths.trace in the config)")
    meta, t, y = parse_two_column(path, TRACE_COLUMNS)
    noise = float(meta.get("noise_sigma", 0.0))
    trace = RamseyTrace(t, y, noise)
    report = fit_fringe(trace)
    record = report.as_dict()
    if "rf_Hz" in meta:
        rf = float(meta["rf_Hz"])
        record["rf_Hz"] = rf
        record["absolute_frequency_Hz"] = rf_to_absolute(rf, report["detuning"])
        record["absolute_frequency_sigma_Hz"] = report.sigma("detuning")
    _emit(json.dumps(record, indent=2, sort_keys=True) + "\n", args)
    if args.plot:
        fit = FringeParams.from_array([report[n] for n in
                                       ("amplitude", "detuning", "phase", "offset", "t2star", "stretch", "baseline")])
        tt = np.linspace(t[0], t[-1], 1000)
        fig = Figure(f"Ramsey fringe: df = {report['detuning']:.1f}({report.sigma('detuning'):.1f}) Hz",
                     "free evolution t (s)", "contrast")
        fig.add(t, y, "data", style="markers")
        fig.add(tt, fringe_model(tt, fit), "fit")
        fig.save(args.plot)


def tempco_table(records, weighted=True):
    """Per-NV slopes of the two-manifold mean and their cross-NV average per nucleus."""
    groups = OrderedDict()
    for r in records:
        groups.setdefault((r.nucleus, r.nv_id), []).append(r)
    per_nv = []
    for (nucleus, nv), recs in groups.items():
        # each record sigma is per frequency; the mean of two has sigma/sqrt(2)
        series = TempSeries.from_records([(r.T, r.mean, r.sigma / np.sqrt(2)) for r in recs])
        fit = fit_line_weighted(series)
        per_nv.append((nucleus, nv, len(recs), fit))
    rows = []
    for nucleus, nv, n, fit in per_nv:
        rows.append(("nv", nucleus, nv, n, fit["slope"], fit.sigma("slope"), fit["intercept"]))
    for nucleus in OrderedDict.fromkeys(p[0] for p in per_nv):
        fits = [p[3] for p in per_nv if p[0] == nucleus]
        mean, sig = weighted_mean([f["slope"] for f in fits], [f.sigma("slope") for f in fits], weighted)
        rows.append(("mean", nucleus, "*", len(fits), mean, sig, ""))
    return rows, per_nv


def cmd_tempco(args, cfg):
    path = args.measurements or cfg.resolve(cfg.paths.measurements)
    if path is None:
        raise ValidationError("no measurements file (use --measurements or paths.measurements)")
    records = parse_measurements(path)
    rows, per_nv = tempco_table(records, weighted=not args.unweighted)
    cols = ("kind", "nucleus", "nvId", "n", "slope_Hz_per_K", "sigma_Hz_per_K", "intercept_Hz")
    _emit(format_table(cols, rows), args)
    if args.plot:
        fig = Figure("Two-manifold mean vs temperature", "T (K)", "A - A(first point) (Hz)")
        for nucleus, nv, _, fit in per_nv:
            recs = [r for r in records if r.nucleus == nucleus and r.nv_id == nv]
            T = np.array([r.T for r in recs])
            A = np.array([r.mean for r in recs])
            err = np.array([r.sigma for r in recs]) / np.sqrt(2)
            fig.add(T, A - A[0], f"{nv} {nucleus}", style="markers", yerr=err)
            fig.add(T, fit["slope"] * T + fit["intercept"] - A[0], "")
        fig.save(args.plot)


def _thermo_model(args, cfg):
    if args.demo:
        cfg = load_config(demo_config_path(args.demo))
    modes_path = args.modes or cfg.resolve(cfg.paths.modes)
    exp_path = args.expansion or cfg.resolve(cfg.paths.expansion)
    if exp_path is None:
        raise ValidationError("no expansion table (use --expansion or paths.expansion)")
    modes = parse_phonon_table(modes_path) if modes_path else PhononModeTable.empty()
    expansion = parse_expansion_table(exp_path)
    a0 = cfg.thermo.a_stc0_Hz if args.a_stc0 is None else args.a_stc0
    c_stc = cfg.thermo.c_stc_Hz if args.c_stc is None else args.c_stc
    return ThermoModel(float(a0), float(c_stc), modes, expansion, cfg.physical_constants(), args.demo or ""), cfg


def cmd_thermo(args, cfg):
    model, cfg = _thermo_model(args, cfg)
    T = 300.0 if args.temp_k is None else args.temp_k
    d = dA_dT(model, T)
    row = (T, a_zero(model), a_of_T(model, T), delta_A_stc(model, T),
           delta_A_dyn(model.modes, T, model.constants), d.total, d.stc, d.dyn)
    cols = ("T_K", "A0_Hz", "A_T_Hz", "dA_stc_Hz", "dA_dyn_Hz", "dAdT_Hz_per_K", "stc_Hz_per_K", "dyn_Hz_per_K")
    _emit(format_table(cols, [row]), args)

    temps = grid(cfg.thermo.temperatures_K)
    temps = temps[(temps >= model.expansion.t_min) & (temps <= model.expansion.t_max)]
    curve = []
    for t in temps:
        stc = delta_A_stc(model, t)
        dyn = delta_A_dyn(model.modes, t, model.constants)
        curve.append((t, a_of_T(model, t), stc, dyn, stc + dyn))
    if args.curve:
        Path(args.curve).write_text(
            format_table(("T_K", "A_Hz", "dA_stc_Hz", "dA_dyn_Hz", "dA_total_Hz"), curve), encoding="utf-8"
        )
    if args.plot:
        c = np.array(curve)
        fig = Figure("Thermal correction to A(T)", "T (K)", "dA (Hz)")
        fig.add(c[:, 0], c[:, 4], "total")
        fig.add(c[:, 0], c[:, 2], "stc (expansion)")
        fig.add(c[:, 0], c[:, 3], "dyn (vibrations)")
        fig.save(args.plot)
    if args.modes_plot and len(model.modes):
        merged = merge_degenerate_modes(model.modes, cfg.thermo.merge_window_meV)
        fig = Figure(f"Per-phonon contribution (modes merged within {cfg.thermo.merge_window_meV} meV)",
                     "phonon energy (meV)", "c_i (Hz)")
        fig.add(merged.energies, merged.c, "c_i", style="stem")
        fig.save(args.modes_plot)


def cmd_odmr(args, cfg):
    sim = cfg.simulation
    system = _system(cfg, args)
    from .ramsey import electron_transitions

    centers = electron_transitions(system)
    lw = sim.odmr_linewidth_Hz
    # group lines closer than a linewidth; each group gets one fitted dip
    groups = [[centers[0]]]
    for c in centers[1:]:
        if c - groups[-1][-1] < lw:
            groups[-1].append(c)
        else:
            groups.append([c])
    guesses = [float(np.mean(g)) for g in groups]
    f = np.linspace(min(guesses) - sim.odmr_span_Hz / 2, max(guesses) + sim.odmr_span_Hz / 2, sim.odmr_points)
    spec = simulate_odmr(system, f, lw, sim.odmr_depth)
    fit = fit_odmr_dips(f, spec.signal, guesses, lw)
    rows = [(k, guesses[k], fit[f"center{k}"], fit.sigma(f"center{k}"), fit[f"fwhm{k}"]) for k in range(len(guesses))]
    meta = {"Bz_G": system.B[2]}
    if len(guesses) == 2:
        meta["zfs_estimate_Hz"] = (fit["center0"] + fit["center1"]) / 2
    _emit(format_table(("dip", "expected_Hz", "center_Hz", "sigma_Hz", "fwhm_Hz"), rows, meta), args)
    if args.spectrum:
        Path(args.spectrum).write_text(format_table(SPECTRUM_COLUMNS, zip(f, spec.signal)), encoding="utf-8")
    if args.plot:
        fig = Figure("Pulsed ODMR", "MW frequency (Hz)", "normalized fluorescence")
        fig.add(f, spec.signal, "spectrum")
        fig.save(args.plot)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"YAML run config (fallback: ${ENV_VAR})")
    common.add_argument("--out", help="write the main output here instead of stdout")
    common.add_argument("--plot", help="write an SVG plot here")
    common.add_argument("--seed", type=int, help="override simulation.seed")
    common.add_argument("--field-gauss", type=float, help="axial bias field (G), overrides system.B_G")
    common.add_argument("--temp-k", type=float, help="temperature (K)")

    p = argparse.ArgumentParser(prog="nvthermo", description=__doc__)
    p.add_argument("--version", action="version", version=f"nvthermo {__version__}")
    sub = p.add_subparsers(dest="command", metavar="<subcommand>")
    sub.required = True

    s = sub.add_parser("transitions", parents=[common], help="labeled transition frequencies")
    s.add_argument("--levels", action="store_true", help="list labeled energy levels instead")
    s.set_defaults(func=cmd_transitions)

    s = sub.add_parser("extract", parents=[common], help="two-manifold mean over a temperature series")
    s.add_argument("--nucleus", help="13C site, e.g. C13-1")
    s.set_defaults(func=cmd_extract)

    s = sub.add_parser("simulate-ramsey", parents=[common], help="synthesize a Ramsey trace")
    s.add_argument("--nucleus")
    s.add_argument("--manifold", type=int, choices=(1, -1))
    s.set_defaults(func=cmd_simulate_ramsey)

    s = sub.add_parser("fit-fringe", parents=[common], help="fit a Ramsey trace")
    s.add_argument("--trace", help="trace CSV (t_s,signal)")
    s.set_defaults(func=cmd_fit_fringe)

    s = sub.add_parser("tempco", parents=[common], help="temperature coefficients from measurements")
    s.add_argument("--measurements", help="measurement CSV")
    s.add_argument("--unweighted", action="store_true", help="plain average across NVs")
    s.set_defaults(func=cmd_tempco)

    s = sub.add_parser("thermo", parents=[common], help="A(T) from mode and expansion tables")
    s.add_argument("--modes", help="mode table CSV")
    s.add_argument("--expansion", help="expansion table CSV")
    s.add_argument("--demo", choices=sorted(RECIPES), help="use a bundled synthetic demo model")
    s.add_argument("--a-stc0", type=float, help="A_stc(0) in Hz")
    s.add_argument("--c-stc", type=float, help="static coefficient in Hz per unit expansion")
    s.add_argument("--curve", help="write the A(T) curve CSV here")
    s.add_argument("--modes-plot", help="SVG of merged per-phonon contributions")
    s.set_defaults(func=cmd_thermo)

    s = sub.add_parser("odmr", parents=[common], help="simulate and fit a pulsed-ODMR spectrum")
    s.add_argument("--spectrum", help="write the spectrum CSV here")
    s.set_defaults(func=cmd_odmr)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args.config)
        args.func(args, cfg)
    except (NVThermoError, OSError) as exc:
        print(f"nvthermo {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
