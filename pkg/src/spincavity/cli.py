"""Command-line front end.

Subcommands: simulate, fit, sweep, derive, synth. All outputs are
written atomically; on a nonzero exit nothing is written. Exit codes:
0 success, 2 input validation failure, 3 numerical failure. Each run
prints a JSON summary with the tool version and SHA-256 hashes of the
input files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, dataio, fitkit, hilbert, spectra, svgplot
from .errors import (DataValidationError, DomainError, FormatError,
                     ModelError, NumericalError, SchemaError, ShapeError,
                     StateError)
from .fitkit import FitProblem, ModelKind, free_param
from .hilbert import SystemParams
from .physcalc import (cooperativity, is_strongly_coupled, lande_g_factor,
                       splitting_nm_to_ghz, thermal_spin_up_population,
                       wavelength_to_frequency)
from .spectra import FringeModel, ScanConfig

_VALIDATION_ERRORS = (DomainError, SchemaError, FormatError,
                      DataValidationError, ShapeError)
_NUMERICAL_ERRORS = (NumericalError, ModelError, StateError)


class CliError(Exception):
    """Flag-level validation problem; maps to exit code 2."""


def _parse_scan(text: str, wavelength_axis: bool, scale: float,
                background: float) -> ScanConfig:
    parts = text.split(",")
    if len(parts) != 3:
        raise CliError(f"--scan expects START,STOP,N, got '{text}'")
    try:
        start, stop = float(parts[0]), float(parts[1])
        n = int(parts[2])
    except ValueError as exc:
        raise CliError(f"--scan expects numbers: {exc}") from exc
    if wavelength_axis:
        # interpret the endpoints as nm and convert; order flips
        a = wavelength_to_frequency(start)
        b = wavelength_to_frequency(stop)
        start, stop = min(a, b), max(a, b)
    return ScanConfig(start=start, stop=stop, n_points=n,
                      scale=scale, background=background)


def _parse_fields(text: str) -> list[float]:
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        if len(parts) != 3:
            raise ValueError("expected B0:B1:STEP")
        b0, b1, step = (float(p) for p in parts)
    except ValueError as exc:
        raise CliError(f"--fields expects B0:B1:STEP, got '{text}' ({exc})") from exc
    if step <= 0:
        raise CliError(f"--fields step must be positive, got {step}")
    fields = []
    b = b0
    while b <= b1 + 1e-9:
        fields.append(round(b, 9))
        b += step
    return fields or [b0]


def _parse_kv(pairs: list[str]) -> dict[str, float]:
    out = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep:
            raise CliError(f"expected KEY=VALUE, got '{pair}'")
        try:
            out[key.strip()] = float(value)
        except ValueError as exc:
            raise CliError(f"value of '{key}' is not a number: {value}") from exc
    return out


def _parse_fringe(text: str) -> FringeModel:
    parts = text.split(",")
    if len(parts) != 3:
        raise CliError(f"--fringe expects AMP,PERIOD,PHASE, got '{text}'")
    try:
        amp, period, phase = (float(p) for p in parts)
    except ValueError as exc:
        raise CliError(f"--fringe expects numbers: {exc}") from exc
    return FringeModel(amplitude=amp, period=period, phase=phase)


def _dit_view(params: SystemParams) -> dict:
    """Single-transition view of the dominant (transition 4) coupling."""
    return {
        "g": params.g4,
        "gamma": params.gamma4 / 2.0 + params.gamma_d4,
        "delta": params.omega_x - params.delta_h - params.omega_c,
    }


def _clean_spectrum(model: str, params: SystemParams, cfg: ScanConfig,
                    p_up: float | None):
    """Spectrum plus summary extras for simulate/synth."""
    extras = {}
    if model == "dit":
        view = _dit_view(params)
        spec = spectra.dit_spectrum(view["g"], params.kappa, view["gamma"],
                                    view["delta"], params.omega_c, cfg)
    elif model == "two":
        spec = spectra.two_transition_spectrum(params, cfg)
    elif model == "master":
        spec = spectra.master_equation_spectrum(params, cfg)
        closed = spectra.two_transition_spectrum(params, cfg)
        extras["max_rel_diff_master_vs_two"] = spectra.max_relative_difference(
            spec, closed)
        dip = float(spec.freq_ghz[int(np.argmin(spec.reflectivity))])
        extras["fock_convergence_shift"] = hilbert.fock_convergence_shift(
            params, dip)
    elif model == "mixed":
        if p_up is None:
            raise CliError("--model mixed requires --pup")
        up = spectra.lorentzian_spectrum(params.kappa, params.omega_c, cfg)
        down = spectra.two_transition_spectrum(params, cfg)
        spec = spectra.mixed_spectrum(p_up, up, down)
    else:
        raise CliError(f"unknown model '{model}'")
    return spec, extras


def _summary(command: str, inputs: list, outputs: list, **extras) -> dict:
    record = {
        "command": command,
        "version": __version__,
        "inputs": {str(p): dataio.sha256_of(p) for p in inputs},
        "outputs": [str(p) for p in outputs],
    }
    record.update(extras)
    return record


def _flush_writes(pending) -> None:
    """Write all rendered outputs, after validating every destination.

    Content is rendered before this point, so a validation or numerical
    failure never leaves partial output files behind.
    """
    for path, _ in pending:
        parent = Path(path).parent
        if not parent.exists():
            raise CliError(f"output directory does not exist: {parent}")
    for path, text in pending:
        dataio.atomic_write_text(path, text)


def _render_plot(entries, title, nm_axis=False) -> str:
    return svgplot.render_spectra(entries, title=title, nm_axis=nm_axis)


def _cmd_simulate(args) -> dict:
    if args.pup is not None and args.model != "mixed":
        raise CliError("--pup only applies to --model mixed")
    params, _ = dataio.load_params(args.params)
    cfg = _parse_scan(args.scan, args.wavelength_axis, args.scale, args.background)
    spec, extras = _clean_spectrum(args.model, params, cfg, args.pup)
    pending = [(args.out, dataio.spectrum_to_text(spec))]
    if args.plot:
        pending.append((args.plot, _render_plot(
            [(spec, args.model, False)],
            f"simulated reflectivity ({args.model})",
            nm_axis=args.wavelength_axis)))
    _flush_writes(pending)
    return _summary("simulate", [args.params], [p for p, _ in pending], **extras)


def _cmd_synth(args) -> dict:
    if args.pup is not None and args.model != "mixed":
        raise CliError("--pup only applies to --model mixed")
    params, _ = dataio.load_params(args.params)
    cfg = _parse_scan(args.scan, args.wavelength_axis, args.scale, args.background)
    fringe = _parse_fringe(args.fringe)
    spec, extras = _clean_spectrum(args.model, params, cfg, args.pup)
    noisy = spectra.synthesize_noisy(spec, args.noise, fringe, seed=args.seed)
    _flush_writes([(args.out, dataio.spectrum_to_text(noisy))])
    return _summary("synth", [args.params], [args.out], seed=args.seed, **extras)


_SINGLE_DEFAULTS_NOTE = (
    "for --model single, g/gamma/delta default to the transition-4 view of "
    "the params file; for --model mixed, p_up defaults to 0 unless freed")


def _fit_fixed_values(model: ModelKind, params: SystemParams,
                      overrides: dict) -> dict:
    values = {"kappa": params.kappa, "omega_c": params.omega_c,
              "scale": 1.0, "background": 0.0}
    if model is ModelKind.SINGLE_TRANSITION:
        view = _dit_view(params)
        view["g"] = float(np.hypot(params.g3, params.g4))
        values.update(view)
    elif model is ModelKind.MIXED_TWO_TRANSITION:
        values.update({
            "p_up": 0.0,
            "g3": params.g3, "g4": params.g4,
            "gamma3": params.gamma3, "gamma4": params.gamma4,
            "gamma_d3": params.gamma_d3, "gamma_d4": params.gamma_d4,
            "omega_x": params.omega_x, "delta_h": params.delta_h,
        })
    values.update(overrides)
    return values


def _fit_seeds(model: ModelKind, data, params: SystemParams,
               g_total: float | None) -> dict:
    if model is ModelKind.LORENTZIAN:
        return fitkit.seed_lorentzian(data)
    if model is ModelKind.SINGLE_TRANSITION:
        return fitkit.seed_single_transition(data, params.kappa)
    total = g_total if g_total is not None else max(
        float(np.hypot(params.g3, params.g4)), 1e-3)
    seeds = fitkit.seed_mixed(data, params.kappa, params.delta_h, total)
    return seeds


def _cmd_fit(args) -> dict:
    data = dataio.load_spectrum(args.data)
    params, _ = dataio.load_params(args.params)
    model = ModelKind(args.model)
    free_names = [n.strip() for n in args.free.split(",") if n.strip()]
    if not free_names:
        raise CliError("--free needs at least one parameter name")
    g_total = None
    if args.constraint:
        key, sep, value = args.constraint.partition("=")
        if key.strip() != "gtotal" or not sep:
            raise CliError("--constraint expects gtotal=VALUE")
        g_total = float(value)
    overrides = _parse_kv(args.set or [])
    inits = _parse_kv(args.init or [])

    all_values = _fit_fixed_values(model, params, overrides)
    seeds = _fit_seeds(model, data, params, g_total)
    free = {}
    for name in free_names:
        if name not in fitkit.MODEL_PARAMS[model]:
            raise CliError(f"'{name}' is not a parameter of model '{model.value}'")
        init = inits.get(name, seeds.get(name, all_values.get(name)))
        if init is None:
            raise CliError(f"no initial value available for '{name}'")
        free[name] = free_param(name, float(init))
    fixed = {n: all_values[n] for n in fitkit.MODEL_PARAMS[model]
             if n not in free and not (g_total is not None and n == "g3")}

    center_weight = None
    if args.center_weight:
        parts = args.center_weight.split(",")
        if len(parts) != 2:
            raise CliError("--center-weight expects N,FACTOR")
        center_weight = (int(parts[0]), float(parts[1]))

    problem = FitProblem(data=data, model=model, free=free, fixed=fixed,
                         g_total=g_total, center_weight=center_weight)
    result = fitkit.fit(problem)

    provenance = {"data_sha256": dataio.sha256_of(args.data),
                  "params_sha256": dataio.sha256_of(args.params),
                  "tool_version": __version__}
    if "seed" in data.meta:
        provenance["data_seed"] = data.meta["seed"]
    report = dataio.fit_report_record(result, provenance)
    pending = [(args.out, json.dumps(report, indent=2, sort_keys=True) + "\n")]
    if args.plot:
        model_fn = fitkit.MODEL_FUNCS[model]
        values = dict(fixed)
        values.update(result.params)
        curve = spectra.Spectrum(data.freq_ghz,
                                 model_fn(data.freq_ghz, values),
                                 meta={"label": "fit"})
        pending.append((args.plot, _render_plot(
            [(data, "data", True), (curve, "fit", False)],
            f"fit ({model.value})")))
    _flush_writes(pending)
    return _summary("fit", [args.data, args.params], [p for p, _ in pending],
                    converged=result.converged,
                    residual_rms=result.residual_rms)


def _cmd_sweep(args) -> dict:
    params, levels = dataio.load_params(args.params)
    if args.levels:
        levels = dataio.load_levels(args.levels)
    if levels is None:
        raise CliError("no level structure: provide --levels or put the "
                       "level keys in the params file")
    fields = _parse_fields(args.fields)
    cfg = _parse_scan(args.scan, args.wavelength_axis, args.scale, args.background)
    sweep = spectra.field_sweep(levels, params, fields, cfg)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    pending = [(outdir / f"field_{b:06.3f}T.csv", dataio.spectrum_to_text(spec))
               for b, spec in zip(fields, sweep)]
    if args.plot:
        bare_peak = float(np.max(spectra.lorentzian_spectrum(
            params.kappa, params.omega_c, cfg).reflectivity))
        pending.append((args.plot, svgplot.render_sweep_map(
            sweep, title="reflectivity vs magnetic field", norm=bare_peak)))
    _flush_writes(pending)
    inputs = [args.params] + ([args.levels] if args.levels else [])
    return _summary("sweep", inputs, [p for p, _ in pending],
                    n_fields=len(fields))


def _cmd_derive(args) -> dict:
    kv = _parse_kv(args.values)
    what = args.what
    try:
        if what == "gfactor":
            if "splitting_ghz" in kv:
                splitting = kv["splitting_ghz"]
            else:
                splitting = splitting_nm_to_ghz(kv["splitting_nm"], kv["center_nm"])
            out = {"what": what,
                   "splitting_ghz": splitting,
                   "g_factor": lande_g_factor(splitting, kv["field"])}
        elif what == "pup":
            out = {"what": what,
                   "p_up": thermal_spin_up_population(
                       kv["delta_e_mev"], kv.get("temp", 4.2))}
        elif what == "cooperativity":
            out = {"what": what,
                   "cooperativity": cooperativity(kv["g"], kv["kappa"], kv["gamma"]),
                   "note": "unrounded; inputs are value/2pi in GHz"}
        elif what == "strong":
            out = {"what": what,
                   "strong_coupling": is_strongly_coupled(
                       kv["g"], kv["kappa"], kv["gamma"]),
                   "coherent_side_4g": 4.0 * kv["g"],
                   "loss_side_kappa_plus_gamma": kv["kappa"] + kv["gamma"]}
        else:  # pragma: no cover - argparse restricts choices
            raise CliError(f"unknown derivation '{what}'")
    except KeyError as exc:
        raise CliError(f"missing required value {exc} for --what {what}") from exc
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spincavity",
        description="Simulate and fit spin-dependent cavity reflectivity spectra.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_scan_options(p):
        p.add_argument("--scan", required=True,
                       help="probe grid START,STOP,N in GHz "
                            "(nm when --wavelength-axis is set)")
        p.add_argument("--scale", type=float, default=1.0,
                       help="response scale factor (default 1)")
        p.add_argument("--background", type=float, default=0.0,
                       help="constant background (default 0)")
        p.add_argument("--wavelength-axis", action="store_true",
                       help="interpret --scan in nm and label plots in nm")

    sim = sub.add_parser("simulate", help="compute a reflectivity spectrum")
    sim.add_argument("--params", required=True)
    sim.add_argument("--model", required=True,
                     choices=("dit", "two", "master", "mixed"))
    sim.add_argument("--pup", type=float, default=None,
                     help="spin-up occupation for --model mixed")
    add_scan_options(sim)
    sim.add_argument("--out", required=True)
    sim.add_argument("--plot", default=None, help="SVG output path")
    sim.set_defaults(func=_cmd_simulate)

    fitp = sub.add_parser("fit", help="fit a spectrum to a model")
    fitp.add_argument("--data", required=True)
    fitp.add_argument("--params", required=True)
    fitp.add_argument("--model", required=True,
                      choices=tuple(m.value for m in ModelKind))
    fitp.add_argument("--free", required=True,
                      help="comma-separated free parameter names")
    fitp.add_argument("--constraint", default=None,
                      help="gtotal=VALUE couples g3 and g4 (mixed model)")
    fitp.add_argument("--set", action="append", metavar="NAME=VALUE",
                      help=f"fix a model parameter; {_SINGLE_DEFAULTS_NOTE}")
    fitp.add_argument("--init", action="append", metavar="NAME=VALUE",
                      help="override the heuristic initial value")
    fitp.add_argument("--center-weight", default=None, metavar="N,FACTOR",
                      help="boost the N points nearest the dip by FACTOR")
    fitp.add_argument("--out", required=True)
    fitp.add_argument("--plot", default=None)
    fitp.set_defaults(func=_cmd_fit)

    sw = sub.add_parser("sweep", help="spectra across a magnetic-field range")
    sw.add_argument("--levels", default=None,
                    help="JSON with the Zeeman level structure")
    sw.add_argument("--params", required=True)
    sw.add_argument("--fields", required=True, help="B0:B1:STEP in tesla")
    add_scan_options(sw)
    sw.add_argument("--out", required=True, help="output directory")
    sw.add_argument("--plot", default=None)
    sw.set_defaults(func=_cmd_sweep)

    dv = sub.add_parser("derive", help="closed-form derived quantities")
    dv.add_argument("--what", required=True,
                    choices=("gfactor", "pup", "cooperativity", "strong"))
    dv.add_argument("values", nargs="*", metavar="KEY=VALUE")
    dv.set_defaults(func=_cmd_derive)

    sy = sub.add_parser("synth", help="deterministic synthetic noisy spectrum")
    sy.add_argument("--params", required=True)
    sy.add_argument("--model", required=True,
                    choices=("dit", "two", "master", "mixed"))
    sy.add_argument("--pup", type=float, default=None)
    add_scan_options(sy)
    sy.add_argument("--noise", type=float, required=True,
                    help="relative noise level")
    sy.add_argument("--fringe", default="0,1,0", metavar="AMP,PERIOD,PHASE")
    sy.add_argument("--seed", type=int, default=0)
    sy.add_argument("--out", required=True)
    sy.set_defaults(func=_cmd_synth)

    return parser


def _merge_scan_flag(argv: list[str]) -> list[str]:
    """Join '--scan -60,60,241' into one token.

    A scan starting at a negative frequency would otherwise be read by
    argparse as an option string.
    """
    merged = []
    i = 0
    while i < len(argv):
        if argv[i] == "--scan" and i + 1 < len(argv):
            merged.append(f"--scan={argv[i + 1]}")
            i += 2
        else:
            merged.append(argv[i])
            i += 1
    return merged


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(_merge_scan_flag(list(argv)))
    try:
        summary = args.func(args)
    except (CliError, *_VALIDATION_ERRORS) as exc:
        print(f"spincavity: error: {exc}", file=sys.stderr)
        return 2
    except _NUMERICAL_ERRORS as exc:
        print(f"spincavity: numerical error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"spincavity: error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(summary, indent=2, sort_keys=True, default=float))
    return 0


if __name__ == "__main__":
    sys.exit(main())
