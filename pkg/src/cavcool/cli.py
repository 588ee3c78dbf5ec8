"""Command-line front end.

    cavcool coeffs         coefficients at one position plus the averaged report
    cavcool map            wavelength-averaged friction on a detuning grid
    cavcool modes-scan     temperature and photon count versus mode number
    cavcool position-scan  temperature along the axis relative to the waist
    cavcool simulate       stochastic centre-of-mass trajectories
    cavcool verify         closed forms versus the master-equation oracle

Units: hbar = gamma = k = 1, gamma being the dipole decay rate (half the
spontaneous emission rate). To convert, multiply rates by gamma, lengths by
1/k = lambda/(2 pi), momenta by hbar*k and temperatures by hbar*gamma/k_B.

Exit status: 0 success, 1 invalid input, 2 verification failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from . import __version__, linres, thermo
from .cmsim import SimulationError, TrajectoryConfig, simulate
from .modes import DEFAULT_GOUY_SCALE, ModeSet
from .params import (PARAM_KEYS, ParameterError, SystemParams, params_from_mapping,
                     parse_value, read_config)

MODE_KEYS = ("n_index_max", "gouy_scale_k", "envelope_on")
SCAN_KEYS = ("scan.delta_diff", "scan.coupling_rule", "scan.z_center")
SIM_KEYS = tuple(f"simulate.{f.name}" for f in dataclasses.fields(TrajectoryConfig))
ALLOWED_KEYS = set(PARAM_KEYS) | set(MODE_KEYS) | set(SCAN_KEYS) | set(SIM_KEYS)

DEFAULT_N_LIST = "0,1,2,3,4,5,6,7,8,16,32,64,96,128"


class UsageError(Exception):
    pass


def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _parse_sets(items):
    out = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = parse_value(v)
    return out


def resolve_settings(args):
    settings = {}
    if args.config:
        try:
            settings.update(read_config(args.config))
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
    settings.update(_parse_sets(args.set))
    unknown = sorted(set(settings) - ALLOWED_KEYS)
    if unknown:
        raise ParameterError([f"unknown configuration key {k!r}" for k in unknown])
    params = params_from_mapping({k: v for k, v in settings.items() if k in PARAM_KEYS})
    mode_set = ModeSet(
        n_index_max=int(settings.get("n_index_max", 0)),
        g_single=params.g_single,
        gouy_scale=float(settings.get("gouy_scale_k", DEFAULT_GOUY_SCALE)),
        envelope_on=bool(settings.get("envelope_on", True)))
    return settings, params, mode_set


def manifest_lines(args, params, mode_set, extra=None):
    stamp = os.environ.get("SOURCE_DATE_EPOCH")
    started = time.strftime("%Y-%m-%dT%H:%M:%SZ",
                            time.gmtime(int(stamp) if stamp else time.time()))
    lines = [f"cavcool {__version__}", f"subcommand = {args.command}",
             f"started = {started}"]
    if args.out:
        lines.append(f"output = {args.out}")
    for f in dataclasses.fields(params):
        lines.append(f"{f.name} = {fmt(getattr(params, f.name))}")
    lines.append(f"n_index_max = {mode_set.n_index_max}")
    lines.append(f"gouy_scale_k = {fmt(mode_set.gouy_scale)}")
    lines.append(f"envelope_on = {fmt(mode_set.envelope_on)}")
    for k, v in (extra or {}).items():
        lines.append(f"{k} = {fmt(v)}")
    return [f"# {line}" for line in lines]


def emit_csv(args, header, rows, manifest):
    text = "\n".join(manifest + [",".join(header)]
                     + [",".join(fmt(v) for v in row) for row in rows]) + "\n"
    write_output(args.out, text)


def write_output(path, text):
    """Write atomically: a failed run leaves no partial file behind."""
    if not path:
        sys.stdout.write(text)
        return
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _workers():
    value = os.environ.get("CAVCOOL_WORKERS")
    return int(value) if value else None


def cmd_coeffs(args, settings, params, mode_set):
    mc = linres.motion_coefficients(params, mode_set, args.z)
    z_center = float(settings.get("scan.z_center", args.z))
    rep = thermo.thermo_report(params, mode_set, z_center)
    lines = manifest_lines(args, params, mode_set, {"z": args.z})
    lines += [f"f_p = {fmt(mc.f_p)}", f"beta = {fmt(mc.beta)}", f"d_dip = {fmt(mc.d_dip)}",
              f"d_rec = {fmt(mc.d_rec)}", f"excitation = {fmt(mc.excitation)}",
              f"photons_total = {fmt(float(np.sum(mc.photons)))}",
              f"beta_avg = {fmt(rep.beta_avg)}", f"d_avg = {fmt(rep.d_avg)}",
              f"excitation_avg = {fmt(rep.excitation_avg)}"]
    if rep.heating:
        lines.append("regime = heating")
    else:
        lines += ["regime = cooling", f"temperature = {fmt(rep.temperature)}",
                  f"cooling_time = {fmt(rep.cooling_time)}", f"n_spont = {fmt(rep.n_spont)}"]
    write_output(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_map(args, settings, params, mode_set):
    da = np.linspace(args.da_min, args.da_max, args.da_n)
    dc = np.linspace(args.dc_min, args.dc_max, args.dc_n)
    z_center = float(settings.get("scan.z_center", 0.0))
    m = thermo.detuning_map(params, mode_set, da, dc, z_center)
    manifest = manifest_lines(args, params, mode_set, {"z_center": z_center})
    emit_csv(args, ["delta_a", "delta_c", "beta", "d_dip", "d_rec", "temperature"],
             m.rows(), manifest)
    return 0


def _int_list(text):
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise UsageError(f"bad integer list {text!r}") from exc


def cmd_modes_scan(args, settings, params, mode_set):
    delta_diff = float(settings.get("scan.delta_diff", args.delta_diff))
    n_list = _int_list(args.n_list)
    points = thermo.modes_scan(params, n_list, delta_diff, workers=_workers())
    rows = [(pt.key, pt.g, pt.delta_a, pt.delta_c, pt.report.beta_avg, pt.report.d_avg,
             pt.report.temperature, pt.report.n_spont) for pt in points]
    manifest = manifest_lines(args, params, mode_set, {"delta_diff": delta_diff})
    emit_csv(args, ["N", "g_eff", "delta_a", "delta_c", "beta_avg", "d_avg", "T", "N_ph"],
             rows, manifest)
    return 0


def cmd_position_scan(args, settings, params, mode_set):
    delta_diff = float(settings.get("scan.delta_diff", args.delta_diff))
    rule = str(settings.get("scan.coupling_rule", args.coupling_rule))
    z0 = mode_set.gouy_scale
    zs = np.linspace(args.z_min, args.z_max, args.z_n) * z0
    points = thermo.position_scan(params, mode_set, zs, delta_diff, rule, workers=_workers())
    rows = [(pt.key, pt.key / z0, pt.g, pt.delta_a, pt.delta_c, pt.report.temperature,
             pt.normalized_temperature) for pt in points]
    manifest = manifest_lines(args, params, mode_set,
                              {"delta_diff": delta_diff, "coupling_rule": rule})
    emit_csv(args, ["z", "z_over_z0", "g_loc", "delta_a", "delta_c", "T", "T_rel"],
             rows, manifest)
    return 0


def trajectory_config(settings):
    kw = {k.split(".", 1)[1]: v for k, v in settings.items() if k.startswith("simulate.")}
    casts = {f.name: f.type for f in dataclasses.fields(TrajectoryConfig)}
    out = {}
    for k, v in kw.items():
        t = casts[k]
        if t == "int":
            out[k] = int(v)
        elif t == "bool":
            out[k] = bool(v)
        elif t == "str":
            out[k] = str(v)
        else:
            out[k] = float(v)
    return TrajectoryConfig(**out)


def cmd_simulate(args, settings, params, mode_set):
    try:
        config = trajectory_config(settings)
    except (TypeError, ValueError) as exc:
        raise ParameterError([f"simulate settings: {exc}"]) from exc
    stats = simulate(config, params, mode_set)
    extra = {f"simulate.{f.name}": getattr(config, f.name)
             for f in dataclasses.fields(config) if getattr(config, f.name) is not None}
    extra.update({"temperature": stats.temperature,
                  "temperature_stderr": stats.temperature_stderr,
                  "below_recoil_floor": stats.below_recoil_floor})
    manifest = manifest_lines(args, params, mode_set, extra)
    emit_csv(args, ["t", "p2_mean", "p2_stderr"], stats.rows(), manifest)
    print(f"kinetic temperature {stats.temperature:.6g} +- {stats.temperature_stderr:.2g} "
          "hbar*gamma", file=sys.stderr)
    return 0


def cmd_verify(args, settings, params, mode_set):
    from .verify import format_table, verification_suite
    base = params if (args.config or args.set) else None
    checks = verification_suite(base)
    text = format_table(checks) + "\n"
    write_output(args.out, text) if args.out else sys.stdout.write(text)
    return 0 if all(c.passed for c in checks) else 2


COMMANDS = {
    "coeffs": cmd_coeffs,
    "map": cmd_map,
    "modes-scan": cmd_modes_scan,
    "position-scan": cmd_position_scan,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value parameter file")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override one configuration key (repeatable)")

    parser = _Parser(prog="cavcool", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("coeffs", parents=[common], help="coefficients at one position")
    p.add_argument("--z", type=float, default=math.pi / 4, help="axial position (1/k)")

    p = sub.add_parser("map", parents=[common], help="friction map over detunings")
    for axis in ("da", "dc"):
        p.add_argument(f"--{axis}-min", type=float, default=-10.0)
        p.add_argument(f"--{axis}-max", type=float, default=10.0)
        p.add_argument(f"--{axis}-n", type=int, default=101)

    p = sub.add_parser("modes-scan", parents=[common], help="scan the number of modes")
    p.add_argument("--n-list", default=DEFAULT_N_LIST, help="comma-separated N values")
    p.add_argument("--delta-diff", type=float, default=-50.0,
                   help="fixed delta_a - delta_c (gamma)")

    p = sub.add_parser("position-scan", parents=[common], help="scan the axial position")
    p.add_argument("--z-min", type=float, default=0.0, help="start, in units of z0")
    p.add_argument("--z-max", type=float, default=0.5, help="end, in units of z0")
    p.add_argument("--z-n", type=int, default=101)
    p.add_argument("--delta-diff", type=float, default=-50.0)
    p.add_argument("--coupling-rule", choices=thermo.COUPLING_RULES, default="envelope")

    sub.add_parser("simulate", parents=[common], help="centre-of-mass trajectories")
    sub.add_parser("verify", parents=[common], help="oracle cross-checks")
    return parser


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        settings, params, mode_set = resolve_settings(args)
        return COMMANDS[args.command](args, settings, params, mode_set)
    except (UsageError, ParameterError, SimulationError, ValueError) as exc:
        print(f"cavcool: error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
