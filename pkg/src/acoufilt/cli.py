"""Command-line surface of the toolkit.

Every subcommand is a thin wrapper over the core package: load inputs, call
one pipeline operation, write the artifacts, print a ``key = value`` report
on stdout.  Failures print a single ``<category>: <detail>`` line on stderr
and exit 1 (2 for usage errors), so scripts can branch on the category.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import dispersion as disp
from . import extraction, files, network, synth, touchstone
from .errors import ToolkitError, UsageError

_BUILTIN_NAMES = {"sh0": disp.AcousticMode.SH0, "s0": disp.AcousticMode.S0}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _num(value) -> str:
    return repr(float(value))


def _print_report(pairs) -> None:
    for key, value in pairs:
        if isinstance(value, float):
            value = _num(value)
        print(f"{key} = {value}")


def _load_table(spec: str, consts) -> disp.DispersionTable:
    name = spec.lower()
    if name in _BUILTIN_NAMES:
        return files.load_builtin_table(_BUILTIN_NAMES[name])
    return files.read_dispersion_table(spec, consts=consts)


def _constants(args) -> disp.PlatformConstants:
    return disp.PlatformConstants(
        film_thickness_h=args.film_thickness,
        electrode_thickness=args.electrode_thickness,
        v_ssb=args.v_ssb,
    )


def _run_config(args) -> files.RunConfig:
    start, stop, points = args.grid
    if points != int(points):
        raise UsageError("grid point count must be an integer")
    grid = files.FrequencyGrid(
        start_hz=start, stop_hz=stop, points=int(points), spacing=args.spacing
    )
    constants = (
        _constants(args) if hasattr(args, "film_thickness") else disp.PlatformConstants()
    )
    tables = getattr(args, "table", None)
    if tables is None:
        table_paths = ()
    elif isinstance(tables, str):
        table_paths = (tables,)
    else:
        table_paths = tuple(tables)
    return files.RunConfig(
        grid=grid, constants=constants, table_paths=table_paths, output_dir=args.out
    )


def _out_path(args, suffix: str, default_stem: str) -> Path:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir / f"{args.name or default_stem}{suffix}"


def _add_constants_args(p) -> None:
    p.add_argument("--film-thickness", type=float, default=450e-9,
                   help="piezo film thickness in m (default 450e-9)")
    p.add_argument("--electrode-thickness", type=float, default=120e-9,
                   help="electrode thickness in m (default 120e-9)")
    p.add_argument("--v-ssb", type=float, default=7150.0,
                   help="slow shear bulk velocity in m/s (default 7150)")


def _add_grid_args(p) -> None:
    p.add_argument("--grid", type=float, nargs=3, required=True,
                   metavar=("START_HZ", "STOP_HZ", "POINTS"),
                   help="sweep grid: start, stop, point count")
    p.add_argument("--spacing", choices=("linear", "log"), default="linear")


def _add_out_args(p, default_stem: str) -> None:
    p.add_argument("--out", default=".", help="output directory (default .)")
    p.add_argument("--name", default=None,
                   help=f"artifact base name (default {default_stem!r})")


# ---------------------------------------------------------------------------
# subcommands

def _cmd_dispersion(args) -> int:
    consts = _constants(args)
    table = _load_table(args.table, consts)
    x = consts.film_thickness_h / args.wavelength
    vp, k2 = disp.interpolate(table, x)
    _print_report([
        ("mode", table.mode.value),
        ("lambda_m", args.wavelength),
        ("h_over_lambda", x),
        ("vp_mps", vp),
        ("k2", k2),
        ("frequency_hz", disp.frequency_for(table, consts, args.wavelength)),
        ("regime", disp.classify_regime(consts, args.wavelength).value),
    ])
    return 0


def _cmd_resonator(args) -> int:
    config = _run_config(args)
    consts = config.constants
    table = _load_table(config.table_paths[0], consts)
    with open(args.geom, "r", encoding="utf-8") as fh:
        geom = files.parse_geometry(fh.read())
    spurs = None
    if args.spurs:
        with open(args.spurs, "r", encoding="utf-8") as fh:
            spurs = files.parse_spur_environment(fh.read())
    model = synth.derive_resonator(table, consts, geom, spurs)
    sweep = network.one_port_sweep(model, config.grid.build(), args.z0)
    path = _out_path(args, ".s1p", "resonator")
    path.write_text(touchstone.write_touchstone(sweep, format=args.format), encoding="utf-8")
    report = extraction.resonator_report(model)
    _print_report([
        ("s1p_path", str(path)),
        ("fr_hz", report["fr_hz"]),
        ("fa_hz", report["fa_hz"]),
        ("k2", report["k2"]),
        ("q_analytic", report["q"]),
        ("c0_f", model.c0),
        ("spur_count", str(len(model.spurs))),
        ("regime", disp.classify_regime(consts, geom.wavelength).value),
    ])
    return 0


def _cmd_filter(args) -> int:
    config = _run_config(args)
    with open(args.topology, "r", encoding="utf-8") as fh:
        topology = files.parse_topology(fh.read())
    sweep = network.cascade_sweep(topology, config.grid.build())
    path = _out_path(args, ".s2p", Path(args.topology).stem)
    path.write_text(touchstone.write_touchstone(sweep, format=args.format), encoding="utf-8")
    metrics = network.filter_metrics(sweep, passband_hint=args.band)
    _print_report([
        ("s2p_path", str(path)),
        ("fc_hz", metrics.fc),
        ("il_db", metrics.il_db),
        ("bw3db_hz", metrics.bw3db),
        ("fbw", metrics.fbw),
    ])
    return 0


def _cmd_synth(args) -> int:
    consts = _constants(args)
    with open(args.spec, "r", encoding="utf-8") as fh:
        spec = files.parse_design_spec(fh.read())
    tables = [_load_table(t, consts) for t in args.table]
    result = synth.ladder_synthesize(spec, tables, consts, seed=args.seed)
    stem = args.name or Path(args.spec).stem
    topo_path = _out_path(args, ".topology.txt", stem)
    topo_path.write_text(files.format_topology(result.topology), encoding="utf-8")
    b = max(spec.fbw_target, 0.02)
    grid = np.linspace(spec.fc_target * (1 - 2.2 * b), spec.fc_target * (1 + 2.2 * b), 2001)
    sweep = network.cascade_sweep(result.topology, grid)
    s2p_path = _out_path(args, ".s2p", stem)
    s2p_path.write_text(touchstone.write_touchstone(sweep, format=args.format), encoding="utf-8")
    m = result.metrics
    _print_report([
        ("topology_path", str(topo_path)),
        ("s2p_path", str(s2p_path)),
        ("mode", result.mode.value),
        ("fc_target_hz", spec.fc_target),
        ("fc_achieved_hz", m.fc),
        ("fc_error_rel", (m.fc - spec.fc_target) / spec.fc_target),
        ("fbw_target", spec.fbw_target),
        ("fbw_achieved", m.fbw),
        ("fbw_error_rel", (m.fbw - spec.fbw_target) / spec.fbw_target),
        ("il_db", m.il_db),
        ("il_max_db", spec.il_max_db),
        ("series_lambda_m", result.series_wavelength),
        ("shunt_lambda_m", result.shunt_wavelength),
        ("series_c0_f", result.series_c0),
        ("shunt_c0_f", result.shunt_c0),
        ("converged", str(result.converged).lower()),
        ("evaluations", str(result.evaluations)),
    ])
    return 0


def _cmd_analyze(args) -> int:
    with open(args.snp, "r", encoding="utf-8") as fh:
        sparams = touchstone.read_touchstone(fh.read())
    want = None
    if args.one_port:
        want = 1
    elif args.two_port:
        want = 2
    if want is not None and sparams.ports != want:
        raise UsageError(f"file has {sparams.ports} port(s), not {want}")
    if sparams.ports == 1:
        curve = extraction.bode_q(sparams, smooth_points=args.smooth)
        path = _out_path(args, ".bodeq.csv", Path(args.snp).stem)
        lines = ["frequency_hz,q"]
        lines += [f"{_num(f)},{_num(q)}" for f, q in zip(curve.grid, curve.q)]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        _print_report([
            ("bodeq_csv_path", str(path)),
            ("qmax", curve.qmax),
            ("f_at_qmax_hz", curve.f_at_qmax),
        ])
    else:
        metrics = network.filter_metrics(sparams, passband_hint=args.band)
        _print_report([
            ("fc_hz", metrics.fc),
            ("il_db", metrics.il_db),
            ("bw3db_hz", metrics.bw3db),
            ("fbw", metrics.fbw),
        ])
    return 0


def _cmd_fit(args) -> int:
    with open(args.snp, "r", encoding="utf-8") as fh:
        sparams = touchstone.read_touchstone(fh.read())
    report = extraction.fit_mbvd(sparams)
    model = report.model
    summary = extraction.resonator_report(model)
    _print_report([
        ("rs_ohm", model.rs),
        ("r0_ohm", model.r0),
        ("rm_ohm", model.main.rm),
        ("lm_h", model.main.lm),
        ("cm_f", model.main.cm),
        ("c0_f", model.c0),
        ("fr_hz", summary["fr_hz"]),
        ("fa_hz", summary["fa_hz"]),
        ("k2", summary["k2"]),
        ("q", summary["q"]),
        ("residual", report.residual),
        ("iterations", str(report.iterations)),
        ("converged", str(report.converged).lower()),
    ])
    return 0


def _cmd_fitloss(args) -> int:
    dataset = files.read_delay_line_csv(args.csv)
    delta, a0 = extraction.delay_line_fit(dataset)
    _print_report([("delta", delta), ("a0", a0)])
    return 0


# ---------------------------------------------------------------------------

def _build_parser() -> _Parser:
    parser = _Parser(prog="acoufilt",
                     description="acoustic-wave resonator and ladder-filter toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dispersion", help="query a dispersion table at a wavelength")
    p.add_argument("--table", required=True, help="CSV path or builtin name (sh0, s0)")
    p.add_argument("--lambda", dest="wavelength", type=float, required=True,
                   help="IDT wavelength in m")
    _add_constants_args(p)
    p.set_defaults(func=_cmd_dispersion)

    p = sub.add_parser("resonator", help="derive a resonator and emit its .s1p")
    p.add_argument("--table", required=True)
    p.add_argument("--geom", required=True, help="geometry key-value file")
    p.add_argument("--spurs", default=None, help="spur environment key-value file")
    p.add_argument("--z0", type=float, default=50.0)
    p.add_argument("--format", choices=("RI", "MA", "DB"), default="RI")
    _add_grid_args(p)
    _add_constants_args(p)
    _add_out_args(p, "resonator")
    p.set_defaults(func=_cmd_resonator)

    p = sub.add_parser("filter", help="simulate a ladder topology and emit its .s2p")
    p.add_argument("--topology", required=True, help="topology key-value file")
    p.add_argument("--band", type=float, nargs=2, default=None,
                   metavar=("LO_HZ", "HI_HZ"), help="passband hint window")
    p.add_argument("--format", choices=("RI", "MA", "DB"), default="RI")
    _add_grid_args(p)
    _add_out_args(p, "filter")
    p.set_defaults(func=_cmd_filter)

    p = sub.add_parser("synth", help="synthesize a ladder filter to a design spec")
    p.add_argument("--spec", required=True, help="design spec key-value file")
    p.add_argument("--table", action="append", required=True,
                   help="dispersion table (repeatable; mode auto-selected)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("RI", "MA", "DB"), default="RI")
    _add_constants_args(p)
    _add_out_args(p, "synth")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("analyze", help="Bode-Q of a .s1p or passband metrics of a .s2p")
    p.add_argument("--snp", required=True, help="Touchstone file")
    p.add_argument("--one-port", action="store_true")
    p.add_argument("--two-port", action="store_true")
    p.add_argument("--band", type=float, nargs=2, default=None,
                   metavar=("LO_HZ", "HI_HZ"))
    p.add_argument("--smooth", type=int, default=1,
                   help="odd group-delay smoothing window (default 1 = off)")
    _add_out_args(p, "analyze")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("fit", help="fit an mBVD model to a one-port sweep")
    p.add_argument("--snp", required=True, help="Touchstone .s1p file")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("fitloss", help="extract the delay-line loss factor")
    p.add_argument("--csv", required=True, help="gap_wavelengths,s21_mag CSV")
    p.set_defaults(func=_cmd_fitloss)

    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as err:
        print(f"usage: {err}", file=sys.stderr)
        return 2
    except ToolkitError as err:
        print(f"{err.category}: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"io: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
