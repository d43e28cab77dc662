"""Command-line front end.

Subcommands: steady, bistability, spectrum, kerr, peaks, figure, oracle-check.
Exit codes: 0 success, 1 usage/configuration error, 2 numerical failure.
Identical invocations produce byte-identical artifacts; QDR_THREADS caps the
sweep parallelism (default 1).
"""
from __future__ import annotations

import argparse
import os
import sys

from . import oracle, presets, response, steady, sweep
from .errors import QdResponseError, BadConfig, UnknownFigure, WriteFailure
from .model import (
    Params,
    SweepAxis,
    default_signal_amplitude,
    params_from_file,
    params_from_mapping,
    validate_params,
)


def _axis(value: str) -> SweepAxis:
    try:
        return SweepAxis(value)
    except ValueError:
        raise BadConfig(f"unknown axis {value!r}; "
                        f"use {', '.join(a.value for a in SweepAxis)}") from None


def _observable(value: str) -> sweep.Observable:
    try:
        return sweep.Observable(value)
    except ValueError:
        raise BadConfig(f"unknown observable {value!r}; "
                        f"use {', '.join(o.value for o in sweep.Observable)}") from None


def _backend(value: str) -> response.Backend:
    try:
        return response.Backend(value)
    except ValueError:
        raise BadConfig(f"unknown backend {value!r}") from None


def _policy(value: str) -> sweep.BranchPolicy:
    try:
        return sweep.BranchPolicy(value)
    except ValueError:
        raise BadConfig(f"unknown branch policy {value!r}") from None


def _add_param_options(sub):
    sub.add_argument("--preset", help="start from a catalog entry (e.g. 4b)")
    sub.add_argument("--config", help="flat key=value parameter file")
    sub.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                     help="override one parameter (repeatable)")


def _add_output_options(sub):
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--out", help="output path (default: stdout or derived name)")


def _collect_params(args, preset=None) -> Params:
    mapping = {}
    if preset is not None:
        mapping.update({k: getattr(preset.params, k)
                        for k in preset.params.__dataclass_fields__})
    if args.config:
        file_params = params_from_file(args.config)
        mapping.update({k: getattr(file_params, k)
                        for k in file_params.__dataclass_fields__})
    for item in args.param:
        if "=" not in item:
            raise BadConfig(f"--param expects KEY=VALUE, got {item!r}")
        key, _, raw = item.partition("=")
        mapping[key.strip()] = raw.strip()
    if not mapping:
        raise BadConfig("no parameters given; use --preset, --config or --param")
    return params_from_mapping(mapping)


def _workers() -> int:
    raw = os.environ.get("QDR_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise BadConfig(f"QDR_THREADS must be an integer, got {raw!r}") from None


def _open_out(path):
    try:
        return open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise WriteFailure(f"cannot write {path}: {exc}") from None


def _emit(records, fmt, out, meta):
    if out is None:
        if fmt == "csv":
            sweep.records_to_csv(records, sys.stdout, meta)
        else:
            sys.stdout.write(sweep.records_to_json(records, meta=meta))
            sys.stdout.write("\n")
        return
    with _open_out(out) as fh:
        if fmt == "csv":
            sweep.records_to_csv(records, fh, meta)
        else:
            sweep.records_to_json(records, fh, meta=meta)
    print(f"wrote {out}")


def _params_meta(p: Params) -> dict:
    return {k: repr(getattr(p, k)) for k in p.__dataclass_fields__}


# -- subcommands -------------------------------------------------------------

def _cmd_steady(args) -> int:
    preset = presets.get_preset(args.preset) if args.preset else None
    p = _collect_params(args, preset)
    branches = steady.solve_steady_branches(p)
    lines = ["w0,re_a0,im_a0,re_sigma0,im_sigma0,q0,residual,stability,physical"]
    for b in branches:
        lines.append(",".join([
            repr(b.w0), repr(b.a0.real), repr(b.a0.imag),
            repr(b.sigma0.real), repr(b.sigma0.imag), repr(b.q0),
            repr(b.residual), b.stability.value, str(b.physical).lower(),
        ]))
    text = "\n".join(lines) + "\n"
    if args.out:
        with _open_out(args.out) as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _grid_from_arg(args, preset=None):
    if args.grid:
        return presets.parse_grid(args.grid)
    if preset is not None:
        return preset.grid
    raise BadConfig("missing --grid start:stop:points")


def _cmd_bistability(args) -> int:
    preset = presets.get_preset(args.preset) if args.preset else None
    p = _collect_params(args, preset)
    axis = _axis(args.axis)
    grid = _grid_from_arg(args, preset)
    result = steady.hysteresis_sweep(p, axis, grid)
    stem = args.out or "bistability"
    meta = _params_meta(p)
    meta.update(axis=axis.value,
                P1="" if result.turning_up is None else repr(result.turning_up),
                P2="" if result.turning_down is None else repr(result.turning_down))
    for tag, rows in (("up", result.up), ("down", result.down)):
        path = f"{stem}_{tag}.{args.format}"
        with _open_out(path) as fh:
            if args.format == "csv":
                sweep.records_to_csv(rows, fh, {**meta, "trace": tag})
            else:
                sweep.records_to_json(rows, fh, meta={**meta, "trace": tag})
        print(f"wrote {path}")
    return 0


def _cmd_spectrum(args, observable=None) -> int:
    preset = presets.get_preset(args.preset) if args.preset else None
    p = _collect_params(args, preset)
    axis = _axis(args.axis) if args.axis else \
        (preset.axis if preset else _axis("delta0"))
    obs = observable or (_observable(args.observable) if args.observable
                         else (preset.observable if preset else None))
    if obs is None:
        raise BadConfig("missing --observable")
    cfg = sweep.SweepConfig(
        base=p, axis=axis, grid=_grid_from_arg(args, preset), observable=obs,
        backend=_backend(args.backend),
        branch_policy=_policy(args.branch_policy),
    )
    records = sweep.run_sweep(cfg, max_workers=_workers())
    if not _has_clean_point(records):
        print("error: every grid point failed (pole or no steady branch)",
              file=sys.stderr)
        return 2
    meta = _params_meta(p)
    meta.update(axis=axis.value, observable=obs.value, backend=cfg.backend.value)
    _emit(records, args.format, args.out, meta)
    return 0


def _has_clean_point(records) -> bool:
    return any(not r.flags and r.value_re == r.value_re for r in records)


def _cmd_peaks(args) -> int:
    preset = presets.get_preset(args.preset) if args.preset else None
    p = _collect_params(args, preset)
    axis = _axis(args.axis) if args.axis else \
        (preset.axis if preset else _axis("delta0"))
    obs = _observable(args.observable) if args.observable else \
        (preset.observable if preset else None)
    if obs is None:
        raise BadConfig("missing --observable")
    cfg = sweep.SweepConfig(base=p, axis=axis, grid=_grid_from_arg(args, preset),
                            observable=obs, backend=_backend(args.backend))
    records = sweep.run_sweep(cfg, max_workers=_workers())
    if not _has_clean_point(records):
        print("error: every grid point failed", file=sys.stderr)
        return 2
    kind = sweep.ExtremumKind(args.kind)
    found = sweep.locate_extrema(records, kind, component=args.component)
    lines = ["x,value"] + [f"{x!r},{v!r}" for x, v in found]
    text = "\n".join(lines) + "\n"
    if args.out:
        with _open_out(args.out) as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_figure(args) -> int:
    preset = presets.get_preset(args.figure_id)
    stem = args.out or f"fig{preset.figure_id}"
    workers = _workers()
    wrote = []
    for label, base in preset.members():
        mapping = {k: getattr(base, k) for k in base.__dataclass_fields__}
        for item in args.param:
            if "=" not in item:
                raise BadConfig(f"--param expects KEY=VALUE, got {item!r}")
            key, _, raw = item.partition("=")
            mapping[key.strip()] = raw.strip()
        member_params = params_from_mapping(mapping)
        meta = _params_meta(member_params)
        meta.update(figure=preset.figure_id, note=preset.note,
                    axis=preset.axis.value, observable=preset.observable.value,
                    assumed=" ".join(preset.assumed))
        suffix = "" if not label else "_" + label.replace("=", "-")
        if preset.branch_policy is sweep.BranchPolicy.CONTINUATION:
            result = steady.hysteresis_sweep(member_params, preset.axis,
                                             preset.grid)
            meta.update(
                P1="" if result.turning_up is None else repr(result.turning_up),
                P2="" if result.turning_down is None else repr(result.turning_down))
            for tag, rows in (("up", result.up), ("down", result.down)):
                path = f"{stem}{suffix}_{tag}.{args.format}"
                with _open_out(path) as fh:
                    if args.format == "csv":
                        sweep.records_to_csv(rows, fh, {**meta, "trace": tag})
                    else:
                        sweep.records_to_json(rows, fh, meta={**meta, "trace": tag})
                wrote.append(path)
            continue
        cfg = preset.sweep_config(member_params, _backend(args.backend))
        records = sweep.run_sweep(cfg, max_workers=workers)
        if not _has_clean_point(records):
            print(f"error: every grid point failed for {label or 'preset'}",
                  file=sys.stderr)
            return 2
        path = f"{stem}{suffix}.{args.format}"
        with _open_out(path) as fh:
            if args.format == "csv":
                sweep.records_to_csv(records, fh, meta)
            else:
                sweep.records_to_json(records, fh, meta=meta)
        wrote.append(path)
    for path in wrote:
        print(f"wrote {path}")
    return 0


def _cmd_oracle_check(args) -> int:
    preset = presets.get_preset(args.preset) if args.preset else None
    p = _collect_params(args, preset)
    if p.delta0 == 0.0:
        p = p.replace(delta0=preset.oracle_delta0 if preset else 4.3)
    if p.es0 == 0.0:
        p = p.replace(es0=default_signal_amplitude(p))
    validate_params(p)
    branches = steady.solve_steady_branches(p)
    stable = [b for b in branches if b.stability is steady.Stability.STABLE]
    if not stable:
        print("error: no stable branch at this point", file=sys.stderr)
        return 2
    branch = min(stable, key=lambda b: b.w0)
    dt = min(args.dt, oracle.max_step(p))
    traj = oracle.integrate_mean_field(
        p, oracle.steady_state_vector(branch), args.t_end, dt)
    if args.dump_trajectory:
        with _open_out(args.dump_trajectory) as fh:
            oracle.dump_trajectory(traj, fh)
        print(f"wrote {args.dump_trajectory}")
    demod = oracle.demodulate_sidebands(traj, p.delta0)
    bands = response.solve_sidebands(p, branch)
    dev_a = abs(demod.a_plus - bands.a_plus) / abs(bands.a_plus)
    dev_s = abs(demod.sigma_plus - bands.sigma_plus) / abs(bands.sigma_plus)
    dev = max(dev_a, dev_s)
    print(f"branch w0 = {branch.w0!r}")
    print(f"a_plus  deviation = {dev_a:.3e}")
    print(f"sigma_plus deviation = {dev_s:.3e}")
    print(f"max relative deviation = {dev:.3e} (tolerance {args.tolerance:g})")
    return 0 if dev < args.tolerance else 2


# -- argument parser ---------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdr",
        description="Steady-state, linear and nonlinear optical response of a "
                    "driven dot-cavity-phonon system.")
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("steady", help="solve the steady-state branches")
    _add_param_options(s)
    s.add_argument("--out")
    s.set_defaults(func=_cmd_steady)

    s = subs.add_parser("bistability", help="hysteresis continuation sweep")
    _add_param_options(s)
    s.add_argument("--axis", default="ep0", choices=("ep0", "delta_p0"))
    s.add_argument("--grid", help="start:stop:points")
    _add_output_options(s)
    s.set_defaults(func=_cmd_bistability)

    s = subs.add_parser("spectrum", help="sweep an observable over a grid")
    _add_param_options(s)
    s.add_argument("--axis")
    s.add_argument("--grid", help="start:stop:points")
    s.add_argument("--observable")
    s.add_argument("--backend", default="linear_solve",
                   choices=("linear_solve", "closed_form"))
    s.add_argument("--branch-policy", default="stable_only",
                   choices=("stable_only", "all_branches"))
    _add_output_options(s)
    s.set_defaults(func=_cmd_spectrum)

    s = subs.add_parser("kerr", help="Kerr coefficient vs signal-exciton detuning")
    _add_param_options(s)
    s.add_argument("--axis", default="delta_s0")
    s.add_argument("--grid", help="start:stop:points")
    s.add_argument("--backend", default="linear_solve",
                   choices=("linear_solve", "closed_form"))
    s.add_argument("--branch-policy", default="stable_only",
                   choices=("stable_only", "all_branches"))
    _add_output_options(s)
    s.set_defaults(func=lambda a: _cmd_spectrum(a, sweep.Observable.KERR))

    s = subs.add_parser("peaks", help="locate spectrum extrema")
    _add_param_options(s)
    s.add_argument("--axis")
    s.add_argument("--grid", help="start:stop:points")
    s.add_argument("--observable")
    s.add_argument("--backend", default="linear_solve",
                   choices=("linear_solve", "closed_form"))
    s.add_argument("--kind", default="peak", choices=("peak", "dip"))
    s.add_argument("--component", default="re", choices=("re", "im", "abs"))
    s.add_argument("--out")
    s.set_defaults(func=_cmd_peaks)

    s = subs.add_parser("figure", help="emit the sweep data for a catalog preset")
    s.add_argument("figure_id", metavar="ID")
    s.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    s.add_argument("--backend", default="linear_solve",
                   choices=("linear_solve", "closed_form"))
    _add_output_options(s)
    s.set_defaults(func=_cmd_figure)

    s = subs.add_parser("oracle-check",
                        help="compare the sideband solve against time-domain "
                             "integration plus demodulation")
    _add_param_options(s)
    s.add_argument("--t-end", type=float, default=260.0)
    s.add_argument("--dt", type=float, default=0.01)
    s.add_argument("--tolerance", type=float, default=1e-3)
    s.add_argument("--dump-trajectory", metavar="PATH",
                   help="also write the integrated trajectory as CSV")
    s.set_defaults(func=_cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses exit code 2 for usage errors; remap to 1
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except (BadConfig, UnknownFigure, WriteFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except QdResponseError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
