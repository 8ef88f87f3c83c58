"""Command line front end.

    qgpon presets [--json]
    qgpon show --preset fig3b_128
    qgpon evaluate --preset fig2b --override F=20,N=128 --format json
    qgpon sweep --preset fig3a --axis F=0:20:1 --out fig3a.csv
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from . import __version__
from .io import ConfigError, digest, scenario_from_dict, scenario_to_dict
from .keyrate import secure_key_rate
from .scenarios import PRESETS, UnknownPreset, apply_all, evaluate_grid, preset
from .topology import ScenarioError

EXIT_OK, EXIT_INFEASIBLE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def fmt(value) -> str:
    """Deterministic cell text: shortest round-trip floats, no locale."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isinf(value) or math.isnan(value):
            return str(value)
        return repr(value)
    return str(value)


def _number(text: str):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        return float(text)


def parse_axis(spec: str):
    """``name=start:stop:step`` (stop inclusive) or ``name=v1,v2,...``."""
    name, sep, body = spec.partition("=")
    name = name.strip()
    if not sep or not name or not body.strip():
        raise UsageError(f"bad axis spec {spec!r}; expected name=start:stop:step or name=v1,v2,...")
    try:
        if ":" in body:
            parts = body.split(":")
            if len(parts) != 3:
                raise UsageError(f"bad range in axis {spec!r}")
            start, stop, step = (_number(p) for p in parts)
            if step <= 0 or stop < start:
                raise UsageError(f"axis {spec!r} needs step > 0 and stop >= start")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            values = [start + i * step for i in range(count)]
            if all(isinstance(v, int) for v in (start, stop, step)):
                return name, values
            return name, [round(float(v), 12) for v in values]
        if "," in body or body.strip():
            return name, [_number(v) for v in body.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad value in axis {spec!r}: {exc}") from None
    raise UsageError(f"empty axis {spec!r}")


def parse_overrides(text: str):
    items = []
    for chunk in text.split(","):
        if not chunk.strip():
            continue
        name, sep, value = chunk.partition("=")
        if not sep:
            raise UsageError(f"bad override {chunk!r}; expected name=value")
        value = value.strip()
        try:
            items.append((name.strip(), _number(value)))
        except ValueError:
            items.append((name.strip(), value))
    return items


def load_base(args):
    """Resolve --preset / --scenario into (scenario, keep_total_km)."""
    if args.scenario:
        path = Path(args.scenario)
        if not path.is_file():
            raise UsageError(f"scenario file not found: {path}")
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise UsageError(f"{path}: invalid JSON ({exc})") from None
        if not isinstance(doc, dict):
            raise UsageError(f"{path}: top level must be an object")
        name = doc.pop("preset", None)
        base = preset(name) if name else None
        keep = PRESETS[name].keep_total_km if name else None
        keep = doc.pop("keep_total_km", keep)
        return scenario_from_dict(doc, base), keep
    if args.preset:
        return preset(args.preset), PRESETS[args.preset].keep_total_km if args.preset in PRESETS else None
    raise UsageError("one of --scenario or --preset is required")


def result_row(res) -> dict:
    row = {
        "qber": res.qber_z,
        "rate_bps": res.rate_bps,
        "key_length_bits": res.key_length_bits,
        "y1_lower": res.y1_lower,
        "e1_upper": res.e1_upper,
        "noise_total_w": res.diagnostics["noise_total_w"],
        "loss_total_db": res.diagnostics["loss_total_db"],
        "y0_lower": res.y0_lower,
        "e_phase_upper": res.e_phase_upper,
        "session_s": res.session_s,
    }
    row.update({k: v for k, v in sorted(res.diagnostics.items()) if k not in row})
    return row


def write_rows(rows, header, fmt_name, stream):
    if fmt_name == "json":
        stream.write(json.dumps([{k: r.get(k) for k in header} for r in rows], indent=1, allow_nan=True))
        stream.write("\n")
        return
    writer = csv.writer(stream, lineterminator="\r\n")
    writer.writerow(header)
    for r in rows:
        writer.writerow([fmt(r.get(k)) for k in header])


def text_report(s, res, scenario_digest) -> str:
    d = res.diagnostics
    lines = [
        f"scenario digest     {scenario_digest}",
        f"splitter            {'2' if s.splitter.dual_feeder else '1'}x{s.splitter.ratio_n}, {s.splitter.loss_db:.2f} dB",
        f"feeder / drop       {s.feeder_km:g} km / {s.drop_km:g} km",
        f"downstream launch   {d['ds_launch_dbm']:.2f} dBm",
        f"channel loss        {d['loss_total_db']:.2f} dB (narrow-filter accounting {d['loss_total_narrow_filter_db']:.2f} dB)",
        f"Raman noise         {d['noise_total_w']:.4g} W at receiver input",
    ]
    for k in sorted(d):
        if k.startswith("noise_") and k not in ("noise_total_w",):
            lines.append(f"  {k[6:-2]:<28s}{d[k]:.4g} W")
    lines += [
        f"background / gate   {d['y_bg']:.4g} (dark {d['y_dark']:.3g}, Raman {d['y_raman']:.3g}, afterpulse {d['y_afterpulse']:.3g})",
        f"QBER (Z, signal)    {res.qber_z:.4%}",
        f"Y0 >= {res.y0_lower:.4g}   Y1 >= {res.y1_lower:.4g}   e1 <= {res.e1_upper:.4g}   e_ph <= {res.e_phase_upper:.4g}",
        f"session             {res.session_s:g} s",
        f"secure key length   {res.key_length_bits} bits",
        f"secure key rate     {res.rate_bps:.6g} bit/s per user",
    ]
    return "\n".join(lines) + "\n"


def cmd_presets(args, out):
    if args.json:
        out.write(json.dumps([{"name": p.name, "citation": p.citation} for p in PRESETS.values()], indent=1) + "\n")
    else:
        width = max(map(len, PRESETS))
        for p in PRESETS.values():
            out.write(f"{p.name:<{width}}  {p.citation}\n")
    return EXIT_OK


def cmd_show(args, out):
    s, _ = load_base(args)
    out.write(json.dumps(scenario_to_dict(s), indent=2) + "\n")
    return EXIT_OK


def cmd_evaluate(args, out):
    s, keep = load_base(args)
    if args.override:
        s = apply_all(s, parse_overrides(args.override), keep)
    res = secure_key_rate(s)
    row = result_row(res)
    dg = digest(s)
    buf = io.StringIO()
    if args.format == "text":
        buf.write(text_report(s, res, dg))
    elif args.format == "json":
        buf.write(json.dumps({"scenario_digest": dg, "version": __version__, **row}, indent=1) + "\n")
    else:
        write_rows([row], list(row), "csv", buf)
    out.write(buf.getvalue())
    if args.require_positive and res.key_length_bits == 0:
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_sweep(args, out):
    s, keep = load_base(args)
    if not args.axis:
        raise UsageError("sweep needs at least one --axis")
    axes = [parse_axis(a) for a in args.axis]
    names = [n for n, _ in axes]
    if len(set(names)) != len(names):
        raise UsageError(f"conflicting axis names: {', '.join(names)}")
    grid = evaluate_grid(s, axes, keep, jobs=args.jobs)
    buf = io.StringIO(newline="")
    write_rows(grid.records, grid.header, args.format, buf)
    Path(args.out).write_text(buf.getvalue(), newline="")
    ok = sum(r["status"] == "ok" for r in grid.records)
    print(f"wrote {len(grid.records)} rows ({ok} evaluated) to {args.out} [scenario {digest(s)}]", file=sys.stderr)
    if args.require_positive and not any((r["key_length_bits"] or 0) > 0 for r in grid.records):
        return EXIT_INFEASIBLE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qgpon", description="Raman noise and decoy-BB84 key rates in quantum-secured GPONs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def source(p):
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--scenario", help="scenario JSON file")
        g.add_argument("--preset", help="named preset (see `qgpon presets`)")

    p = sub.add_parser("presets", help="list presets")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_presets)

    p = sub.add_parser("show", help="print a scenario as JSON")
    source(p)
    p.set_defaults(func=cmd_show)

    p = sub.add_parser("evaluate", help="evaluate one scenario")
    source(p)
    p.add_argument("--override", help="comma separated name=value assignments (N, F, D, total_drop_km or field paths)")
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.add_argument("--require-positive", action="store_true", help="exit 1 when no secure key is produced")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="evaluate a grid and write CSV")
    source(p)
    p.add_argument("--axis", action="append", default=[], help="name=start:stop:step or name=v1,v2,...")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--require-positive", action="store_true")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, sys.stdout)
    except (UsageError, ConfigError, ScenarioError, UnknownPreset, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
