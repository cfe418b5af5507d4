"""Command line entry point: ``gfconv <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .capacity import capacity_curves, curves_csv
from .channel import report_csv, run_monte_carlo
from .code import CodeCoefficients, CodeError, build_trellis, encode_frame
from .decoder import branch_metrics, max_log_map_decode
from .gf import FieldError, build_field, default_field, field_from_dict, tables_csv
from .mapping import build_qam, constellation_csv
from .search import search_codes
from .spectrum import compute_spectrum, dc_length_profile, verify_truncation

log = logging.getLogger("gfconv")


class UsageError(Exception):
    pass


def parse_range(text: str) -> list[float]:
    """``start:step:stop`` (inclusive) or a comma list."""
    if ":" in text:
        parts = [float(x) for x in text.split(":")]
        if len(parts) != 3 or parts[1] <= 0:
            raise UsageError(f"bad range {text!r}; expected start:step:stop")
        start, step, stop = parts
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 10) for i in range(n)]
    return [float(x) for x in text.split(",") if x.strip()]


def parse_count(text: str) -> int:
    v = float(text)
    if v != int(v) or v < 0:
        raise UsageError(f"expected a non-negative integer, got {text!r}")
    return int(v)


# ----------------------------------------------------------------- resolvers


def resolve_field(args):
    if getattr(args, "field", None):
        return field_from_dict(json.loads(Path(args.field).read_text()))
    if getattr(args, "m", None) is not None:
        if args.poly is None:
            raise UsageError("--m requires --poly")
        return build_field(args.m, args.poly)
    if getattr(args, "q", None) is not None:
        return default_field(args.q)
    raise UsageError("a field is required: --q, --m/--poly or --field")


def resolve_code(args) -> CodeCoefficients:
    if getattr(args, "code", None):
        path = Path(args.code)
        if not path.exists():
            raise UsageError(f"code file not found: {path}")
        return CodeCoefficients.from_dict(json.loads(path.read_text()))
    if args.a1 is None or args.a2 is None:
        raise UsageError("a code is required: --code FILE or --a1/--a2[/--a3] with a field")
    return CodeCoefficients(resolve_field(args), args.a1, args.a2, args.a3)


def _write(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
        log.info("wrote %s", out)
    else:
        sys.stdout.write(text)


def _dump_json(obj, out):
    _write(json.dumps(obj, indent=2, sort_keys=True) + "\n", out)


# ----------------------------------------------------------------- commands


def cmd_field_info(args):
    f = resolve_field(args)
    if args.format == "json":
        _dump_json({**f.to_dict(), "q": f.q, "log": f.log_table.tolist(),
                    "antilog": f.antilog_table[: f.q - 1].tolist()}, args.out)
    else:
        _write(tables_csv(f), args.out)


def cmd_constellation(args):
    f = resolve_field(args)
    c = build_qam(f)
    if args.format == "json":
        _dump_json({"q": c.q, "scale_sq": c.scale_sq, "points": c.symbol_points().tolist()}, args.out)
    else:
        _write(constellation_csv(c), args.out)


def _read_symbols(path) -> list[int]:
    text = Path(path).read_text()
    out = []
    for row in csv.reader(io.StringIO(text)):
        for cell in row:
            cell = cell.strip()
            if cell and not cell.startswith("#"):
                try:
                    out.append(int(cell))
                except ValueError:
                    continue  # header
    return out


def cmd_encode(args):
    code = resolve_code(args)
    if not Path(args.inp).exists():
        raise UsageError(f"input file not found: {args.inp}")
    symbols = _read_symbols(args.inp)
    bad = [s for s in symbols if not 0 <= s < code.q]
    if bad:
        raise UsageError(f"symbols outside GF({code.q}): {bad[:5]}")
    sysl, par, final = encode_frame(code, symbols, terminate=args.terminate)
    lines = [f"# {json.dumps({'code': code.to_dict(), 'terminate': args.terminate, 'final_state': final})}",
             "stage,systematic,parity"]
    lines += [f"{i},{s},{p}" for i, (s, p) in enumerate(zip(sysl, par))]
    _write("\n".join(lines) + "\n", args.out)


def cmd_decode(args):
    code = resolve_code(args)
    if not Path(args.inp).exists():
        raise UsageError(f"input file not found: {args.inp}")
    rows = list(csv.DictReader(line for line in Path(args.inp).read_text().splitlines()
                               if not line.startswith("#")))
    need = {"stage", "sys_I", "sys_Q", "par_I", "par_Q"}
    if not rows or not need <= set(rows[0]):
        raise UsageError(f"observation CSV needs columns {sorted(need)}")
    rows.sort(key=lambda r: int(r["stage"]))
    ys = np.array([float(r["sys_I"]) + 1j * float(r["sys_Q"]) for r in rows])
    yp = np.array([float(r["par_I"]) + 1j * float(r["par_Q"]) for r in rows])
    c = build_qam(code.field)
    var = 10 ** (-args.snr_db / 10) / 2
    metrics = branch_metrics(ys, yp, c, var)
    post, hard = max_log_map_decode(build_trellis(code), metrics, terminated=args.terminate)
    lines = [f"# {json.dumps({'code': code.to_dict(), 'snr_db': args.snr_db, 'terminate': args.terminate})}",
             "stage,decision"]
    lines += [f"{int(r['stage'])},{int(h)}" for r, h in zip(rows, hard)]
    _write("\n".join(lines) + "\n", args.out)


def cmd_spectrum(args):
    code = resolve_code(args)
    c = build_qam(code.field)
    spec = compute_spectrum(code, c, convention=args.convention)
    out = {**spec.to_dict(), "code": code.to_dict(),
           "n1_by_length": list(spec.n1_by_length), "n2_by_length": list(spec.n2_by_length)}
    if args.truncation:
        t = verify_truncation(code, c)
        out["truncated_min_num"] = int(t * c.scale_sq)
        out["truncated_min"] = float(t)
    if args.profile:
        out["dc_length_profile"] = {str(L): float(v) for L, v in dc_length_profile(code, c, args.profile).items()}
    print(f"d1^2={float(spec.d1_sq):.2f} n1={spec.n1} d2^2={float(spec.d2_sq):.2f} n2={spec.n2} "
          f"({spec.convention})", file=sys.stderr if not args.out and args.format == "json" else sys.stdout)
    if args.out or args.format == "json":
        _dump_json(out, args.out)


def cmd_search(args):
    f = resolve_field(args)
    c = build_qam(f)
    rep = search_codes(f, c, top=args.top, threads=args.threads)
    d = rep.to_dict()
    d["config"] = {"q": f.q, "top": args.top, "threads": args.threads}
    if args.format == "csv":
        cols = ["a1", "a2", "a3", "d1_num", "n1", "d2_num", "n2", "scale_sq"]
        lines = ["# " + json.dumps(d["config"]), ",".join(cols)]
        lines += [",".join(str(r[k]) for k in cols) for r in d["rows"]]
        _write("\n".join(lines) + "\n", args.out)
    else:
        _dump_json(d, args.out)
    best = rep.best
    print(f"searched {rep.space_size} codes; max d1^2={float(best.d1_sq):.4f}; "
          f"{len(rep.max_d1_class())} codes reach it", file=sys.stderr)


def cmd_simulate(args):
    code = resolve_code(args)
    c = build_qam(code.field) if args.mod == "qam" else None
    rep = run_monte_carlo(code, c, parse_range(args.ebn0), frame_len=args.frame_len,
                          ferr_min=parse_count(args.ferr_min), frames_max=parse_count(args.frames_max),
                          seed=args.seed, terminate=args.terminate, modulation=args.mod, axis=args.axis)
    if args.format == "json":
        _dump_json(rep.to_dict(), args.out)
    else:
        _write(report_csv(rep), args.out)
    if args.plot and args.out:
        from .plotting import figure_path, plot_error_rates

        label = "({},{},{})".format(*code.triple)
        plot_error_rates({label: rep}, figure_path(args.out), metric="ser")


def cmd_capacity(args):
    q = args.q
    c = build_qam(q)
    cm, bicm = capacity_curves(c, parse_range(args.snr), parse_count(args.samples), args.seed)
    if args.format == "json":
        _dump_json({"meta": cm.meta, "snr_db": cm.snr_db.tolist(), "cm_bits": cm.bits.tolist(),
                    "bicm_bits": bicm.bits.tolist(), "cm_se": cm.stderr.tolist(),
                    "bicm_se": bicm.stderr.tolist()}, args.out)
    else:
        _write(curves_csv(cm, bicm), args.out)
    if args.plot and args.out:
        from .plotting import figure_path, plot_capacity

        plot_capacity([cm, bicm], figure_path(args.out))


# ----------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=1, help="worker cap; never changes integer results")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None)
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("-v", "--verbose", action="store_true")

    def field_opts(p):
        p.add_argument("--q", type=int, choices=(4, 16, 64))
        p.add_argument("--m", type=int)
        p.add_argument("--poly", type=lambda s: int(s, 0))
        p.add_argument("--field", help="field descriptor JSON {m, poly}")

    def code_opts(p):
        field_opts(p)
        p.add_argument("--code", help="code descriptor JSON {field, a1, a2, a3}")
        p.add_argument("--a1", type=int)
        p.add_argument("--a2", type=int)
        p.add_argument("--a3", type=int, default=0)

    ap = argparse.ArgumentParser(prog="gfconv", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("field-info", parents=[common], help="log/antilog tables")
    field_opts(p)
    p.set_defaults(func=cmd_field_info, fmt="csv")

    p = sub.add_parser("constellation", parents=[common], help="QAM points and labels")
    field_opts(p)
    p.add_argument("--dump", action="store_true")
    p.set_defaults(func=cmd_constellation, fmt="csv")

    p = sub.add_parser("encode", parents=[common])
    code_opts(p)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--terminate", action="store_true")
    p.set_defaults(func=cmd_encode, fmt="csv")

    p = sub.add_parser("decode", parents=[common])
    code_opts(p)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--snr-db", type=float, required=True)
    p.add_argument("--terminate", action="store_true")
    p.set_defaults(func=cmd_decode, fmt="csv")

    p = sub.add_parser("spectrum", parents=[common])
    code_opts(p)
    p.add_argument("--convention", choices=("unordered", "ordered"), default="unordered")
    p.add_argument("--truncation", action="store_true", help="also report the truncated 3-section minimum")
    p.add_argument("--profile", type=int, default=0, metavar="LMAX",
                   help="minimum DC distance per length up to LMAX")
    p.set_defaults(func=cmd_spectrum, fmt="json")

    p = sub.add_parser("search", parents=[common])
    field_opts(p)
    p.add_argument("--top", type=int, default=20)
    p.set_defaults(func=cmd_search, fmt="json")

    p = sub.add_parser("simulate", parents=[common])
    code_opts(p)
    p.add_argument("--mod", choices=("qam", "bpsk"), default="qam")
    p.add_argument("--ebn0", default="0:0.5:8")
    p.add_argument("--axis", choices=("ebn0", "esn0"), default="ebn0")
    p.add_argument("--frames-max", default="1e6")
    p.add_argument("--ferr-min", default="100")
    p.add_argument("--frame-len", type=int, default=100)
    p.add_argument("--terminate", action="store_true")
    p.add_argument("--plot", action="store_true", help="render a PNG next to --out")
    p.set_defaults(func=cmd_simulate, fmt="csv")

    p = sub.add_parser("capacity", parents=[common])
    p.add_argument("--q", type=int, choices=(4, 16, 64), required=True)
    p.add_argument("--snr", default="-5:0.25:25")
    p.add_argument("--samples", default="1e6")
    p.add_argument("--plot", action="store_true", help="render a PNG next to --out")
    p.set_defaults(func=cmd_capacity, fmt="csv")
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.fmt
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (UsageError, CodeError, FieldError, ValueError, OSError) as exc:
        print(f"gfconv {args.cmd}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
