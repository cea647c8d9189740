"""Command-line front end.

Exit status: 0 on success, 1 for bad input (unreadable or malformed files,
invalid flags, violated preconditions), 2 for anything else.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import __version__
from .errors import DataError
from .estimator import OrdinalTransportBounds
from .figures import atomic_write, emit_heatmap
from .io import DEFAULT_MISSING_CODES, DatasetSpec, ingest
from .report import (
    benchmarks_section,
    bounds_section,
    build_report,
    couplings_section,
    dumps,
    inference_section,
)
from .transport import normalized_discrepancy

EXIT_OK, EXIT_DATA, EXIT_FAULT = 0, 1, 2
SUBCOMMANDS = ("distance", "bounds", "couplings", "infer", "report")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _codes(text: str) -> tuple:
    return tuple(c.strip() for c in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--source", required=True, help="CSV file for the earlier cross-section")
    common.add_argument("--target", required=True, help="CSV file for the later cross-section")
    common.add_argument("--k", type=int, default=None, help="number of categories (inferred if omitted)")
    common.add_argument("--input-format", choices=("auto", "long", "counts"), default="auto")
    common.add_argument("--missing-codes", type=_codes, default=DEFAULT_MISSING_CODES,
                        help="comma-separated nonresponse codes (default: '*,NA,,98,99')")
    common.add_argument("--p-override", type=float, default=None, help="known source response rate")
    common.add_argument("--q-override", type=float, default=None, help="known target response rate")
    common.add_argument("--alpha", type=float, default=0.05)
    common.add_argument("--reps", type=int, default=499, help="bootstrap replications")
    common.add_argument("--seed", type=int, default=0, help="bootstrap seed (default 0)")
    common.add_argument("--no-cells", action="store_true",
                        help="skip endpoint coupling bounds and their confidence sets")
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--figures", choices=("none", "svg", "ascii"), default="none")

    parser = _Parser(prog="ordinal-transport",
                     description="Bounds on change between two ordinal distributions.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "distance": "discrepancy for fully observed inputs",
        "bounds": "identified interval and CDF bounds",
        "couplings": "endpoint coupling bounds and representative couplings",
        "infer": "bootstrap confidence sets",
        "report": "everything, written to OUT/report.json",
    }
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def _inputs_echo(args) -> dict:
    def side(path):
        return {"path": path, "format": args.input_format, "K": args.k,
                "missing_codes": list(args.missing_codes)}
    return {"source": side(args.source), "target": side(args.target),
            "p_override": args.p_override, "q_override": args.q_override,
            "alpha": args.alpha, "replications": args.reps}


def _fit(args, couplings: bool, reps: int):
    specs = [DatasetSpec(path, args.input_format, args.k, args.missing_codes)
             for path in (args.source, args.target)]
    s, t = (ingest(sp) for sp in specs)
    if args.k is None and s.K != t.K:
        # widen the smaller K with empty trailing categories
        K = max(s.K, t.K)
        s, t = (type(x)(tuple(x.counts) + (0,) * (K - x.K), x.missing) for x in (s, t))
    est = OrdinalTransportBounds(
        source_response_rate=args.p_override, target_response_rate=args.q_override,
        couplings=couplings, n_bootstrap=reps, alpha=args.alpha, random_state=args.seed)
    return est.fit(s, t)


def _figures(est, args) -> list[str]:
    if args.figures == "none" or not est.endpoint_couplings_:
        return []
    out = args.out or "."
    ext = "svg" if args.figures == "svg" else "txt"
    paths = []
    for e, ecb in est.endpoint_couplings_.items():
        title = f"{e.value.capitalize()}-endpoint coupling (cost = {ecb.value:.3f})"
        path = os.path.join(out, "figures", f"{e.value}_endpoint_coupling.{ext}")
        paths.append(emit_heatmap(ecb.representative.mass, title, path, args.figures))
    return paths


def _fmt_matrix(m) -> list[str]:
    return ["  " + " ".join(f"{v:6.3f}" for v in row) for row in m]


def _text(payload: dict) -> str:
    lines = []
    if "discrepancy" in payload and "d_low" in payload["discrepancy"]:
        d = payload["discrepancy"]
        lines.append(f"D interval: [{d['d_low']:.6f}, {d['d_up']:.6f}]  "
                     f"normalized: [{d['normalized'][0]:.4f}, {d['normalized'][1]:.4f}]")
    if "D" in payload:
        lines.append(f"D = {payload['D']:.6f}  normalized = {payload['normalized']:.4f}")
    if "cdf_bounds" in payload:
        for side, ivs in payload["cdf_bounds"].items():
            lines.append(f"CDF bounds ({side}):")
            lines += [f"  F({k}) in [{lo:.4f}, {hi:.4f}]" for k, (lo, hi) in enumerate(ivs, start=1)]
    for name, ec in (payload.get("endpoint_couplings") or {}).items():
        lines.append(f"{name} endpoint (D = {ec['value']:.6f}){' [degenerate]' if ec['degenerate'] else ''}")
        lines.append(" cell lower bounds:")
        lines += _fmt_matrix(ec["bounds"]["lo"])
        lines.append(" cell upper bounds:")
        lines += _fmt_matrix(ec["bounds"]["hi"])
        lines.append(" representative coupling (one of possibly many):")
        lines += _fmt_matrix(ec["representative"])
        lines.append(f" required transitions: {ec['required_transitions']}")
        lines.append(f" excluded transitions: {ec['excluded_transitions']}")
        if "note" in ec:
            lines.append(f" note: {ec['note']}")
    bm = payload.get("observed_benchmarks")
    if bm:
        lines.append(f"observed max mobility: {bm['max_mobility']:.6f} "
                     f"(normalized {bm['normalized_max_mobility']:.4f})")
    inf = payload.get("inference")
    if inf:
        lines.append(f"{100 * (1 - inf['alpha']):g}% confidence set for D: "
                     f"[{inf['ci_d'][0]:.6f}, {inf['ci_d'][1]:.6f}] "
                     f"(critical value {inf['critical_value_d']:.6f}, B = {inf['replications']})")
    for f in payload.get("figures", []):
        lines.append(f"figure: {f}")
    return "\n".join(lines) + "\n"


def _payload(args) -> dict:
    cmd = args.command
    if cmd == "distance":
        est = _fit(args, couplings=False, reps=0)
        if not est.point_identified_:
            raise DataError("inputs contain nonresponse, so D is only partially identified; "
                            "use the 'bounds' subcommand")
        d = est.interval_.d_low
        return {"D": d, "normalized": normalized_discrepancy(d, est.n_categories_),
                "K": est.n_categories_}
    if cmd == "bounds":
        est = _fit(args, couplings=False, reps=0)
        return {"K": est.n_categories_, **bounds_section(est)}
    if cmd == "couplings":
        est = _fit(args, couplings=True, reps=0)
        payload = {"K": est.n_categories_, "discrepancy": bounds_section(est)["discrepancy"],
                   "endpoint_couplings": couplings_section(est)}
        if est.point_identified_:
            payload["observed_benchmarks"] = benchmarks_section(est)
        payload["figures"] = _figures(est, args)
        return payload
    if cmd == "infer":
        if args.reps < 1:
            raise DataError("--reps must be at least 1")
        est = _fit(args, couplings=not args.no_cells, reps=args.reps)
        return {"K": est.n_categories_, "discrepancy": bounds_section(est)["discrepancy"],
                "inference": inference_section(est)}
    # report
    if args.reps < 0:
        raise DataError("--reps must be nonnegative")
    est = _fit(args, couplings=not args.no_cells, reps=args.reps)
    return build_report(est, _inputs_echo(args), _figures(est, args))


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(exc, file=stderr)
        return EXIT_DATA
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)

    try:
        payload = _payload(args)
        text = dumps(payload) if args.format == "json" else _text(payload)
        if args.command == "report":
            atomic_write(os.path.join(args.out or ".", "report.json"), dumps(payload))
        elif args.out:
            atomic_write(os.path.join(args.out, f"{args.command}.json"), dumps(payload))
        stdout.write(text)
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        logging.getLogger(__name__).debug("internal fault", exc_info=True)
        print(f"internal error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_FAULT
    return EXIT_OK


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
