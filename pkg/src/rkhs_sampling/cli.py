"""Command-line entry point: ``rkhs-sampling {sample,recover,certify,montecarlo,bounds}``.

Exit codes: 0 success, 1 configuration/usage error, 2 degenerate k_n
(n too small for theorem mode), 3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import report as report_mod
from .certificates import DegenerateKError, beta_prime, certify, k_of_n, oliveira_g, theorem_rhs
from .density import SamplingDensity, draw_samples, importance_diagnostic
from .error_oracle import CoefficientFunction, h_norm, l2_error, worstcase_error
from .experiment import ConfigError, ExperimentConfig, run_trials
from .recovery import DEFAULT_RANK_TOL, default_truncation, recover
from .spectral_model import model_from_spec

EXIT_OK, EXIT_CONFIG, EXIT_DEGENERATE, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _int_list(text: str) -> list[int]:
    out = []
    for v in _float_list(text):
        if v != int(v):
            raise argparse.ArgumentTypeError(f"{v} is not an integer")
        out.append(int(v))
    return out


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--out", default=None, help="output path (default: stdout)")


def _model_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--model", choices=("discrete", "fourier"), required=required)
    p.add_argument("--a", type=_float_list, help="discrete approximation numbers, comma separated")
    p.add_argument("--m", type=int)
    p.add_argument("--s", type=float, default=1.0, help="Fourier smoothness")


def _model(args):
    spec = {"kind": args.model}
    if args.model == "discrete":
        spec["a"] = args.a
        if args.m is not None:
            spec["m"] = args.m
    else:
        spec["s"] = args.s
    try:
        return model_from_spec(spec)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _resolve_k(args) -> tuple[int, str]:
    if args.k is not None:
        return args.k, "override"
    return k_of_n(args.n, args.c), "theorem"


def cmd_sample(args) -> int:
    model = _model(args)
    d = SamplingDensity(model, args.k)
    s = draw_samples(d, args.n, args.seed or 0, args.stream)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("index", "point", "rho"))
    for i, (x, r) in enumerate(zip(s.points, s.rho)):
        w.writerow((i, report_mod._fmt(x.item()), report_mod._fmt(float(r))))
    _write(buf.getvalue(), args.out)
    print(f"seed={s.seed} importance_mean={importance_diagnostic(s):.6g}"
          + (f" acceptance={s.acceptance_rate:.4f}" if s.acceptance_rate else ""),
          file=sys.stderr)
    return EXIT_OK


def cmd_recover(args) -> int:
    model = _model(args)
    f = CoefficientFunction(np.asarray(args.coef, dtype=float), model)
    d = SamplingDensity(model, args.k)
    s = draw_samples(d, args.n, args.seed or 0, args.stream)
    out = recover(model, args.k, s, f(s.points), args.rank_tolerance)
    payload = {
        "k": args.k, "n": args.n, "seed": s.seed,
        "coefficients": out.coefficients.tolist(),
        "rank": out.rank, "rank_deficient": out.rank_deficient,
        "residual_norm": out.residual_norm,
        "l2_error": l2_error(model, f, out),
        "h_norm": h_norm(model, f),
    }
    _write(json.dumps(payload, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_certify(args) -> int:
    model = _model(args)
    k, mode = _resolve_k(args)
    d = SamplingDensity(model, k)
    s = draw_samples(d, args.n, args.seed or 0, args.stream)
    J = args.J if args.J is not None else default_truncation(model, k)
    cert = certify(model, s, k, args.c, J=J, mode=mode).to_dict()
    cert["seed"] = s.seed
    if args.worstcase:
        wc, exact = worstcase_error(model, s, k, J)
        cert["wc_sq"], cert["wc_exact"] = wc**2, exact
    _write(json.dumps(cert, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_montecarlo(args) -> int:
    with open(args.config, encoding="utf-8") as fh:
        raw = json.load(fh)
    if args.seed is not None:
        raw["master_seed"] = args.seed
    if args.trials is not None:
        raw["trials"] = args.trials
    if args.out is not None:
        raw["out_csv"], raw["out_json"] = f"{args.out}.csv", f"{args.out}.json"
    if args.workers is not None:
        raw["workers"] = args.workers
    cfg = ExperimentConfig.from_dict(raw)
    rep = run_trials(cfg)
    if cfg.out_csv:
        report_mod.emit_report(rep, "csv", cfg.out_csv)
    if cfg.out_json:
        report_mod.emit_report(rep, "json", cfg.out_json, include_timing=cfg.record_timing)
    if not (cfg.out_csv or cfg.out_json):
        sys.stdout.write(report_mod.report_json(rep, include_timing=cfg.record_timing))
    else:
        summ = rep.summary()
        print(json.dumps({key: summ[key] for key in (
            "k", "trials", "claim1_frequency", "claim2_frequency", "theorem_frequency")}),
            file=sys.stderr)
    return EXIT_OK


def cmd_bounds(args) -> int:
    model = _model(args)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("n", "c", "k_n", "beta_prime", "theorem_rhs", "g_value"))
    for n in args.n:
        try:
            k = k_of_n(n, args.c)
        except DegenerateKError:
            w.writerow((n, report_mod._fmt(args.c), 0, "", "", ""))
            continue
        g = oliveira_g(n, math.sqrt(2 * k), args.c).value
        w.writerow((n, report_mod._fmt(args.c), k,
                    report_mod._fmt(beta_prime(model, k)),
                    report_mod._fmt(theorem_rhs(model, k)),
                    report_mod._fmt(g)))
    _write(buf.getvalue(), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rkhs-sampling", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw nodes from the mixture density")
    _model_args(p)
    _common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--stream", type=int, default=0)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("recover", help="recover a function given by basis coefficients")
    _model_args(p)
    _common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--coef", type=_float_list, required=True)
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--rank-tolerance", type=float, default=DEFAULT_RANK_TOL)
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("certify", help="certificate for one node set (theorem mode unless --k)")
    _model_args(p)
    _common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--J", type=int, default=None)
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--worstcase", action="store_true")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("montecarlo", help="seeded Monte Carlo trials from a JSON config")
    _common(p)
    p.add_argument("--config", required=True)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_montecarlo)

    p = sub.add_parser("bounds", help="table of k_n, beta', theorem bound and g")
    _model_args(p)
    _common(p)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--n", type=_int_list, required=True)
    p.set_defaults(func=cmd_bounds)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DegenerateKError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, ValueError, IndexError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
