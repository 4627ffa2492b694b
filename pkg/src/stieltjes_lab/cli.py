"""Command-line entry point.

Exit codes: 0 success, 1 failed verification or numerical failure,
2 bad input (arguments, grid, files, catalog ids).
"""

from __future__ import annotations

import os

THREADS_ENV = "STIELTJES_LAB_THREADS"
_BLAS_THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


def _thread_cap():
    """Parse STIELTJES_LAB_THREADS (0 or unset means no cap)."""
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 0
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be a nonnegative integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"{THREADS_ENV} must be a nonnegative integer, got {raw!r}")
    return n


def _apply_thread_cap(n: int):
    # BLAS reads these when it first loads, so this must run before numpy is imported
    if n > 0:
        for var in _BLAS_THREAD_VARS:
            os.environ[var] = str(n)


try:
    _apply_thread_cap(_thread_cap())
except ValueError:
    pass  # reported with exit code 2 from main()

import argparse  # noqa: E402
import json  # noqa: E402
import sys  # noqa: E402
from dataclasses import fields  # noqa: E402

import numpy as np  # noqa: E402

from . import catalog, convolution, inversion, sie, transforms, verification  # noqa: E402
from .errors import (GridMismatch, IllConditioned, InvalidInput, RouteUnavailable,  # noqa: E402
                     StieltjesLabError, UnknownEntry)
from .mellin import (CriticalLineSpectrum, SampledFunction, geometric_grid, mellin_forward,  # noqa: E402
                     read_sampled_csv, read_spectrum_csv, sampled_to_csv, spectrum_to_csv,
                     tau_grid, write_text_atomic)
from .numerics import DEFAULT_CONFIG, QuadratureConfig  # noqa: E402

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
_INPUT_ERRORS = (InvalidInput, UnknownEntry, GridMismatch, RouteUnavailable, IllConditioned,
                 OSError, ValueError)
_QUAD_KEYS = tuple(f.name for f in fields(QuadratureConfig))
_CONFIG_KEYS = set(_QUAD_KEYS) | {"format", "grid", "tau_max", "tau_step", "tau_cap", "n"}
_DEFAULT_GRID = "0.1,10,64"


class UsageError(Exception):
    """Bad arguments detected after argparse accepted them."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_grid(spec: str) -> np.ndarray:
    """``xmin,xmax,n`` -> geometric grid; requires 0 < xmin < xmax and n >= 2."""
    parts = str(spec).split(",")
    if len(parts) != 3:
        raise InvalidInput(f"grid must be xmin,xmax,n, got {spec!r}")
    try:
        xmin, xmax, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise InvalidInput(f"grid must be xmin,xmax,n, got {spec!r}") from None
    return geometric_grid(xmin, xmax, n)


def _load_config(path) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise InvalidInput("config file must hold a flat JSON object")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise InvalidInput(f"unknown config keys: {', '.join(sorted(unknown))}")
    for k, v in data.items():
        if isinstance(v, (dict, list)):
            raise InvalidInput(f"config key {k!r} must be a scalar")
    return data


def _setting(args, config: dict, key: str, default):
    value = getattr(args, key, None)
    if value is not None:
        return value
    return config.get(key, default)


def _quad_config(args, config: dict) -> QuadratureConfig:
    changes = {}
    for key in _QUAD_KEYS:
        value = _setting(args, config, key, None)
        if value is not None:
            changes[key] = value
    return DEFAULT_CONFIG.replace(**changes) if changes else DEFAULT_CONFIG


def _function(ref: str):
    """A catalog id or a path to an x,re,im CSV file."""
    if ref.lower().endswith(".csv") or os.path.sep in ref:
        return read_sampled_csv(ref)
    return catalog.get(ref)


# output ------------------------------------------------------------------------------

def _sampled_json(f: SampledFunction) -> str:
    return json.dumps({"x": f.x.tolist(), "re": f.values.real.tolist(),
                       "im": f.values.imag.tolist()}) + "\n"


def _spectrum_json(F: CriticalLineSpectrum) -> str:
    return json.dumps({"tau": F.tau.tolist(), "re": F.values.real.tolist(),
                       "im": F.values.imag.tolist(), "truncated": F.truncated}) + "\n"


def _emit(args, fmt: str, obj):
    if isinstance(obj, SampledFunction):
        text = sampled_to_csv(obj) if fmt == "csv" else _sampled_json(obj)
    elif isinstance(obj, CriticalLineSpectrum):
        text = spectrum_to_csv(obj) if fmt == "csv" else _spectrum_json(obj)
    else:
        text = json.dumps(obj, indent=2) + "\n"
    write_text_atomic(args.output, text)


# subcommands --------------------------------------------------------------------------

_OPS = {"laplace": transforms.OperatorKind.LAPLACE, "stieltjes": transforms.OperatorKind.STIELTJES,
        "s2": transforms.OperatorKind.STIELTJES2, "hilbert": transforms.OperatorKind.HILBERT,
        "hilbert2": transforms.OperatorKind.HILBERT2}


def _spectrum_grid(args, config):
    return tau_grid(float(_setting(args, config, "tau_max", 20.0)),
                    float(_setting(args, config, "tau_step", 0.05)))


def cmd_transform(args, config, cfg, fmt):
    x = parse_grid(_setting(args, config, "grid", _DEFAULT_GRID))
    f = _function(args.fn)
    route = transforms.Route.DIRECT if args.route == "direct" else transforms.Route.MELLIN
    tag = transforms.OperatorTag(_OPS[args.op], route)
    spectrum = None
    if route is transforms.Route.MELLIN:
        tau = _spectrum_grid(args, config)
        spectrum = f.spectrum(tau) if isinstance(f, catalog.CatalogEntry) else mellin_forward(f, tau, cfg)
    values = transforms.apply_operator(tag, f, x, cfg, spectrum)
    _emit(args, fmt, SampledFunction(x, values))
    return EXIT_OK


def cmd_spectrum(args, config, cfg, fmt):
    f = _function(args.fn)
    tau = _spectrum_grid(args, config)
    if args.exact:
        if not isinstance(f, catalog.CatalogEntry):
            raise InvalidInput("--exact needs a catalog id")
        F = f.spectrum(tau)
    else:
        F = mellin_forward(f, tau, cfg)
    _emit(args, fmt, F)
    return EXIT_OK


def cmd_convolve(args, config, cfg, fmt):
    x = parse_grid(_setting(args, config, "grid", _DEFAULT_GRID))
    f, g = catalog.get(args.f), catalog.get(args.g)
    if args.method == "mb":
        tau = _spectrum_grid(args, config)
        result = convolution.convolve_mb(f.spectrum(tau), g.spectrum(tau), x)
    else:
        result = convolution.convolve_pointwise(f, g, x, cfg)
    _emit(args, fmt, result.values)
    return EXIT_OK


def cmd_invert(args, config, cfg, fmt):
    x = parse_grid(_setting(args, config, "grid", _DEFAULT_GRID))
    G = read_spectrum_csv(args.input)
    n = int(_setting(args, config, "n", 60))
    icfg = inversion.InversionConfig(n_terms=n, tau_cap=float(_setting(args, config, "tau_cap", 3.0)),
                                     noise_floor=args.noise_floor)
    if args.profile:
        reference = _function(args.profile)
        profile = inversion.convergence_profile(G, reference, x, n, icfg)
        _emit(args, "json", {"reference": args.profile, "tau_cap": icfg.tau_cap,
                             "monotone": profile.monotone, "profile": profile.to_list()})
        return EXIT_OK
    if args.method == "spectral":
        f = inversion.invert_spectral(G, icfg, x)
    else:
        f = inversion.invert_series(G, n, x, icfg)
    _emit(args, fmt, f)
    return EXIT_OK


def cmd_solve(args, config, cfg, fmt):
    x = parse_grid(_setting(args, config, "grid", _DEFAULT_GRID))
    pair = sie.SiePair(args.pair, args.alpha, args.direction)
    f = _function(args.input)
    out = sie.apply(pair, f, x, cfg, method=args.method)
    _emit(args, fmt, out)
    return EXIT_OK


def cmd_verify(args, config, cfg, fmt):
    options = {}
    if args.suite == "roundtrip":
        if args.pair is not None or args.alpha is not None:
            options.update(pair=args.pair, alpha=args.alpha, fn=args.fn)
    elif args.pair is not None or args.alpha is not None or args.fn is not None:
        raise InvalidInput("--pair, --alpha and --fn apply to the roundtrip suite only")
    if cfg is not DEFAULT_CONFIG:
        # suites keep their own defaults unless tolerances were overridden
        fn = verification.SUITES.get(args.suite)
        if args.suite == "all" or "cfg" in fn.__code__.co_varnames:
            options["cfg"] = cfg
    report = verification.run_suite(args.suite, **options)
    _emit(args, "json", report.to_dict())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_catalog(args, config, cfg, fmt):
    listing = catalog.listing()
    if fmt == "csv":
        lines = ["id,description,known_transforms"]
        lines += [f"{e['id']},\"{e['description']}\",{'|'.join(e['known_transforms'])}" for e in listing]
        write_text_atomic(args.output, "\n".join(lines) + "\n")
    else:
        _emit(args, "json", {"entries": listing})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat JSON file of settings (flags take precedence)")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("-o", "--output", default="-", help="output path ('-' for stdout)")
    common.add_argument("--abs-tol", dest="abs_tol", type=float)
    common.add_argument("--rel-tol", dest="rel_tol", type=float)
    common.add_argument("--tail-cut", dest="tail_cut", type=float)
    common.add_argument("--pv-window-factor", dest="pv_window_factor", type=float)
    common.add_argument("--sing-series-delta", dest="sing_series_delta", type=float)
    common.add_argument("--max-depth", dest="max_depth", type=int)

    gridded = argparse.ArgumentParser(add_help=False)
    gridded.add_argument("--grid", help="xmin,xmax,n geometric grid (default 0.1,10,64)")

    spectral = argparse.ArgumentParser(add_help=False)
    spectral.add_argument("--tau-max", dest="tau_max", type=float)
    spectral.add_argument("--tau-step", dest="tau_step", type=float)

    parser = _Parser(prog="stieltjes-lab",
                     description="Iterated Stieltjes and half-axis Hilbert transforms on the critical line.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("transform", parents=[common, gridded, spectral], help="apply an operator on a grid")
    p.add_argument("--op", required=True, choices=sorted(_OPS))
    p.add_argument("--fn", required=True, help="catalog id or x,re,im CSV file")
    p.add_argument("--route", choices=("direct", "mellin"), default="direct")
    p.set_defaults(handler=cmd_transform)

    p = sub.add_parser("spectrum", parents=[common, spectral], help="critical-line spectrum of a function")
    p.add_argument("--fn", required=True)
    p.add_argument("--exact", action="store_true", help="use the catalog's closed-form spectrum")
    p.set_defaults(handler=cmd_spectrum)

    p = sub.add_parser("convolve", parents=[common, gridded, spectral], help="convolution of two catalog entries")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--method", choices=("mb", "pointwise"), default="pointwise")
    p.set_defaults(handler=cmd_convolve)

    p = sub.add_parser("invert", parents=[common, gridded], help="recover f from the spectrum of S2 f")
    p.add_argument("--input", required=True, help="tau,re,im CSV spectrum")
    p.add_argument("--method", choices=("spectral", "series"), default="spectral")
    p.add_argument("--n", type=int)
    p.add_argument("--tau-cap", dest="tau_cap", type=float)
    p.add_argument("--noise-floor", dest="noise_floor", type=float, default=1e-12)
    p.add_argument("--profile", metavar="REFERENCE",
                   help="catalog id or CSV: print the series convergence profile as JSON")
    p.set_defaults(handler=cmd_invert)

    p = sub.add_parser("solve", parents=[common, gridded], help="apply a singular-equation pair")
    p.add_argument("--pair", required=True, choices=("hilbert", "s2"))
    p.add_argument("--alpha", required=True, type=float)
    p.add_argument("--direction", choices=("forward", "inverse"), default="forward")
    p.add_argument("--input", required=True, help="catalog id or x,re,im CSV file")
    p.add_argument("--method", choices=("s2", "nested"), default="s2")
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite (JSON report)")
    p.add_argument("--suite", required=True, choices=sorted(verification.SUITES) + ["all"])
    p.add_argument("--pair", choices=("hilbert", "s2"))
    p.add_argument("--alpha", type=float)
    p.add_argument("--fn")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("catalog", parents=[common], help="catalog operations")
    p.add_argument("action", choices=("list",))
    p.set_defaults(handler=cmd_catalog)
    return parser


def _report_error(fmt: str, kind: str, message: str):
    if fmt == "json":
        sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    else:
        sys.stderr.write(f"stieltjes-lab: {kind}: {message}\n")


def _wants_json(argv) -> bool:
    for i, a in enumerate(argv):
        if a == "--format" and i + 1 < len(argv):
            return argv[i + 1] == "json"
        if a == "--format=json":
            return True
    return False


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    fmt_hint = "json" if _wants_json(argv) else "text"
    try:
        _thread_cap()
        args = build_parser().parse_args(argv)
        config = _load_config(args.config)
        fmt = args.format or config.get("format")
        if fmt is None:
            fmt = "json" if args.command in ("verify", "catalog") else "csv"
        if fmt not in ("csv", "json"):
            raise InvalidInput(f"format must be csv or json, got {fmt!r}")
        fmt_hint = "json" if fmt == "json" else fmt_hint
        cfg = _quad_config(args, config)
        return args.handler(args, config, cfg, fmt)
    except UsageError as exc:
        _report_error(fmt_hint, "usage", str(exc))
        return EXIT_INPUT
    except _INPUT_ERRORS as exc:
        _report_error(fmt_hint, type(exc).__name__, str(exc))
        return EXIT_INPUT
    except (StieltjesLabError, ArithmeticError) as exc:
        _report_error(fmt_hint, type(exc).__name__, str(exc))
        return EXIT_FAIL


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
