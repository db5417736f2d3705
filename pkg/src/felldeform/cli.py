"""felldeform: verification suite and CSV scans from the command line.

Exit status: 0 when every check passes, 1 when a check fails, 2 on usage
errors (bad flags, bad config, malformed expressions, rejected models).
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

import numpy as np

from . import __version__
from . import tolerances as tol
from .calculus import commutator_limit_scan, derivative_limit_scan
from .checks import run_checks
from .config import MODELS, ConfigError, RunConfig, load_config_file
from .expr import ParseError, evaluate
from .models import build_model
from .norms import field_scan, required_window
from .parallel import thread_count
from .report import ScanReport, write_atomic

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
COMMANDS = ("verify", "derivative-scan", "commutator-scan", "field-scan", "spectral")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    S = argparse.SUPPRESS
    common.add_argument("--config", help="key = value file; flags override it")
    common.add_argument("--model", choices=MODELS, default=S)
    common.add_argument("--theta", type=float, default=S)
    common.add_argument("--p", type=int, default=S)
    common.add_argument("--q", type=int, default=S)
    common.add_argument("--c", type=int, default=S)
    common.add_argument("--mu", type=float, default=S)
    common.add_argument("--nu", type=float, default=S)
    common.add_argument("--grid", type=int, default=S, help="samples per periodic axis")
    common.add_argument("--hbar-min", type=float, default=S)
    common.add_argument("--hbar-max", type=float, default=S)
    common.add_argument("--hbar-count", type=int, default=S)
    common.add_argument("--log", action=argparse.BooleanOptionalAction, default=S,
                        help="log-spaced hbar grid")
    common.add_argument("--seed", type=int, default=S)
    common.add_argument("--out", default=S, help="CSV output path (stdout if omitted)")
    common.add_argument("--cutoff", type=int, default=S)
    common.add_argument("--f", default=S, help="first element (generator expression)")
    common.add_argument("--g", default=S, help="second element (generator expression)")
    common.add_argument("--expr", default=S, help="element for the spectral command")
    common.add_argument("--phi", default=S, help="element for the field scan")
    common.add_argument("--xi", action="append", default=S, help="fixed section (repeatable)")
    common.add_argument("--trials", type=int, default=S)
    common.add_argument("--triples", type=int, default=S)

    parser = _Parser(prog="felldeform", description="Theta-deformed Fell bundles on sample grids.")
    parser.add_argument("--version", action="version", version=f"felldeform {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "verify": "run the invariant suite for one model",
        "derivative-scan": "first-order residual of f x g against hbar",
        "commutator-scan": "commutator residual against the Poisson bracket",
        "field-scan": "L1 norm, Rayleigh lower bound and fixed-section norms against hbar",
        "spectral": "norms of the spectral components of an expression",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def make_config(argv: Sequence[str]) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    values: dict[str, object] = {}
    cfg_path = ns.pop("config", None)
    if cfg_path:
        values.update(load_config_file(cfg_path))
    command = ns.pop("command")
    if "xi" in ns:
        ns["xi"] = tuple(ns["xi"])
    values.update(ns)
    values["command"] = command
    return RunConfig(**values).resolved()


def _model(cfg: RunConfig):
    params = {"theta": cfg.theta, "p": cfg.p, "q": cfg.q, "c": cfg.c, "mu": cfg.mu, "nu": cfg.nu}
    try:
        return build_model(cfg.model, grid=cfg.grid, **params)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _emit(report: ScanReport, cfg: RunConfig, out=None):
    meta = {"tool": f"felldeform {__version__}"}
    meta.update(cfg.metadata())
    meta.update(report.metadata)
    report = ScanReport(report.columns, meta)
    if cfg.out:
        write_atomic(cfg.out, report.to_csv())
    else:
        (out or sys.stdout).write(report.to_csv())


def _expr(src: str, model, hbar=None):
    return evaluate(src, model, hbar)


def cmd_verify(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    model = _model(cfg)
    results = run_checks(model, seed=cfg.seed, triples=cfg.triples)
    width = max(len(r.name) for r in results)
    out.write(f"# felldeform {__version__} verify model={cfg.model} params={dict(model.params)}\n")
    out.write(f"{'check':<{width}}  {'residual':>12}  {'tolerance':>10}  status\n")
    for r in results:
        out.write(f"{r.name:<{width}}  {r.residual:12.3e}  {r.tolerance:10.0e}  "
                  f"{'pass' if r.passed else 'FAIL'}\n")
    failed = [r.name for r in results if not r.passed]
    out.write(f"{len(results) - len(failed)}/{len(results)} checks passed\n")
    if cfg.out:
        rows = {"residual": [r.residual for r in results], "tolerance": [r.tolerance for r in results]}
        rep = ScanReport(rows, {"checks": " ; ".join(r.name for r in results)})
        _emit(rep, cfg)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_derivative_scan(cfg: RunConfig, out=None) -> int:
    model = _model(cfg)
    f, g = _expr(cfg.f, model), _expr(cfg.g, model)
    rep = derivative_limit_scan(f, g, cfg.hbar_grid(), model.theta, model.calculus)
    _emit(rep, cfg, out)
    ok = all(r <= b + tol.SECOND_DERIVATIVE for r, b in zip(rep["residual_l1"], rep["lemma_bound"]))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_commutator_scan(cfg: RunConfig, out=None) -> int:
    model = _model(cfg)
    f, g = _expr(cfg.f, model), _expr(cfg.g, model)
    rep = commutator_limit_scan(f, g, cfg.hbar_grid(), model.theta, model.calculus)
    _emit(rep, cfg, out)
    return EXIT_OK


def cmd_field_scan(cfg: RunConfig, out=None) -> int:
    model = _model(cfg)
    # expressions are words in the undeformed generators; the scan deforms them
    phi = _expr(cfg.phi, model, 0.0)
    xis = [_expr(x, model, 0.0) for x in cfg.xi]
    window = max(required_window(phi, xi) for xi in xis)

    def sampler(rng):
        return model.random_element(rng, support=[[0], [1]])

    rep = field_scan(phi, xis, cfg.hbar_grid(), model.theta, window=window, trials=cfg.trials,
                     seed=cfg.seed or 0xFE11, sampler=sampler, canonical=model.canonical_sections(1))
    _emit(rep, cfg, out)
    col = rep["l1_norm"]
    return EXIT_OK if all(v == col[0] for v in col) else EXIT_FAIL


def cmd_spectral(cfg: RunConfig, out=None) -> int:
    model = _model(cfg)
    if cfg.expr is None:
        raise ConfigError("spectral needs --expr")
    a = _expr(cfg.expr, model)
    samples = model.ambient(a)
    try:
        parts = model.decompose(samples, cfg.cutoff)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    ts = list(range(-cfg.cutoff, cfg.cutoff + 1))
    norms = [float(np.max(np.abs(parts.term([t]).samples))) for t in ts]
    rep = ScanReport({"t_1": ts, "fiber_norm": norms})
    _emit(rep, cfg, out)
    return EXIT_OK


HANDLERS = {
    "verify": cmd_verify,
    "derivative-scan": cmd_derivative_scan,
    "commutator-scan": cmd_commutator_scan,
    "field-scan": cmd_field_scan,
    "spectral": cmd_spectral,
}


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        thread_count()
        cfg = make_config(argv)
        return HANDLERS[cfg.command](cfg)
    except (UsageError, ConfigError, ParseError) as exc:
        sys.stderr.write(f"felldeform: error: {exc}\n")
        return EXIT_USAGE
    except ValueError as exc:
        # model-level rejections (unknown generators, window overflow, ...)
        sys.stderr.write(f"felldeform: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
