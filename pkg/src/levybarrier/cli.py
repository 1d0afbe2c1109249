"""Command-line interface: ``levybarrier price|table|curve|selftest``."""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .contours import ContourError, MethodModelError
from .engine import KINDS, CorridorTooNarrow, PayoffSpec, SingularSystem
from .levy import LevyModel, ModelDomainError
from .pricing import METHODS, PriceRequest, price, price_curve
from .tables import H_MINUS, H_PLUS, LAMBDA_MINUS, LAMBDA_PLUS, M2, SPOTS, TABLES

EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

_MODEL_KEYS = {"nu", "lambda_plus", "lambda_minus", "m2", "c", "mu"}
_PAYOFF_KEYS = {"kind", "h_minus", "h_plus", "a"}
_RUN_KEYS = {"T", "x", "x_range", "points", "method", "tolerance", "dual_run", "threads"}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    model: dict = field(default_factory=lambda: {"nu": 1.2, "lambda_plus": LAMBDA_PLUS,
                                                 "lambda_minus": LAMBDA_MINUS, "m2": M2, "mu": 0.0})
    payoff: dict = field(default_factory=lambda: {"kind": "notouch", "h_minus": H_MINUS, "h_plus": H_PLUS})
    run: dict = field(default_factory=lambda: {"T": [0.25], "x": list(SPOTS), "method": "auto",
                                               "tolerance": 1e-15, "dual_run": False})

    @classmethod
    def load(cls, path: Optional[str]) -> "RunConfig":
        cfg = cls()
        if path is None:
            return cfg
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(data) - {"model", "payoff", "run"}
        if unknown:
            raise ConfigError(f"unknown config blocks: {sorted(unknown)}")
        for block, keys in (("model", _MODEL_KEYS), ("payoff", _PAYOFF_KEYS), ("run", _RUN_KEYS)):
            part = data.get(block, {})
            if not isinstance(part, dict):
                raise ConfigError(f"block {block!r} must be an object")
            bad = set(part) - keys
            if bad:
                raise ConfigError(f"unknown keys in {block!r}: {sorted(bad)}")
            getattr(cfg, block).update(part)
        if "c" in data.get("model", {}) and "m2" not in data.get("model", {}):
            cfg.model.pop("m2", None)
        if data.get("payoff", {}).get("kind", "notouch") == "notouch":
            cfg.payoff.pop("a", None)
        return cfg

    def apply_flags(self, args):
        for key in ("nu", "lambda_plus", "lambda_minus", "m2", "c", "mu"):
            val = getattr(args, key, None)
            if val is not None:
                self.model[key] = val
                if key == "c":
                    self.model.pop("m2", None)
                if key == "m2":
                    self.model.pop("c", None)
        for key in ("kind", "h_minus", "h_plus", "a"):
            val = getattr(args, key, None)
            if val is not None:
                self.payoff[key] = val
        if getattr(args, "T", None):
            self.run["T"] = args.T
        if getattr(args, "x", None):
            self.run["x"] = args.x
        if args.method is not None:
            self.run["method"] = args.method
        if args.tol is not None:
            self.run["tolerance"] = args.tol
        if args.dual_run:
            self.run["dual_run"] = True
        if args.threads is not None:
            self.run["threads"] = args.threads

    def build_model(self) -> LevyModel:
        m = self.model
        try:
            return LevyModel.kobol(float(m["nu"]), float(m["lambda_plus"]), float(m["lambda_minus"]),
                                   c=m.get("c"), m2=m.get("m2"), mu=float(m.get("mu", 0.0)))
        except KeyError as exc:
            raise ConfigError(f"missing model key {exc}") from exc

    def build_payoff(self) -> PayoffSpec:
        p = self.payoff
        if p.get("kind") not in KINDS:
            raise ConfigError(f"payoff kind must be one of {KINDS}")
        a = p.get("a")
        return PayoffSpec(p["kind"], float(p["h_minus"]), float(p["h_plus"]),
                          None if a is None else float(a))

    def maturities(self) -> List[float]:
        T = self.run["T"]
        return [float(t) for t in (T if isinstance(T, list) else [T])]

    def spots(self) -> List[float]:
        x = self.run.get("x")
        if x is None:
            raise ConfigError("no spots given")
        return [float(v) for v in (x if isinstance(x, list) else [x])]

    def threads(self) -> int:
        return int(self.run.get("threads") or os.cpu_count() or 1)


def _writer(out):
    return csv.writer(out, lineterminator="\r\n")


def _fmt(v) -> str:
    return repr(float(v))


def cmd_price(args, out) -> int:
    cfg = RunConfig.load(args.config)
    cfg.apply_flags(args)
    model, payoff = cfg.build_model(), cfg.build_payoff()
    w = _writer(out)
    w.writerow(["x", "T", "value", "error_estimate", "method", "elapsed_ms", "flag"])
    for T in cfg.maturities():
        rep = price(PriceRequest(model, payoff, T, cfg.spots(), method=cfg.run["method"],
                                 tolerance=float(cfg.run["tolerance"]),
                                 dual_run=bool(cfg.run["dual_run"]), threads=cfg.threads()))
        ms = "" if args.no_timing else f"{rep.elapsed * 1e3:.0f}"
        for i, x in enumerate(rep.xs):
            err = "" if rep.errors is None else _fmt(rep.errors[i])
            w.writerow([_fmt(x), _fmt(T), _fmt(rep.values[i]), err, rep.method, ms,
                        "knocked" if rep.knocked[i] else ""])
    return 0


def cmd_table(args, out) -> int:
    if args.name not in TABLES:
        raise ConfigError(f"unknown table {args.name!r}; choose from {sorted(TABLES)}")
    tab = TABLES[args.name]
    model = LevyModel.kobol(tab.nu, LAMBDA_PLUS, LAMBDA_MINUS, m2=M2)
    payoff = PayoffSpec(tab.kind, H_MINUS, H_PLUS, tab.a)
    Ts = args.T or sorted(tab.rows)
    w = _writer(out)
    w.writerow(["table", "T", "x", "value", "published", "deviation", "error_estimate", "method"])
    threads = args.threads or os.cpu_count() or 1
    for T in Ts:
        if T not in tab.rows:
            raise ConfigError(f"{args.name} has no row for T={T}")
        rep = price(PriceRequest(model, payoff, T, SPOTS, method=args.method or "auto",
                                 tolerance=args.tol or 1e-15, dual_run=args.dual_run, threads=threads))
        for i, x in enumerate(SPOTS):
            ref = tab.rows[T][i]
            err = "" if rep.errors is None else _fmt(rep.errors[i])
            w.writerow([tab.name, _fmt(T), _fmt(x), _fmt(rep.values[i]), _fmt(ref),
                        _fmt(rep.values[i] - ref), err, rep.method])
    return 0


def cmd_curve(args, out) -> int:
    cfg = RunConfig.load(args.config)
    cfg.apply_flags(args)
    model, payoff = cfg.build_model(), cfg.build_payoff()
    n = args.points or int(cfg.run.get("points", 99))
    if n < 1:
        raise ConfigError("points must be positive")
    lo, hi = cfg.run.get("x_range", (payoff.h_minus, payoff.h_plus))
    if n == 1:
        xs = np.array([(lo + hi) / 2])
    else:
        xs = lo + (hi - lo) * np.arange(1, n + 1) / (n + 1)
    normalize = args.normalize
    w = _writer(out)
    w.writerow(["x", "T", "value"] + (["normalized"] if normalize else []))
    for T in cfg.maturities():
        rows, _ = price_curve(PriceRequest(model, payoff, T, xs, method=cfg.run["method"],
                                           tolerance=float(cfg.run["tolerance"]),
                                           threads=cfg.threads()), normalize=normalize)
        for row in rows:
            w.writerow([_fmt(row[0]), _fmt(T)] + [_fmt(v) for v in row[1:]])
    return 0


def cmd_selftest(args, out) -> int:
    from .selftest import run_all

    results = run_all(zeta_scale=args.zeta_scale)
    for r in results:
        out.write(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}\n")
    ok = all(r.passed for r in results)
    out.write(f"{'all checks passed' if ok else 'some checks failed'} ({len(results)} checks)\n")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with model/payoff/run blocks")
    common.add_argument("--method", choices=METHODS, default=None)
    common.add_argument("--tol", type=float, default=None, help="target accuracy of each quadrature")
    common.add_argument("--threads", type=int, default=None, help="q-chunk workers (default: all cores)")
    common.add_argument("--dual-run", action="store_true", help="price with two contour sets, report difference")
    common.add_argument("--out", help="write CSV here instead of standard output")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--nu", type=float)
    model.add_argument("--lambda-plus", dest="lambda_plus", type=float)
    model.add_argument("--lambda-minus", dest="lambda_minus", type=float)
    model.add_argument("--m2", type=float)
    model.add_argument("--c", type=float)
    model.add_argument("--mu", type=float)
    model.add_argument("--kind", choices=KINDS)
    model.add_argument("--h-minus", dest="h_minus", type=float)
    model.add_argument("--h-plus", dest="h_plus", type=float)
    model.add_argument("--a", type=float, help="log-strike")
    model.add_argument("--T", type=float, nargs="+")
    model.add_argument("--x", type=float, nargs="+")

    p = argparse.ArgumentParser(prog="levybarrier", description="Double-barrier option prices under KoBoL.")
    sub = p.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("price", parents=[common, model], help="price a payoff at given spots")
    sp.add_argument("--no-timing", action="store_true", help="leave elapsed_ms empty (byte-stable output)")
    st = sub.add_parser("table", parents=[common], help="reproduce a published benchmark table")
    st.add_argument("name", help="table1 .. table6")
    st.add_argument("--T", type=float, nargs="+")
    sc = sub.add_parser("curve", parents=[common, model], help="dense price curve")
    sc.add_argument("--points", type=int)
    sc.add_argument("--normalize", action="store_true", help="add V/(x-h_-)^{nu/2} column")
    ss = sub.add_parser("selftest", parents=[common], help="run the numerical self-checks")
    ss.add_argument("--zeta-scale", type=float, default=1.0, help=argparse.SUPPRESS)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"price": cmd_price, "table": cmd_table, "curve": cmd_curve,
               "selftest": cmd_selftest}[args.command]
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        return handler(args, out)
    except (ConfigError, ModelDomainError, MethodModelError, ValueError, KeyError, TypeError) as exc:
        sys.stderr.write(f"error: validation: {exc}\n")
        return EXIT_VALIDATION
    except (ContourError, CorridorTooNarrow, SingularSystem, ArithmeticError,
            np.linalg.LinAlgError) as exc:
        sys.stderr.write(f"error: numerical: {exc}\n")
        return EXIT_NUMERICAL
    finally:
        if args.out:
            out.close()


if __name__ == "__main__":
    sys.exit(main())
