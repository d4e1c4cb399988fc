"""Command-line front end.

    levy-extremum run      --config cfg.json [--method sinh] [--ne 8] [--out res.csv]
    levy-extremum bench    [--config bench.json] [--out report.md]
    levy-extremum oracle   --config cfg.json [--seed 7] [--n-steps 10000] [--n-paths 100000]
    levy-extremum whf-dump --config cfg.json --q 1.0 2.0 [--out whf.csv]

Config files are JSON; see README.md for the schema.  Grids accept lists,
numbers or the colon syntax "c*(lo:step:hi)", e.g. "0.005*(-20:1:20)".
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import re
import sys
import time
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from .contours import build_scheme
from .joint_cpdf import (FTD_CONVENTIONS, RegimeError, TripleQuery, check_regime, triple_lattice_disc,
                         triple_lattice_sinh, triple_lattice_sinh_gwr)
from .laplace import GwrConfig
from .levy_models import Brownian, model_from_config

log = logging.getLogger("levy_extremum")

METHODS = ("sinh", "sinh-gwr", "disc-sinh", "disc-gwr")
CSV_COLUMNS = ["a1", "a2", "T", "t", "value", "error_estimate", "method", "runtime"]


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the offending field path."""


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------

_RANGE = re.compile(r"^\s*(?:([-+0-9.eE]+)\s*\*\s*)?\(?\s*([-+0-9.eE]+)\s*:\s*([-+0-9.eE]+)\s*:\s*([-+0-9.eE]+)\s*\)?\s*$")


def parse_grid(spec, path: str) -> list[float]:
    """Expand a grid spec into a sorted list of floats."""
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        vals = [float(spec)]
    elif isinstance(spec, list):
        try:
            vals = [float(v) for v in spec]
        except (TypeError, ValueError):
            raise ConfigError(f"{path}: list entries must be numbers") from None
    elif isinstance(spec, str):
        m = _RANGE.match(spec)
        if not m:
            raise ConfigError(f"{path}: cannot parse grid {spec!r}; use 'c*(lo:step:hi)' or a list")
        c = float(m.group(1)) if m.group(1) else 1.0
        lo, step, hi = (float(m.group(i)) for i in (2, 3, 4))
        if step <= 0 or hi < lo:
            raise ConfigError(f"{path}: need step > 0 and hi >= lo in {spec!r}")
        n = int(math.floor((hi - lo) / step + 1e-9))
        vals = [float(f"{c * (lo + k * step):.12g}") for k in range(n + 1)]
    else:
        raise ConfigError(f"{path}: expected a number, a list or a range string")
    if not vals:
        raise ConfigError(f"{path}: empty grid")
    if not all(math.isfinite(v) for v in vals):
        raise ConfigError(f"{path}: grid values must be finite")
    return sorted(vals)


def _num(block: dict, key: str, path: str, default=None, positive=False) -> Optional[float]:
    if key not in block:
        if default is None:
            raise ConfigError(f"{path}.{key}: required")
        return default
    try:
        v = float(block[key])
    except (TypeError, ValueError):
        raise ConfigError(f"{path}.{key}: must be a number") from None
    if positive and not v > 0:
        raise ConfigError(f"{path}.{key}: must be positive")
    return v


def load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON in {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config: top level must be an object")
    return cfg


def resolve_run_config(cfg: dict, args) -> dict:
    """Merge command-line overrides into the config and validate every field."""
    if "model" not in cfg or not isinstance(cfg["model"], dict):
        raise ConfigError("model: required object")
    try:
        model = model_from_config(cfg["model"])
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"model: {exc}") from None
    q = cfg.get("query")
    if not isinstance(q, dict):
        raise ConfigError("query: required object")
    T = _num(q, "T", "query", positive=True)
    t = _num(q, "t", "query", positive=True)
    if t > T:
        raise ConfigError("query.t: must not exceed query.T")
    if "a1" not in q or "a2" not in q:
        raise ConfigError("query.a1/query.a2: required")
    a1s = parse_grid(q["a1"], "query.a1")
    a2s = parse_grid(q["a2"], "query.a2")
    if any(a2 <= 0 for a2 in a2s):
        raise ConfigError("query.a2: values must be positive")
    method = getattr(args, "method", None) or cfg.get("method", "sinh")
    if method not in METHODS:
        raise ConfigError(f"method: {method!r} not in {METHODS}")
    sch = dict(cfg.get("scheme", {}))
    if not isinstance(sch, dict):
        raise ConfigError("scheme: must be an object")
    for flag, key in (("ne", "Ne"), ("ne_whf", "Ne_whf"), ("dh", "dh")):
        v = getattr(args, flag, None)
        if v is not None:
            sch[key] = v
    Ne = _num(sch, "Ne", "scheme", 8.0, positive=True)
    Ne_whf = _num(sch, "Ne_whf", "scheme", Ne + 2.0, positive=True)
    dh = sch.get("dh")
    if method.startswith("disc"):
        if dh is None:
            raise ConfigError("scheme.dh: required for DISC methods")
        dh = _num(sch, "dh", "scheme", positive=True)
    M = int(_num(sch, "M", "scheme", 8, positive=True))
    shifts = sch.get("shifts", [0.0, 0.5, 1.0])
    if not isinstance(shifts, list) or not shifts:
        raise ConfigError("scheme.shifts: must be a non-empty list")
    ftd = cfg.get("ftd", "remaining")
    if ftd not in FTD_CONVENTIONS:
        raise ConfigError(f"ftd: {ftd!r} not in {FTD_CONVENTIONS}")
    out = dict(cfg.get("output", {}))
    if getattr(args, "out", None):
        out["path"] = args.out
    if getattr(args, "format", None):
        out["format"] = args.format
    fmt = out.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"output.format: {fmt!r} not in ('csv', 'json')")
    threads = getattr(args, "threads", None) or cfg.get("threads", 1)
    threads = int(threads)
    if threads < 1:
        raise ConfigError("threads: must be >= 1")
    return dict(model=model, model_block=cfg["model"], T=T, t=t, a1s=a1s, a2s=a2s, method=method,
                Ne=Ne, Ne_whf=Ne_whf, dh=dh, gwr=GwrConfig(M=M, shifts=tuple(float(s) for s in shifts)),
                ftd=ftd, path=out.get("path"), format=fmt, include_errors=bool(out.get("include_errors", True)),
                threads=threads)


def evaluate(rc: dict):
    """Result matrix (rows a1, columns a2) for a resolved config."""
    m, T, t = rc["model"], rc["T"], rc["t"]
    if rc["method"] == "sinh":
        return triple_lattice_sinh(m, T, t, rc["a1s"], rc["a2s"], rc["Ne"], rc["Ne_whf"], ftd=rc["ftd"],
                                   threads=rc["threads"])
    if rc["method"] == "sinh-gwr":
        return triple_lattice_sinh_gwr(m, T, t, rc["a1s"], rc["a2s"], rc["Ne"], rc["Ne_whf"], cfg=rc["gwr"],
                                       ftd=rc["ftd"])
    inner = rc["method"].split("-", 1)[1]
    return triple_lattice_disc(m, T, t, rc["a1s"], rc["a2s"], rc["dh"], inner, rc["Ne"], rc["Ne_whf"],
                               ftd=rc["ftd"])


def result_rows(rc: dict, res) -> list[dict]:
    rows = []
    for a1, row in zip(rc["a1s"], res):
        for a2, r in zip(rc["a2s"], row):
            rows.append({"a1": a1, "a2": a2, "T": rc["T"], "t": rc["t"], "value": r.value,
                         "error_estimate": r.error_estimate if rc["include_errors"] else "",
                         "method": rc["method"], "runtime": r.runtime})
    return rows


def write_rows(rows: list[dict], path: Optional[str], fmt: str, stream=None) -> None:
    fh = open(path, "w", newline="") if path else (stream or sys.stdout)
    try:
        if fmt == "json":
            json.dump(rows, fh, indent=1)
            fh.write("\n")
        else:
            w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    finally:
        if path:
            fh.close()


def _sidecar(rc: dict, res) -> dict:
    scheme = next((r.scheme_echo for row in res for r in row if r.scheme_echo), None)
    if scheme is None:
        scheme = build_scheme(rc["model"], rc["T"], rc["t"], rc["Ne"], rc["Ne_whf"]).to_dict()
    return {"model": rc["model_block"], "method": rc["method"], "ftd": rc["ftd"], "Ne": rc["Ne"],
            "Ne_whf": rc["Ne_whf"], "dh": rc["dh"], "gwr": {"M": rc["gwr"].M, "shifts": list(rc["gwr"].shifts)},
            "scheme": scheme}


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_run(args) -> int:
    rc = resolve_run_config(load_config(args.config), args)
    try:
        check_regime(rc["model"])
    except RegimeError as exc:
        for a1 in rc["a1s"]:
            for a2 in rc["a2s"]:
                log.error("query (a1=%g, a2=%g) rejected: %s", a1, a2, exc)
        return 3
    t0 = time.perf_counter()
    res = evaluate(rc)
    log.info("evaluated %d points in %.2f s", len(rc["a1s"]) * len(rc["a2s"]), time.perf_counter() - t0)
    write_rows(result_rows(rc, res), rc["path"], rc["format"])
    side = _sidecar(rc, res)
    side_path = (rc["path"] + ".scheme.json") if rc["path"] else None
    if side_path:
        with open(side_path, "w") as fh:
            json.dump(side, fh, indent=1)
    else:
        log.info("scheme: %s", json.dumps(side))
    return 0


def load_table1() -> dict:
    with resources.files("levy_extremum").joinpath("data/table1.json").open() as fh:
        return json.load(fh)


DEFAULT_BENCH = [{"nu": 1.2, "method": "sinh", "Ne": 8, "Ne_whf": 10}]


def cmd_bench(args) -> int:
    cfg = load_config(args.config)
    rows = cfg.get("rows", DEFAULT_BENCH)
    if not isinstance(rows, list) or not rows:
        raise ConfigError("rows: must be a non-empty list")
    ref = load_table1()
    lines = ["| nu | method | Ne | Ne_whf | dh | time/point (s) | min error | max error | max estimate |",
             "|---|---|---|---|---|---|---|---|---|"]
    ok = True
    for i, row in enumerate(rows):
        nu = str(row.get("nu"))
        if nu not in ref["values"]:
            raise ConfigError(f"rows[{i}].nu: no reference values for nu={nu}")
        block = dict(ref["model"], nu=float(nu))
        fake = argparse.Namespace(method=row.get("method", "sinh"), ne=row.get("Ne"), ne_whf=row.get("Ne_whf"),
                                  dh=row.get("dh"), out=None, format=None, threads=getattr(args, "threads", None))
        rc = resolve_run_config({"model": block, "query": {"T": ref["T"], "t": ref["t"], "a1": ref["a1"],
                                                           "a2": ref["a2"]}}, fake)
        t0 = time.perf_counter()
        res = evaluate(rc)
        per = (time.perf_counter() - t0) / (len(rc["a1s"]) * len(rc["a2s"]))
        V = np.array([[r.raw for r in rr] for rr in res])
        E = np.array([[r.error_estimate for r in rr] for rr in res])
        err = np.abs(V - np.array(ref["values"][nu]))
        ok &= bool(np.all(np.isfinite(V)))
        dh = f"{rc['dh']:.3g}" if rc["dh"] else "-"
        lines.append(f"| {nu} | {rc['method']} | {rc['Ne']:g} | {rc['Ne_whf']:g} | {dh} | {per:.3f} | "
                     f"{err.min():.2e} | {err.max():.2e} | {np.nanmax(E):.2e} |")
    report = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(report)
    else:
        sys.stdout.write(report)
    return 0 if ok else 1


def cmd_oracle(args) -> int:
    from .oracle import McConfig, bm_triple_cpdf, mc_triple_cpdf

    cfg = load_config(args.config)
    rc = resolve_run_config(cfg, argparse.Namespace(method="sinh", out=args.out, format=args.format))
    mc = McConfig(n_steps=args.n_steps, n_paths=args.n_paths, seed=args.seed)
    pairs = [(a1, a2) for a1 in rc["a1s"] for a2 in rc["a2s"]]
    q = TripleQuery(pairs[0][0], pairs[0][1], rc["T"], rc["t"])
    est, se = mc_triple_cpdf(rc["model"], q, mc, points=pairs)
    rows = []
    for (a1, a2), e, s in zip(pairs, est, se):
        row = {"a1": a1, "a2": a2, "T": rc["T"], "t": rc["t"], "mc": float(e), "mc_se": float(s)}
        if isinstance(rc["model"], Brownian) and rc["model"].mu == 0:
            row["bm_exact"] = bm_triple_cpdf(a1, a2, rc["T"], rc["t"], rc["model"].params.sigma)
        rows.append(row)
    fh = open(rc["path"], "w", newline="") if rc["path"] else sys.stdout
    try:
        if rc["format"] == "json":
            json.dump(rows, fh, indent=1)
            fh.write("\n")
        else:
            w = csv.DictWriter(fh, fieldnames=list(rows[0].keys()), lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
    finally:
        if rc["path"]:
            fh.close()
    return 0


def cmd_whf_dump(args) -> int:
    from .wiener_hopf import dump_csv, whf_table

    cfg = load_config(args.config)
    if "model" not in cfg:
        raise ConfigError("model: required object")
    try:
        model = model_from_config(cfg["model"])
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"model: {exc}") from None
    if not args.q or any(not v > 0 for v in args.q):
        raise ConfigError("--q: need at least one positive q")
    s = build_scheme(model, 1.0, 1.0, args.ne or 8.0, args.ne_whf)
    tab = whf_table(model, np.array(args.q, dtype=float), s.xi, s.eta, s.xi1, s.eta1)
    path = args.out or "whf.csv"
    dump_csv(tab, path)
    log.info("wrote %s", path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="levy-extremum",
                                description="Joint law of a Levy process, its supremum and the time of the supremum")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_method=True):
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--format", choices=("csv", "json"))
        sp.add_argument("--threads", type=int)
        if with_method:
            sp.add_argument("--method", choices=METHODS)
            sp.add_argument("--ne", type=float)
            sp.add_argument("--ne-whf", dest="ne_whf", type=float)
            sp.add_argument("--dh", type=float)

    sp = sub.add_parser("run", help="evaluate V on an (a1, a2) lattice")
    common(sp)
    sp.set_defaults(func=cmd_run)
    sp = sub.add_parser("bench", help="accuracy/runtime report against the stored benchmark lattice")
    common(sp, with_method=False)
    sp.set_defaults(func=cmd_bench)
    sp = sub.add_parser("oracle", help="Monte Carlo (and exact Brownian) reference values")
    common(sp, with_method=False)
    sp.add_argument("--seed", type=int, default=20240611)
    sp.add_argument("--n-steps", dest="n_steps", type=int, default=10_000)
    sp.add_argument("--n-paths", dest="n_paths", type=int, default=100_000)
    sp.set_defaults(func=cmd_oracle)
    sp = sub.add_parser("whf-dump", help="dump Wiener-Hopf factors on the working grids")
    common(sp, with_method=False)
    sp.add_argument("--q", type=float, nargs="+", required=True)
    sp.add_argument("--ne", type=float)
    sp.add_argument("--ne-whf", dest="ne_whf", type=float)
    sp.set_defaults(func=cmd_whf_dump)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("invalid configuration: %s", exc)
        return 2
    except RegimeError as exc:
        log.error("rejected: %s", exc)
        return 3


if __name__ == "__main__":
    sys.exit(main())
