"""Command-line entry point.

Exit codes: 0 every asserted check passed, 1 at least one failed,
2 usage or configuration error, 3 I/O error.

The ``--config`` file is a flat UTF-8 ``key = value`` document (``#``
comments allowed).  Recognized keys::

    suites          comma list drawn from reduce, patch, liouville, index, symplectic, quillen
    grid            torus and patch size for the pointwise checks (default 32)
    matrix_grid     torus size for dense deformation-complex matrices (8)
    index_grid      torus size for the lattice index (16)
    patch_grids     comma list of patch sizes for the convergence study (32,64,128)
    patch_r0        patch radius for the convergence study (0.1)
    liouville_grid  patch size for the Liouville solve (64)
    liouville_r0    patch radius for the Liouville solve (0.5)
    seeds           comma list of integer seeds (1,2,3)
    draws           random samples per seed (100)
    probes          nondegeneracy probes per seed (20)
    tol             tolerance for exact-identity checks (1e-12)
    out             ledger path, JSON lines appended (swlab_ledger.jsonl)
    snapshot        directory for field snapshots and solver traces (unset)
    h_mode          unit or general

Command-line flags override the file.
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
import time

from .suites import SUITES, RunConfig, run_suites

COMMANDS = {
    "reduce-check": ("reduce",),
    "patch-verify": ("patch",),
    "liouville-solve": ("liouville",),
    "index-check": ("index",),
    "symplectic-check": ("symplectic",),
    "quillen-check": ("quillen",),
    "all": SUITES,
}

_INT = ("grid", "matrix_grid", "index_grid", "liouville_grid", "draws", "probes")
_FLOAT = ("patch_r0", "liouville_r0", "tol")
_INT_LIST = ("patch_grids", "seeds")
_STR = ("out", "snapshot", "h_mode")
CONFIG_KEYS = ("suites",) + _INT + _FLOAT + _INT_LIST + _STR

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(ValueError):
    pass


def _int_list(text):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise UsageError(f"expected a comma-separated list of integers, got {text!r}") from None


def parse_config_text(text):
    """Parse a flat ``key = value`` document into RunConfig keyword arguments."""
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",), comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise UsageError(f"malformed config: {exc}") from None
    out = {}
    for key, raw in cp["run"].items():
        if key not in CONFIG_KEYS:
            raise UsageError(f"unknown config key {key!r}")
        raw = raw.strip()
        try:
            if key in _INT:
                out[key] = int(raw)
            elif key in _FLOAT:
                out[key] = float(raw)
            elif key in _INT_LIST:
                out[key] = _int_list(raw)
            elif key == "suites":
                out[key] = tuple(s.strip() for s in raw.split(",") if s.strip())
            else:
                out[key] = raw
        except ValueError:
            raise UsageError(f"bad value for {key}: {raw!r}") from None
    return out


def build_parser():
    ap = argparse.ArgumentParser(prog="swlab", description="Numerical verification suites for the reduced vortex equations.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, suites in COMMANDS.items():
        p = sub.add_parser(name, help=f"run the {', '.join(suites)} suite" + ("s" if len(suites) > 1 else ""))
        p.add_argument("--grid", type=int, help="grid size N (N x N nodes)")
        p.add_argument("--seed", help="seed or comma-separated seeds")
        p.add_argument("--tol", type=float, help="tolerance for exact-identity checks")
        p.add_argument("--out", help="JSON-lines ledger to append to")
        p.add_argument("--snapshot", help="directory for field snapshots and solver traces")
        p.add_argument("--h-mode", choices=("unit", "general"), help="fiber metric for the curvature identities")
        p.add_argument("--config", help="flat key=value configuration file")
    return ap


def make_run_config(args):
    kw = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config}: {exc.strerror}") from None
        except UnicodeDecodeError:
            raise UsageError(f"config {args.config} is not UTF-8") from None
        kw.update(parse_config_text(text))
    if args.command != "all" or "suites" not in kw:
        kw["suites"] = COMMANDS[args.command]
    for flag, key in (("grid", "grid"), ("tol", "tol"), ("out", "out"), ("snapshot", "snapshot"), ("h_mode", "h_mode")):
        value = getattr(args, flag)
        if value is not None:
            kw[key] = value
    if args.seed is not None:
        kw["seeds"] = _int_list(args.seed)
    try:
        return RunConfig(**kw)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def open_ledger(path):
    """Open the ledger for appending before any work is done."""
    d = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(d):
        raise OSError(f"output directory {d} does not exist")
    return os.open(path, os.O_WRONLY | os.O_APPEND | os.O_CREAT, 0o644)


def append_records(fd, records):
    """Append all records with a single write so the ledger never holds a partial run."""
    blob = "".join(json.dumps(r.as_dict(), sort_keys=True) + "\n" for r in records).encode()
    written = os.write(fd, blob)
    if written != len(blob):
        raise OSError(f"short write to ledger ({written} of {len(blob)} bytes)")


def _summary(records, stream):
    width = max((len(r.check_id) for r in records), default=10)
    for r in records:
        status = "PASS" if r.passed else "FAIL"
        if not r.asserted:
            status = "INFO"
        computed = r.computed if isinstance(r.computed, (int, float)) else "-"
        print(f"{status}  {r.check_id:<{width}}  {computed!s:>24}  {r.comparison} {r.tolerance if r.tolerance is not None else r.expected}",
              file=stream)


def run_suite(cfg, stream=None):
    """Run the selected suites, append the ledger and return the exit status."""
    stream = stream or sys.stdout
    fd = open_ledger(cfg.out)
    try:
        if cfg.snapshot:
            os.makedirs(cfg.snapshot, exist_ok=True)
        t0 = time.perf_counter()
        records = run_suites(cfg)
        append_records(fd, records)
    finally:
        os.close(fd)
    _summary(records, stream)
    failed = [r for r in records if not r.passed]
    print(f"{len(records) - len(failed)}/{len(records)} checks passed in {time.perf_counter() - t0:.1f} s; ledger {cfg.out}",
          file=stream)
    return EXIT_FAIL if failed else EXIT_PASS


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    try:
        cfg = make_run_config(args)
    except UsageError as exc:
        print(f"swlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return run_suite(cfg)
    except OSError as exc:
        print(f"swlab: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
