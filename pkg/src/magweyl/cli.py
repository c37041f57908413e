"""Command-line front end.

Subcommands
-----------
``verify``      run the self-check suite, emit reports.jsonl / summary.csv
``ambiguity``   cross-ambiguity table of the configured state and window
``wigner``      cross-Wigner table of the configured state pair
``quantize``    operator matrix quantizing the configured Wigner symbol
``moyal``       twisted product of two configured Wigner symbols
``modnorm``     phase-space mixed norm of the configured state
``group-info``  symbolic facts about a registered group (no grid needed)

Configuration comes from three layers merged in order: built-in defaults,
an optional ``key = value`` config file (``--config``), then command-line
flags.  The merged raw key/value map is copied verbatim into every
``manifest.json`` so an output directory records exactly what produced it.

Config keys use dotted sections (``grid.n``, ``window.width``,
``exponents.r`` ...).  Magnetic potential components are given on their
own lines, one monomial each::

    A: [comp=1, exp=(0,1), coeff=1/1]     # x2 dx1 on a 2-d group

``comp`` is the 1-based covector slot, ``exp`` the exponent tuple of the
monomial, ``coeff`` an exact rational.  The same lines may live in a
separate file passed with ``--potential``.

Every computing subcommand writes its arrays twice (binary tensor +
CSV) plus a manifest with versions, seed, and wall-clock timings; reruns
with the same configuration are byte-identical.
"""

import argparse
import json
import os
import platform
import re
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__
from .modspace import INFINITY, as_exponent, mod_norm_vector
from .nilpotent import (
    ClosureError,
    algebra,
    build_translate_span,
    semidirect_nilpotency_check,
)
from .magnetic import MagneticPotential
from .poly import Polynomial
from .repspace import GridSpec, csv_write, gaussian_state, tensor_write
from .verify import (
    CHECK_NAMES,
    run_suite,
    suite_passed,
    write_reports_jsonl,
    write_summary_csv,
)
from .weyl import QuantizerContext, ambiguity, moyal_product, quantize, wigner


# ---------------------------------------------------------------------------
# Raw configuration: defaults, file parsing, flag merging
# ---------------------------------------------------------------------------

_DEFAULTS = {
    "group": "abelian:1",
    "grid.n": "64",
    "grid.extent": "16",
    "grid.backend": "grid",
    "grid.quad_nodes": "12",
    "grid.quad_box": "6",
    "epsilon": "1",
    "seed": "0",
    "out": "magweyl-out",
    "only": "",
    "symbol.kind": "wigner",
    "window.center": "",
    "window.width": "1",
    "window.momentum": "",
    "window.chirp": "0",
    "state.center": "",
    "state.width": "1",
    "state.momentum": "",
    "state.chirp": "0",
    "state2.center": "",
    "state2.width": "1",
    "state2.momentum": "",
    "state2.chirp": "0",
    "exponents.r": "2",
    "exponents.s": "2",
    "exponents.r1": "2",
    "exponents.s1": "2",
    "exponents.r2": "2",
    "exponents.s2": "2",
}

_POTENTIAL_ENTRY = re.compile(
    r"\[\s*comp\s*=\s*(\d+)\s*,\s*exp\s*=\s*\(([^)]*)\)\s*,\s*coeff\s*=\s*([^\]]+)\]\s*$"
)


def _strip_comment(line):
    cut = line.find("#")
    if cut >= 0:
        line = line[:cut]
    return line.strip()


def parse_config_text(text):
    """Split config text into (key, value) pairs and raw potential entries.

    Lines are ``key = value``, ``A: [comp=..., exp=(...), coeff=...]``, blank,
    or ``#`` comments.  No validation happens here beyond line shape.
    """
    pairs = []
    entries = []
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = _strip_comment(rawline)
        if not line:
            continue
        if line.startswith("A:"):
            entries.append(line[2:].strip())
            continue
        if "=" in line:
            key, _, value = line.partition("=")
            pairs.append((key.strip(), value.strip()))
            continue
        raise ValueError("malformed configuration line %d: %r" % (lineno, rawline))
    return pairs, entries


def _merge_raw(raw, pairs, origin):
    for key, value in pairs:
        if key not in raw:
            raise ValueError("unknown configuration key %r (from %s)" % (key, origin))
        raw[key] = value
    return raw


def _parse_int(raw, key):
    try:
        return int(raw[key])
    except ValueError:
        raise ValueError("configuration key %r: %r is not an integer" % (key, raw[key]))


def _parse_float(raw, key):
    try:
        return float(Fraction(raw[key]))
    except (ValueError, ZeroDivisionError):
        raise ValueError("configuration key %r: %r is not a number" % (key, raw[key]))


def _parse_vector(raw, key, dim):
    """Comma-separated float list of length ``dim``; empty string means unset."""
    text = raw[key].strip()
    if not text:
        return None
    parts = [p.strip() for p in text.split(",")]
    try:
        values = [float(Fraction(p)) for p in parts]
    except (ValueError, ZeroDivisionError):
        raise ValueError("configuration key %r: %r is not a number list" % (key, raw[key]))
    if len(values) != dim:
        raise ValueError(
            "configuration key %r needs %d component(s), got %d" % (key, dim, len(values))
        )
    return values


def _parse_exponent(raw, key):
    try:
        return as_exponent(raw[key])
    except (ValueError, ZeroDivisionError):
        raise ValueError("configuration key %r: %r is not a valid exponent" % (key, raw[key]))


def parse_potential_entry(body, dim):
    """Parse one ``[comp=i, exp=(e1,..,ed), coeff=p/q]`` body."""
    match = _POTENTIAL_ENTRY.match(body.strip())
    if match is None:
        raise ValueError("malformed potential entry %r" % body)
    comp = int(match.group(1))
    if not 1 <= comp <= dim:
        raise ValueError(
            "potential entry %r: component %d is outside 1..%d" % (body, comp, dim)
        )
    exp_text = [p.strip() for p in match.group(2).split(",") if p.strip()]
    if len(exp_text) != dim:
        raise ValueError(
            "potential entry %r: exponent tuple needs %d slot(s), got %d"
            % (body, dim, len(exp_text))
        )
    try:
        exps = tuple(int(p) for p in exp_text)
    except ValueError:
        raise ValueError("potential entry %r: exponents must be integers" % body)
    if any(e < 0 for e in exps):
        raise ValueError("potential entry %r: exponents must be >= 0" % body)
    coeff_text = match.group(3).strip()
    try:
        coeff = Fraction(coeff_text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(
            "potential coefficient %r is not a rational number" % coeff_text
        )
    return comp, exps, coeff


def build_potential(entries, dim):
    """Sum the monomial entries into a MagneticPotential, or None if empty."""
    if not entries:
        return None
    comps = [Polynomial.zero(dim) for _ in range(dim)]
    for body in entries:
        comp, exps, coeff = parse_potential_entry(body, dim)
        comps[comp - 1] = comps[comp - 1] + Polynomial(dim, {exps: coeff})
    return MagneticPotential(comps)


# ---------------------------------------------------------------------------
# RunConfig: validated objects built from the raw map
# ---------------------------------------------------------------------------

_GAUSSIAN_BLOCKS = ("window", "state", "state2")


class RunConfig:
    """Validated run configuration.

    ``raw`` is the merged key/value map exactly as it will appear in the
    manifest; everything else is built (and therefore validated) from it.
    ``build_grid=False`` skips the discretization, for subcommands that
    only need symbolic data.
    """

    __slots__ = (
        "raw", "potential_entries", "group", "spec", "potential",
        "seed", "out_dir", "only", "symbol_kind", "gaussians", "exponents",
    )

    def __init__(self, raw, potential_entries, build_grid=True):
        self.raw = dict(raw)
        self.potential_entries = list(potential_entries)
        self.group = algebra(self.raw["group"])
        dim = self.group.dim

        self.seed = _parse_int(self.raw, "seed")
        self.out_dir = self.raw["out"]
        only = [s.strip() for s in self.raw["only"].split(",") if s.strip()]
        self.only = only or None

        kind = self.raw["symbol.kind"]
        if kind not in ("wigner", "random"):
            raise ValueError(
                "configuration key 'symbol.kind': %r is not 'wigner' or 'random'" % kind
            )
        self.symbol_kind = kind

        self.exponents = {}
        for name in ("r", "s", "r1", "s1", "r2", "s2"):
            self.exponents[name] = _parse_exponent(self.raw, "exponents." + name)

        self.gaussians = {}
        for block in _GAUSSIAN_BLOCKS:
            self.gaussians[block] = {
                "center": _parse_vector(self.raw, block + ".center", dim),
                "width": _parse_float(self.raw, block + ".width"),
                "momentum": _parse_vector(self.raw, block + ".momentum", dim),
                "chirp": _parse_float(self.raw, block + ".chirp"),
            }

        self.potential = build_potential(self.potential_entries, dim)

        if build_grid:
            backend = self.raw["grid.backend"]
            self.spec = GridSpec(
                self.group,
                _parse_int(self.raw, "grid.n"),
                _parse_float(self.raw, "grid.extent"),
                backend=backend,
                epsilon=_parse_float(self.raw, "epsilon"),
                quad_nodes=_parse_int(self.raw, "grid.quad_nodes"),
                quad_box=_parse_float(self.raw, "grid.quad_box"),
            )
        else:
            self.spec = None

    def state(self, block):
        return gaussian_state(self.spec, **self.gaussians[block])

    def context(self):
        return QuantizerContext(
            self.spec, potential=self.potential, window=self.state("window")
        )


def parse_config(path=None, overrides=None, potential_path=None, build_grid=True):
    """Merge defaults, an optional config file, and flag overrides.

    ``overrides`` is a list of (key, value) pairs already in config-key
    form.  ``potential_path`` names a file holding only ``A:`` entry lines
    (plus comments); its entries are appended after the config file's.
    """
    raw = dict(_DEFAULTS)
    entries = []
    if path is not None:
        with open(path, "r", encoding="utf-8") as handle:
            pairs, file_entries = parse_config_text(handle.read())
        _merge_raw(raw, pairs, path)
        entries.extend(file_entries)
    if potential_path is not None:
        with open(potential_path, "r", encoding="utf-8") as handle:
            pairs, file_entries = parse_config_text(handle.read())
        if pairs:
            raise ValueError(
                "potential file %s must contain only 'A:' entry lines" % potential_path
            )
        entries.extend(file_entries)
    if overrides:
        _merge_raw(raw, overrides, "command line")
    return RunConfig(raw, entries, build_grid=build_grid)


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

def emit_report(reports, out_dir):
    """Write reports.jsonl and summary.csv under out_dir; return their paths."""
    os.makedirs(out_dir, exist_ok=True)
    jsonl_path = os.path.join(out_dir, "reports.jsonl")
    csv_path = os.path.join(out_dir, "summary.csv")
    write_reports_jsonl(reports, jsonl_path)
    write_summary_csv(reports, csv_path)
    return [jsonl_path, csv_path]


def _write_manifest(cfg, command, out_dir, outputs, timings):
    manifest = {
        "command": command,
        "config": cfg.raw,
        "potential": cfg.potential_entries,
        "versions": {
            "magweyl": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
        "seed": cfg.seed,
        "timings": {name: round(value, 6) for name, value in timings.items()},
        "outputs": [os.path.basename(p) for p in outputs],
    }
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return path


def _write_array(out_dir, stem, array):
    """Write one array as binary tensor + CSV; return both paths."""
    os.makedirs(out_dir, exist_ok=True)
    tensor_path = os.path.join(out_dir, stem + ".mwt")
    csv_path = os.path.join(out_dir, stem + ".csv")
    tensor_write(tensor_path, array)
    csv_write(csv_path, array)
    return [tensor_path, csv_path]


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_verify(cfg):
    started = time.perf_counter()
    reports, timings = run_suite(seed=cfg.seed, only=cfg.only)
    outputs = emit_report(reports, cfg.out_dir)
    timings = dict(timings)
    timings["total"] = time.perf_counter() - started
    _write_manifest(cfg, "verify", cfg.out_dir, outputs, timings)
    for report in reports:
        print(report.summary_line())
    ok = suite_passed(reports)
    print("suite: %s (%d report(s), wrote %s)"
          % ("PASS" if ok else "FAIL", len(reports), cfg.out_dir))
    return 0 if ok else 1


def _field_command(cfg, command):
    """Shared body of ``ambiguity`` and ``wigner``."""
    started = time.perf_counter()
    ctx = cfg.context()
    state = cfg.state("state")
    if command == "ambiguity":
        field = ambiguity(ctx, state)
    else:
        field = wigner(ctx, state, cfg.state("state2"))
    elapsed = time.perf_counter() - started
    outputs = _write_array(cfg.out_dir, command, field.values)
    _write_manifest(cfg, command, cfg.out_dir, outputs, {command: elapsed})
    print("%s table %r on side %s -> %s"
          % (command, field.values.shape, field.side, cfg.out_dir))
    return 0


def _configured_symbol(cfg, ctx, block):
    """The symbol a subcommand quantizes or multiplies.

    ``wigner`` (default): cross-Wigner of the block's state against the
    window.  ``random``: seeded random symbol, for quick stress runs.
    """
    if cfg.symbol_kind == "random":
        from .verify import random_symbol

        rng = np.random.default_rng([cfg.seed, _GAUSSIAN_BLOCKS.index(block)])
        return random_symbol(ctx, rng)
    return wigner(ctx, cfg.state(block), ctx.window)


def _cmd_quantize(cfg):
    started = time.perf_counter()
    ctx = cfg.context()
    op = quantize(ctx, _configured_symbol(cfg, ctx, "state"))
    elapsed = time.perf_counter() - started
    outputs = _write_array(cfg.out_dir, "operator", op.matrix)
    _write_manifest(cfg, "quantize", cfg.out_dir, outputs, {"quantize": elapsed})
    print("operator matrix %r -> %s" % (op.matrix.shape, cfg.out_dir))
    return 0


def _cmd_moyal(cfg):
    started = time.perf_counter()
    ctx = cfg.context()
    a = _configured_symbol(cfg, ctx, "state")
    b = _configured_symbol(cfg, ctx, "state2")
    product = moyal_product(ctx, a, b)
    elapsed = time.perf_counter() - started
    outputs = _write_array(cfg.out_dir, "moyal", product.values)
    _write_manifest(cfg, "moyal", cfg.out_dir, outputs, {"moyal": elapsed})
    print("twisted product %r on side %s -> %s"
          % (product.values.shape, product.side, cfg.out_dir))
    return 0


def _cmd_modnorm(cfg):
    started = time.perf_counter()
    ctx = cfg.context()
    value = mod_norm_vector(
        ctx, cfg.state("state"), ctx.window, cfg.exponents["r"], cfg.exponents["s"]
    )
    elapsed = time.perf_counter() - started
    os.makedirs(cfg.out_dir, exist_ok=True)
    csv_path = os.path.join(cfg.out_dir, "modnorm.csv")
    with open(csv_path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("r,s,value\n")
        handle.write("%s,%s,%.17g\n" % (cfg.raw["exponents.r"], cfg.raw["exponents.s"], value))
    outputs = [csv_path]
    _write_manifest(cfg, "modnorm", cfg.out_dir, outputs, {"modnorm": elapsed})
    print("%.17g" % value)
    return 0


def _cmd_group_info(name):
    alg = algebra(name)
    print("group: %s" % alg.name)
    print("dimension: %d" % alg.dim)
    print("nilpotency step: %d" % alg.step)
    try:
        span = build_translate_span(alg)
        structure, step, is_nil = semidirect_nilpotency_check(alg, span)
    except (ClosureError, ValueError) as err:
        print("translate span: failed (%s)" % err)
        return 1
    print("translate span dimension: %d" % span.dim)
    print("extended algebra dimension: %d" % (alg.dim + span.dim))
    print("extended nilpotency step: %d" % step)
    print("extended algebra nilpotent: %s" % ("yes" if is_nil else "no"))
    return 0


def dispatch(command, cfg):
    """Route one parsed subcommand; returns the process exit code."""
    if command == "verify":
        return _cmd_verify(cfg)
    if command in ("ambiguity", "wigner"):
        return _field_command(cfg, command)
    if command == "quantize":
        return _cmd_quantize(cfg)
    if command == "moyal":
        return _cmd_moyal(cfg)
    if command == "modnorm":
        return _cmd_modnorm(cfg)
    if command == "group-info":
        return _cmd_group_info(cfg.raw["group"])
    raise ValueError("unknown subcommand %r" % command)


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

# (flag destination, config key) pairs for plain value flags
_FLAG_KEYS = (
    ("group", "group"),
    ("n", "grid.n"),
    ("extent", "grid.extent"),
    ("backend", "grid.backend"),
    ("epsilon", "epsilon"),
    ("seed", "seed"),
    ("out", "out"),
    ("r", "exponents.r"),
    ("s", "exponents.s"),
    ("r1", "exponents.r1"),
    ("s1", "exponents.s1"),
    ("r2", "exponents.r2"),
    ("s2", "exponents.s2"),
)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="magweyl",
        description="phase-space transforms and self-checks for nilpotent groups",
    )
    parser.add_argument(
        "--version", action="version", version="magweyl %s" % __version__
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="key = value config file")
    common.add_argument("--potential", metavar="FILE",
                        help="file of 'A:' potential entry lines")
    common.add_argument("--group", help="group name (abelian:n, heisenberg, engel)")
    common.add_argument("--n", help="lattice points per axis")
    common.add_argument("--extent", help="box side length")
    common.add_argument("--backend", help="grid or quadrature")
    common.add_argument("--epsilon", help="representation parameter")
    common.add_argument("--seed", help="random seed")
    common.add_argument("--out", help="output directory")
    for name in ("r", "s", "r1", "s1", "r2", "s2"):
        common.add_argument("--" + name, help="exponent (number or 'inf')")

    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    sub.add_parser("verify", parents=[common],
                   help="run the self-check suite").add_argument(
        "--only", action="append", metavar="NAME",
        help="run only this check (repeatable)")
    sub.add_parser("ambiguity", parents=[common],
                   help="cross-ambiguity table of state vs window")
    sub.add_parser("wigner", parents=[common],
                   help="cross-Wigner table of state vs state2")
    sub.add_parser("quantize", parents=[common],
                   help="operator matrix of the configured symbol")
    sub.add_parser("moyal", parents=[common],
                   help="twisted product of two configured symbols")
    sub.add_parser("modnorm", parents=[common],
                   help="mixed phase-space norm of the configured state")
    info = sub.add_parser("group-info", parents=[common],
                          help="symbolic facts about a registered group")
    info.add_argument("name", nargs="?", help="group name (overrides --group)")
    return parser


def _overrides_from_args(args):
    overrides = []
    for dest, key in _FLAG_KEYS:
        value = getattr(args, dest, None)
        if value is not None:
            overrides.append((key, value))
    only = getattr(args, "only", None)
    if only:
        overrides.append(("only", ",".join(only)))
    name = getattr(args, "name", None)
    if name is not None:
        overrides.append(("group", name))
    return overrides


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = parse_config(
            path=args.config,
            overrides=_overrides_from_args(args),
            potential_path=args.potential,
            build_grid=(args.command != "group-info"),
        )
        return dispatch(args.command, cfg)
    except (ValueError, ClosureError, OSError) as err:
        print("error: %s" % err, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
