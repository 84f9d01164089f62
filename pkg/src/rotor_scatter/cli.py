"""Command-line front end.

Subcommands: profile, sweep, compare, validate, bessel-table. Every run
writes into a directory named from the hash of its manifest, so repeating
a run reproduces the same files byte for byte.

Exit codes: 0 success, 1 configuration or usage error, 2 numerical or
validation failure.
"""

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import output, specfun
from .analysis import AnalysisError, fringe_window, suppression_ratio, visibility
from .born import (
    UnsupportedVariantError,
    profile_closed,
    profile_general,
    profile_structureless,
    structureless_counterpart,
)
from .model import (
    GAUSSIAN,
    POLYNOMIAL_GAUSSIAN,
    Config,
    ConfigError,
    CrossSectionProfile,
    IncidentBeam,
    serialize_config,
    validate_config,
)
from .oracle import OracleConvergenceError
from .validate import run_checks

_FORMATS = ("csv", "json", "svg")

_INTERNAL_TO_STRUCTURELESS = {
    "general": None,  # handled by structureless_counterpart
    "closed_two_gaussian": "closed_structureless_two_gaussian",
    "closed_grating": "closed_structureless_grating",
    "closed_mixed": "closed_structureless_mixed",
}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    # argparse defaults to exit status 2 for usage problems; bad flags are
    # configuration errors here and must exit 1
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliError(f"{self.prog}: {message}", 1)


def build_parser() -> _Parser:
    parser = _Parser(prog="rotor-scatter",
                     description="Born-approximation scattering of a rigid "
                                 "planar rotor off multi-peak potentials")
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser)

    def common(p, config_required=True):
        if config_required:
            p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", required=True, help="output directory root")
        p.add_argument("--format", default="csv,json",
                       help="comma-separated subset of csv,json,svg")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads for sweep columns")

    common(sub.add_parser("profile", help="single-k cross-section profile"))
    common(sub.add_parser("sweep", help="sigma(theta, k) matrix over scan.k"))
    common(sub.add_parser("compare",
                          help="internal-structure profile vs point-particle twin"))

    pv = sub.add_parser("validate", help="run the numerical self-checks")
    pv.add_argument("--out", required=True)
    pv.add_argument("--format", default="json")
    pv.add_argument("--only", default=None,
                    help="run only checks whose name starts with this prefix")

    pb = sub.add_parser("bessel-table", help="dump J_n(x) for n = 0..n-max")
    pb.add_argument("--n-max", type=int, required=True)
    pb.add_argument("--x", type=float, required=True)
    pb.add_argument("--out", required=True)
    pb.add_argument("--format", default="csv")
    return parser


def _parse_formats(raw: str) -> Tuple[str, ...]:
    parts = tuple(p for p in raw.split(",") if p)
    for p in parts:
        if p not in _FORMATS:
            raise CliError(f"unknown format {p!r}, expected subset of "
                           f"{','.join(_FORMATS)}", 1)
    if not parts:
        raise CliError("at least one output format is required", 1)
    return tuple(sorted(set(parts)))


def _load_config(path: str) -> Config:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}", 1)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"config {path} is not valid JSON: {exc}", 1)
    return validate_config(doc)


def _beam_for_k(cfg: Config, k: float) -> IncidentBeam:
    return IncidentBeam(wavenumber=k,
                        amplitudes={l: a for l, a in cfg.beam.sorted_states()})


def _closed_params(cfg: Config) -> Dict[str, float]:
    """Map the configured potential onto a closed-form parameter bag."""
    variant = cfg.engine_variant
    states = [l for l, _ in cfg.beam.sorted_states()]
    if states != [0]:
        raise CliError("closed engines require a pure l = 0 beam", 1)
    peaks = cfg.potential.peaks
    if variant.endswith("grating"):
        if cfg.grating is None:
            raise CliError("closed grating engines need potential.kind "
                           "= 'grating'", 1)
        shape = peaks[0].shape
        if shape.variant != GAUSSIAN:
            raise CliError("closed grating engines support Gaussian peaks "
                           "only", 1)
        half_count, spacing = cfg.grating
        return {"v0": shape.strength, "delta": shape.width,
                "d": spacing, "half_count": half_count}
    if len(peaks) != 2 or peaks[0].center_x != -peaks[1].center_x \
            or peaks[0].center_x <= 0:
        raise CliError("closed two-peak engines need exactly two peaks at "
                       "+d and -d with d > 0", 1)
    a, b = peaks[0].shape, peaks[1].shape
    if a.strength != b.strength or a.width != b.width:
        raise CliError("closed two-peak engines need equal strength and "
                       "width on both peaks", 1)
    if variant.endswith("mixed"):
        want = (POLYNOMIAL_GAUSSIAN, GAUSSIAN)
    else:
        want = (GAUSSIAN, GAUSSIAN)
    if (a.variant, b.variant) != want:
        raise CliError(f"engine {variant} needs peak shapes "
                       f"{want[0]} at +d and {want[1]} at -d", 1)
    return {"v0": a.strength, "delta": a.width, "d": peaks[0].center_x}


def _profile_for_k(cfg: Config, thetas: np.ndarray, k: float) -> CrossSectionProfile:
    variant = cfg.engine_variant
    if variant == "general":
        return profile_general(thetas, cfg.molecule, _beam_for_k(cfg, k),
                               cfg.potential)
    if variant == "structureless":
        return profile_structureless(thetas, cfg.molecule.atom_mass, k,
                                     cfg.potential)
    params = _closed_params(cfg)
    kwargs = dict(params)
    if variant in ("closed_two_gaussian", "closed_grating", "closed_mixed"):
        kwargs["alpha"] = cfg.molecule.half_separation
    return profile_closed(variant, thetas, mass=cfg.molecule.atom_mass,
                          k=k, **kwargs)


def _counterpart_for_k(cfg: Config, thetas: np.ndarray, k: float) -> CrossSectionProfile:
    variant = cfg.engine_variant
    if variant == "general":
        mass2, spec2 = structureless_counterpart(cfg.molecule, cfg.potential)
        return profile_structureless(thetas, mass2, k, spec2)
    return profile_closed(_INTERNAL_TO_STRUCTURELESS[variant], thetas,
                          mass=cfg.molecule.atom_mass, k=k,
                          **_closed_params(cfg))


def _scan_or_fail(cfg: Config):
    if cfg.scan is None:
        raise CliError("config needs a scan block with a theta grid", 1)
    return cfg.scan


def _run_dir(out_root: str, subcommand: str, manifest: dict) -> Path:
    run_dir = Path(out_root) / f"{subcommand}_{output.manifest_hash(manifest)}"
    output.write_text(run_dir / "manifest.json",
                      output.emit_json(manifest) + "\n")
    return run_dir


def _columns_parallel(tasks, threads: int) -> List:
    if threads <= 1 or len(tasks) <= 1:
        return [t() for t in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(t) for t in tasks]
        return [f.result() for f in futures]


def _profile_json_doc(p: CrossSectionProfile) -> dict:
    doc = {
        "theta": p.thetas.tolist(),
        "sigma": p.sigma.tolist(),
        "metadata": dict(p.metadata),
    }
    if p.per_channel:
        doc["channels"] = {f"sigma_{li}_{lo}": arr.tolist()
                           for (li, lo), arr in sorted(p.per_channel.items())}
    return doc


def cmd_profile(args) -> int:
    cfg = _load_config(args.config)
    formats = _parse_formats(args.format)
    scan = _scan_or_fail(cfg)
    profile = _profile_for_k(cfg, scan.thetas(), cfg.beam.wavenumber)
    manifest = {"subcommand": "profile", "config": serialize_config(cfg),
                "formats": list(formats)}
    run_dir = _run_dir(args.out, "profile", manifest)
    if "csv" in formats:
        output.write_text(run_dir / "profile.csv", output.profile_csv(profile))
    if "json" in formats:
        output.write_text(run_dir / "profile.json",
                          output.emit_json(_profile_json_doc(profile)) + "\n")
    if "svg" in formats:
        title = f"{cfg.engine_variant}, k={output.fmt_real(cfg.beam.wavenumber)[:8]}"
        output.write_text(run_dir / "profile.svg",
                          output.profile_svg([(cfg.engine_variant, profile)], title))
    print(run_dir)
    return 0


def cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    formats = _parse_formats(args.format)
    scan = _scan_or_fail(cfg)
    if not scan.k_values:
        raise CliError("sweep needs a non-empty scan.k list", 1)
    thetas = scan.thetas()
    tasks = [lambda k=k: _profile_for_k(cfg, thetas, k).sigma
             for k in scan.k_values]
    columns = _columns_parallel(tasks, args.threads)
    manifest = {"subcommand": "sweep", "config": serialize_config(cfg),
                "formats": list(formats)}
    run_dir = _run_dir(args.out, "sweep", manifest)
    if "csv" in formats:
        output.write_text(run_dir / "sweep.csv",
                          output.sweep_csv(thetas, scan.k_values, columns))
    if "json" in formats:
        doc = {"theta": thetas.tolist(), "k": list(scan.k_values),
               "sigma_columns": [c.tolist() for c in columns],
               "engine": cfg.engine_variant}
        output.write_text(run_dir / "sweep.json", output.emit_json(doc) + "\n")
    if "svg" in formats:
        output.write_text(run_dir / "sweep.svg",
                          output.sweep_svg(thetas, scan.k_values, columns,
                                           f"sweep: {cfg.engine_variant}"))
    print(run_dir)
    return 0


def cmd_compare(args) -> int:
    cfg = _load_config(args.config)
    formats = _parse_formats(args.format)
    scan = _scan_or_fail(cfg)
    if cfg.engine_variant not in _INTERNAL_TO_STRUCTURELESS:
        raise CliError("compare needs an internal-structure engine "
                       "(general or a closed internal variant)", 1)
    k_values = scan.k_values or (cfg.beam.wavenumber,)
    thetas = scan.thetas()
    tasks = [lambda k=k: _profile_for_k(cfg, thetas, k) for k in k_values]
    tasks += [lambda k=k: _counterpart_for_k(cfg, thetas, k) for k in k_values]
    profiles = _columns_parallel(tasks, args.threads)
    with_profiles = profiles[:len(k_values)]
    without_profiles = profiles[len(k_values):]

    reports = []
    for k, pw, po in zip(k_values, with_profiles, without_profiles):
        # the comparison window is where the point-particle twin interferes
        window = fringe_window(po)
        reports.append({
            "k": k,
            "window": [window[0], window[1]],
            "visibility_with": visibility(pw, window),
            "visibility_without": visibility(po, window),
            "suppression_ratio": suppression_ratio(pw, po, window),
        })

    manifest = {"subcommand": "compare", "config": serialize_config(cfg),
                "formats": list(formats)}
    run_dir = _run_dir(args.out, "compare", manifest)
    if "csv" in formats:
        output.write_text(run_dir / "compare_with.csv",
                          output.sweep_csv(thetas, k_values,
                                           [p.sigma for p in with_profiles]))
        output.write_text(run_dir / "compare_without.csv",
                          output.sweep_csv(thetas, k_values,
                                           [p.sigma for p in without_profiles]))
    if "json" in formats:
        doc = {"theta": thetas.tolist(), "k": list(k_values),
               "with": [p.sigma.tolist() for p in with_profiles],
               "without": [p.sigma.tolist() for p in without_profiles],
               "engine": cfg.engine_variant,
               "reports": reports}
        output.write_text(run_dir / "compare.json", output.emit_json(doc) + "\n")
    if "svg" in formats:
        for i, (k, pw, po) in enumerate(zip(k_values, with_profiles,
                                            without_profiles)):
            title = f"k={output.fmt_real(k)[:8]}"
            output.write_text(run_dir / f"compare_{i}.svg",
                              output.profile_svg([("internal", pw),
                                                  ("structureless", po)], title))
    print(run_dir)
    return 0


def cmd_validate(args) -> int:
    formats = _parse_formats(args.format)
    try:
        results = run_checks(only=args.only)
    except ValueError as exc:
        raise CliError(str(exc), 1)
    manifest = {"subcommand": "validate", "only": args.only,
                "formats": list(formats)}
    run_dir = _run_dir(args.out, "validate", manifest)
    doc = {"checks": [r.as_dict() for r in results],
           "all_passed": all(r.passed for r in results)}
    if "json" in formats:
        output.write_text(run_dir / "validate.json", output.emit_json(doc) + "\n")
    if "csv" in formats:
        lines = ["name,worst,tol,passed"]
        lines += [f"{r.name},{output.fmt_real(r.worst)},"
                  f"{output.fmt_real(r.tol)},{str(r.passed).lower()}"
                  for r in results]
        output.write_text(run_dir / "validate.csv", "\n".join(lines) + "\n")
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name}: worst {r.worst:.3e} vs tol {r.tol:.1e}")
    print(run_dir)
    return 0 if doc["all_passed"] else 2


def cmd_bessel_table(args) -> int:
    formats = _parse_formats(args.format)
    if args.n_max < 0 or args.n_max > specfun.ORDER_CAP:
        raise CliError(f"--n-max must be in [0, {specfun.ORDER_CAP}]", 1)
    if not math.isfinite(args.x) or args.x < 0:
        raise CliError("--x must be finite and >= 0", 1)
    values = specfun.bessel_j_batch(specfun.BesselOrderRange(args.n_max), args.x)
    manifest = {"subcommand": "bessel-table", "n_max": args.n_max,
                "x": args.x, "formats": list(formats)}
    run_dir = _run_dir(args.out, "bessel-table", manifest)
    if "csv" in formats:
        lines = ["n,J_n"]
        lines += [f"{n},{output.fmt_real(v)}" for n, v in enumerate(values)]
        output.write_text(run_dir / "bessel_table.csv", "\n".join(lines) + "\n")
    if "json" in formats:
        doc = {"x": args.x, "values": list(values)}
        output.write_text(run_dir / "bessel_table.json",
                          output.emit_json(doc) + "\n")
    print(run_dir)
    return 0


_DISPATCH = {
    "profile": cmd_profile,
    "sweep": cmd_sweep,
    "compare": cmd_compare,
    "validate": cmd_validate,
    "bessel-table": cmd_bessel_table,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.subcommand is None:
            parser.print_usage(sys.stderr)
            return 1
        return _DISPATCH[args.subcommand](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ConfigError as exc:
        for path, message in exc.errors:
            print(f"config error: {path}: {message}", file=sys.stderr)
        return 1
    except (OracleConvergenceError, AnalysisError, UnsupportedVariantError,
            ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
