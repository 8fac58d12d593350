"""
SPECTRA CLI - Command-line front end for the power-map spectra analyzer

    python spectra_cli.py ds --p 5 --m 2 --s 1
    python spectra_cli.py verify --p 7 --m 2 --s 2 --kind bs
    python spectra_cli.py curve --p 2 --m 2 --n1 5 --n2 5

Exit codes: 0 ok, 1 usage, 2 budget / applicability, 3 verification mismatch.
Reports go to stdout, logging to stderr.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import pandas as pd

import closed_form
import coset_partition
import curve_count
import gf_core
import spectral_engine
from spectral_engine import BOOMERANG, DIFFERENTIAL, PowerMapSpec, Spectrum
from spectra_errors import InvalidParameter, SpectraError
from spectra_settings import OUTPUT_FORMATS, SpectraSettings, load_settings

logger = logging.getLogger("spectra_cli")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MISMATCH = 3

COMMANDS = ("ds", "bs", "ds-closed", "bs-closed", "verify", "curve", "partition", "field-info")


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors raised instead of exiting with status 2"""

    def error(self, message):
        raise InvalidParameter(f"❌ {self.prog}: {message}")


# ============================================================================
# RUN CONFIG
# ============================================================================

@dataclass(frozen=True)
class RunConfig:
    command: str
    p: int
    settings: SpectraSettings
    n: Optional[int] = None
    m: Optional[int] = None
    d: Optional[int] = None
    s: Optional[int] = None
    output_format: str = "json"
    threads: int = 1
    poly: Optional[Sequence[int]] = None
    psi: Optional[int] = None
    kind: str = "both"
    k: int = 1
    n1: Optional[int] = None
    n2: Optional[int] = None
    alpha_ind: int = 0
    beta_ind: int = 0
    with_prediction: Optional[bool] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InvalidParameter(f"❌ Unknown command '{self.command}'")
        if self.n is not None and self.m is not None:
            raise InvalidParameter("❌ Give exactly one of --n and --m")
        if self.d is not None and self.s is not None:
            raise InvalidParameter("❌ Give exactly one of --d and --s")

        needs_family = self.command in ("ds-closed", "bs-closed", "verify", "partition")
        if needs_family and (self.m is None or self.s is None):
            raise InvalidParameter(f"❌ '{self.command}' needs the (--s, --m) form")
        if self.command in ("ds", "bs"):
            if self.d is None and self.s is None:
                raise InvalidParameter("❌ Give one of --d and --s")
            if self.s is not None and self.m is None:
                raise InvalidParameter("❌ --s needs --m")
            if self.n is None and self.m is None:
                raise InvalidParameter("❌ Give one of --n and --m")
        if self.command == "field-info" and self.n is None and self.m is None:
            raise InvalidParameter("❌ Give one of --n and --m")
        if self.command == "curve":
            if self.m is None or self.n1 is None or self.n2 is None:
                raise InvalidParameter("❌ 'curve' needs --m, --n1 and --n2")
            if self.k < 1:
                raise InvalidParameter("❌ --k must be >= 1")
        if self.output_format not in OUTPUT_FORMATS:
            raise InvalidParameter(f"❌ Unknown format '{self.output_format}'")

    @property
    def degree(self) -> int:
        if self.command == "curve":
            return 2 * self.k * self.m
        return self.n if self.n is not None else 2 * self.m


# ============================================================================
# OUTPUT
# ============================================================================

# histograms keyed by value; these keep ascending numeric order
_NUMERIC_KEYED = ("entries", "closed", "bruteforce", "diff")


def _sorted_payload(obj):
    """Sort dict keys recursively, except inside value-keyed histograms"""
    if isinstance(obj, dict):
        return {k: (v if k in _NUMERIC_KEYED else _sorted_payload(v)) for k, v in sorted(obj.items())}
    if isinstance(obj, list):
        return [_sorted_payload(v) for v in obj]
    return obj


def _render(payload: Dict, frame: pd.DataFrame, output_format: str) -> str:
    if output_format == "json":
        return json.dumps(_sorted_payload(payload), ensure_ascii=False)
    if output_format == "csv":
        return frame.to_csv(index=False).rstrip("\n")
    return frame.to_string(index=False)


def _flat_frame(record: Dict) -> pd.DataFrame:
    flat = {k: (json.dumps(v) if isinstance(v, (dict, list)) else v) for k, v in sorted(record.items())}
    return pd.DataFrame([flat])


def _spectrum_output(spectrum: Spectrum, header: Dict, output_format: str) -> str:
    payload = dict(header)
    payload.update(spectrum.to_json_dict())
    return _render(payload, spectrum.to_frame(), output_format)


# ============================================================================
# COMMANDS
# ============================================================================

def _field(cfg: RunConfig) -> gf_core.FieldSpec:
    return gf_core.build_field(cfg.p, cfg.degree, poly_override=cfg.poly, psi_override=cfg.psi,
                               settings=cfg.settings)


def _power_map(cfg: RunConfig, fs: gf_core.FieldSpec) -> PowerMapSpec:
    if cfg.s is not None:
        return PowerMapSpec.from_family(fs, cfg.s, cfg.m)
    return PowerMapSpec(field=fs, d=cfg.d)


def _header(cfg: RunConfig, pm: Optional[PowerMapSpec] = None) -> Dict:
    header = {"p": cfg.p, "n": cfg.degree}
    if pm is not None:
        header["d"] = pm.d
        if pm.s is not None:
            header.update({"s": pm.s, "m": pm.m})
    return header


def _cmd_brute(cfg: RunConfig, kind: str):
    fs = _field(cfg)
    pm = _power_map(cfg, fs)
    if kind == DIFFERENTIAL:
        spectrum = spectral_engine.differential_spectrum(pm, cfg.threads, cfg.settings)
    else:
        spectrum = spectral_engine.boomerang_spectrum(pm, cfg.threads, cfg.settings)
    return EXIT_OK, _spectrum_output(spectrum, _header(cfg, pm), cfg.output_format)


def _cmd_closed(cfg: RunConfig, kind: str):
    cf = closed_form.case_flags(cfg.p, cfg.m, cfg.s)
    if kind == DIFFERENTIAL:
        spectrum = closed_form.closed_form_ds(cf)
    else:
        spectrum = closed_form.closed_form_bs(cf)
    header = {"p": cf.p, "n": cf.n, "m": cf.m, "s": cf.s, "d": cf.d, "t": cf.t}
    return EXIT_OK, _spectrum_output(spectrum, header, cfg.output_format)


def spectrum_diff(closed: Spectrum, brute: Spectrum) -> Dict[str, Dict[str, int]]:
    """Per-value frequency differences (empty when equal)"""
    diff = {}
    for value in sorted(set(closed.entries) | set(brute.entries)):
        a, b = closed.entries.get(value, 0), brute.entries.get(value, 0)
        if a != b:
            diff[str(value)] = {"closed": a, "bruteforce": b}
    return diff


def _cmd_verify(cfg: RunConfig):
    cf = closed_form.case_flags(cfg.p, cfg.m, cfg.s)
    cf.require_applicable()
    fs = _field(cfg)
    pm = PowerMapSpec.from_family(fs, cfg.s, cfg.m)

    kinds = {"ds": [DIFFERENTIAL], "bs": [BOOMERANG], "both": [DIFFERENTIAL, BOOMERANG]}[cfg.kind]
    results = {}
    rows = []
    for kind in kinds:
        if kind == DIFFERENTIAL:
            closed = closed_form.closed_form_ds(cf)
            brute = spectral_engine.differential_spectrum(pm, cfg.threads, cfg.settings)
        else:
            closed = closed_form.closed_form_bs(cf)
            brute = spectral_engine.boomerang_spectrum(pm, cfg.threads, cfg.settings)
        diff = spectrum_diff(closed, brute)
        label = "ds" if kind == DIFFERENTIAL else "bs"
        results[label] = {
            "match": not diff,
            "identities": spectral_engine.verify_identities(brute, fs),
            "closed": closed.to_json_dict()["entries"],
            "bruteforce": brute.to_json_dict()["entries"],
            "diff": diff,
        }
        if diff:
            logger.error("❌ %s mismatch for p=%d, m=%d, s=%d: %s", label, cf.p, cf.m, cf.s, diff)
        else:
            logger.info("✅ %s closed form matches brute force", label)
        rows.append({"kind": label, "match": not diff, "diff": json.dumps(diff)})

    payload = closed_form.describe(cf)
    payload["results"] = results
    ok = all(r["match"] for r in results.values())
    return (EXIT_OK if ok else EXIT_MISMATCH), _render(payload, pd.DataFrame(rows), cfg.output_format)


def _cmd_curve(cfg: RunConfig):
    fs = _field(cfg)
    alpha = gf_core.antilog(fs, cfg.alpha_ind)
    beta = gf_core.antilog(fs, cfg.beta_ind)
    ci = curve_count.make_curve(fs, cfg.m, alpha, beta, cfg.n1, cfg.n2)
    record = curve_count.curve_report(ci, bruteforce=True, settings=cfg.settings)
    record.update({"p": cfg.p, "m": cfg.m, "n": fs.n, "n1": cfg.n1, "n2": cfg.n2,
                   "alpha_ind": cfg.alpha_ind, "beta_ind": cfg.beta_ind})
    status = EXIT_MISMATCH if record["match"] is False else EXIT_OK
    return status, _render(record, _flat_frame(record), cfg.output_format)


def _cmd_partition(cfg: RunConfig):
    fs = _field(cfg)
    frame = coset_partition.delta_zero_coset_table(fs, cfg.m, cfg.s, with_prediction=cfg.with_prediction)
    payload = {"p": cfg.p, "m": cfg.m, "s": cfg.s, "psi": fs.psi, "t": frame.attrs["t"],
               "delta0_total": int(frame["delta0_count"].sum()),
               "cells": frame.to_dict(orient="records")}
    status = EXIT_OK
    if "predicted" in frame and not (frame["predicted"] == frame["delta0_count"]).all():
        status = EXIT_MISMATCH
    return status, _render(payload, frame, cfg.output_format)


def _cmd_field_info(cfg: RunConfig):
    fs = _field(cfg)
    record = fs.to_dict()
    record.update({"order": fs.order, "group_order": fs.group_order})
    if cfg.m is not None:
        record["alpha"] = fs.unit_circle_generator(cfg.m)
    return EXIT_OK, _render(record, _flat_frame(record), cfg.output_format)


def run(cfg: RunConfig):
    """
    Execute one command

    Returns:
        (exit status, report text)
    """
    logger.info("🔍 %s p=%d", cfg.command, cfg.p)
    if cfg.command == "ds":
        return _cmd_brute(cfg, DIFFERENTIAL)
    if cfg.command == "bs":
        return _cmd_brute(cfg, BOOMERANG)
    if cfg.command == "ds-closed":
        return _cmd_closed(cfg, DIFFERENTIAL)
    if cfg.command == "bs-closed":
        return _cmd_closed(cfg, BOOMERANG)
    if cfg.command == "verify":
        return _cmd_verify(cfg)
    if cfg.command == "curve":
        return _cmd_curve(cfg)
    if cfg.command == "partition":
        return _cmd_partition(cfg)
    return _cmd_field_info(cfg)


# ============================================================================
# ARGUMENTS
# ============================================================================

def _int_list(raw: str) -> List[int]:
    try:
        return [int(c) for c in raw.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got '{raw}'") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--p", type=int, required=True, help="Prime characteristic")
    common.add_argument("--format", choices=OUTPUT_FORMATS, default=None, help="Output format (default from config)")
    common.add_argument("--threads", type=int, default=None, help="Worker count")
    common.add_argument("--budget-elements", type=int, default=None, dest="budget_elements",
                        help="Maximum field size p^n")
    common.add_argument("--budget-pairs", type=int, default=None, dest="budget_pairs",
                        help="Maximum pair count p^(2n)")
    common.add_argument("--poly", type=_int_list, default=None,
                        help="Irreducible polynomial override, constant term first (e.g. 2,1,1)")
    common.add_argument("--psi", type=int, default=None, help="Primitive element override (encoding)")
    common.add_argument("--config", default=None, help="INI file instead of the repository config.ini")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")

    parser = _Parser(prog="spectra_cli", description="Differential and boomerang spectra of power maps")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, text in (("ds", "Differential spectrum by enumeration"),
                       ("bs", "Boomerang spectrum by enumeration")):
        cmd = sub.add_parser(name, parents=[common], help=text)
        deg = cmd.add_mutually_exclusive_group(required=True)
        deg.add_argument("--n", type=int, help="Extension degree")
        deg.add_argument("--m", type=int, help="Half degree, n = 2m")
        exp = cmd.add_mutually_exclusive_group(required=True)
        exp.add_argument("--d", type=int, help="Exponent")
        exp.add_argument("--s", type=int, help="Family parameter, d = s(p^m - 1)")

    for name, text in (("ds-closed", "Closed-form differential spectrum"),
                       ("bs-closed", "Closed-form boomerang spectrum"),
                       ("verify", "Closed form against enumeration"),
                       ("partition", "Per-cell solutions of (x+1)^d = x^d")):
        cmd = sub.add_parser(name, parents=[common], help=text)
        cmd.add_argument("--m", type=int, required=True, help="Half degree, n = 2m")
        cmd.add_argument("--s", type=int, required=True, help="Family parameter, d = s(p^m - 1)")
        if name == "verify":
            cmd.add_argument("--kind", choices=("ds", "bs", "both"), default="both")
        if name == "partition":
            cmd.add_argument("--with-prediction", action="store_true", default=None, dest="with_prediction",
                             help="Add the characteristic-2 prediction column")

    cmd = sub.add_parser("curve", parents=[common], help="Points on alpha*x^n1 + beta*y^n2 + 1 = 0")
    cmd.add_argument("--m", type=int, required=True)
    cmd.add_argument("--k", type=int, default=1, help="n = 2km")
    cmd.add_argument("--n1", type=int, required=True)
    cmd.add_argument("--n2", type=int, required=True)
    cmd.add_argument("--alpha-ind", type=int, default=0, dest="alpha_ind", help="alpha = psi^ALPHA_IND")
    cmd.add_argument("--beta-ind", type=int, default=0, dest="beta_ind", help="beta = psi^BETA_IND")

    cmd = sub.add_parser("field-info", parents=[common], help="Constructed field parameters")
    deg = cmd.add_mutually_exclusive_group(required=True)
    deg.add_argument("--n", type=int)
    deg.add_argument("--m", type=int)

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    settings = load_settings(args.config).with_overrides(
        threads=args.threads,
        max_field_elements=args.budget_elements,
        max_pairs=args.budget_pairs,
        output_format=args.format,
    )
    return RunConfig(
        command=args.command,
        p=args.p,
        settings=settings,
        n=getattr(args, "n", None),
        m=getattr(args, "m", None),
        d=getattr(args, "d", None),
        s=getattr(args, "s", None),
        output_format=settings.output_format,
        threads=settings.threads,
        poly=args.poly,
        psi=args.psi,
        kind=getattr(args, "kind", "both"),
        k=getattr(args, "k", 1),
        n1=getattr(args, "n1", None),
        n2=getattr(args, "n2", None),
        alpha_ind=getattr(args, "alpha_ind", 0),
        beta_ind=getattr(args, "beta_ind", 0),
        with_prediction=getattr(args, "with_prediction", None),
    )


def _setup_logging(verbosity: int):
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(message)s", force=True)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SpectraError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:  # --help
        return int(e.code or 0)

    _setup_logging(args.verbose)
    try:
        cfg = config_from_args(args)
        status, report = run(cfg)
    except SpectraError as e:
        print(str(e), file=sys.stderr)
        return e.exit_code

    print(report)
    return status


if __name__ == "__main__":
    sys.exit(main())
