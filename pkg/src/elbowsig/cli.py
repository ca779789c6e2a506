"""ElbowSig command line: analyze, baselines, simulate, scaling, sample-size and theory subcommands

Exit codes: 0 success, 2 invalid flags or design, 3 unreadable data or unwritable output, 4 numerical failure
(or more than 1% failed replicates).
"""

import sys
import logging
import argparse
from pathlib import Path
from typing import List, Optional

from elbowsig.core.baselines import gap_statistic, select_indices
from elbowsig.core.clustering import ClusteringMethod, MethodConfig
from elbowsig.core.data_model import Dataset, RngSpec, load_csv, sniff_header, standardize
from elbowsig.core.inference import (
    DEFAULT_F_SEL,
    DEFAULT_K_MAX,
    DEFAULT_N_REF,
    DEFAULT_Q1,
    DEFAULT_Q2,
    DEFAULT_S_SIG,
    analyze,
    validate_levels,
)
from elbowsig.core.reference_gen import ReferenceType
from elbowsig.core.simstudy import (
    ExperimentDesign,
    SampleSizeDesign,
    ScalingDesign,
    run_sample_size_experiment,
    run_scaling_experiment,
    run_table_experiment,
    write_scaling,
)
from elbowsig.core.theory import prediction_table
from elbowsig.utils.design_utils import build_design, load_design
from elbowsig.utils.error_utils import ConfigError, DataError, ElbowSigError, NumericalError, translated
from elbowsig.utils.json_utils import dumps
from elbowsig.utils.logger import exception_log_forward

log = logging.getLogger("elbowsig")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4

SAMPLE_PREFIX = "sample:"

# Library errors escaping a subcommand; OSError first since it is not a ValueError
LIBRARY_ERRORS = {OSError: DataError, ValueError: NumericalError, ArithmeticError: NumericalError}
OUTPUT_ERRORS = {OSError: DataError}


class CliArgumentParser(argparse.ArgumentParser):
    """Flag errors raise ConfigError instead of exiting, so main() maps every failure to one exit code"""

    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _add_common_flags(sub: argparse.ArgumentParser):
    sub.add_argument("--seed", type=int, default=None, help="Master seed (determines every output byte)")
    sub.add_argument("--threads", type=int, default=None, help="Worker threads (default: ELBOWSIG_THREADS or cores)")
    sub.add_argument("--out", type=Path, default=None, help="Output file (analyze/baselines) or directory")


def _add_data_flags(sub: argparse.ArgumentParser):
    sub.add_argument("--data", required=True, help="CSV file, or sample:iris for the bundled Iris data")
    sub.add_argument("--header", choices=["auto", "yes", "no"], default="auto", help="CSV header row")
    sub.add_argument("--standardize", action="store_true", help="z-score the features first")
    sub.add_argument("--method", choices=[m.value for m in ClusteringMethod], default="kmeans")
    sub.add_argument("--fuzzifier", type=float, default=2.0, help="FCM fuzzifier m (> 1)")
    sub.add_argument("--n-init", type=int, default=1, help="Random starts for k-means / FCM")
    sub.add_argument("--reference", choices=[r.value for r in ReferenceType], default="pca")
    sub.add_argument("--k-max", type=int, default=DEFAULT_K_MAX)
    sub.add_argument("--n-ref", type=int, default=DEFAULT_N_REF)


def build_parser() -> argparse.ArgumentParser:
    parser = CliArgumentParser(prog="elbowsig", description="ElbowSig: significance of the number of clusters")
    subparsers = parser.add_subparsers(dest="subcommand", required=True, parser_class=CliArgumentParser)

    sub = subparsers.add_parser("analyze", help="Per-k and FDR significance of the elbow statistic")
    _add_data_flags(sub)
    sub.add_argument("--q1", type=float, default=DEFAULT_Q1, help="Per-scale level")
    sub.add_argument("--q2", type=float, default=DEFAULT_Q2, help="FDR level")
    sub.add_argument("--s-sig", type=int, default=DEFAULT_S_SIG, help="Calibration repetitions")
    sub.add_argument("--f-sel", type=float, default=DEFAULT_F_SEL, help="Calibration subsample fraction")
    sub.add_argument("--format", choices=["json", "csv"], default="json", help="Format of --out")
    _add_common_flags(sub)
    sub.set_defaults(handler=cmd_analyze)

    sub = subparsers.add_parser("baselines", help="Gap statistic, Calinski-Harabasz, Davies-Bouldin, silhouette")
    _add_data_flags(sub)
    _add_common_flags(sub)
    sub.set_defaults(handler=cmd_baselines)

    sub = subparsers.add_parser("simulate", help="Run a table experiment from a design file")
    sub.add_argument("--config", type=Path, required=True, help="Flat TOML design file")
    sub.add_argument("--replicates", type=int, default=None, help="Override the design's replicate count")
    sub.add_argument("--dry-run", action="store_true", help="Validate the design and print the plan")
    _add_common_flags(sub)
    sub.set_defaults(handler=cmd_simulate)

    sub = subparsers.add_parser("scaling", help="Mean and variance of the null elbow statistic across D")
    sub.add_argument("--config", type=Path, default=None, help="Flat TOML scaling design file")
    sub.add_argument("--n", type=int, default=None)
    sub.add_argument("--k-probe", type=int, default=None)
    sub.add_argument("--methods", nargs="+", default=None)
    sub.add_argument("--dims", nargs="+", type=int, default=None)
    sub.add_argument("--n-ref", type=int, default=None)
    sub.add_argument("--fuzzifier", type=float, default=None)
    _add_common_flags(sub)
    sub.set_defaults(handler=cmd_scaling)

    sub = subparsers.add_parser("sample-size", help="Mean and variance of the null elbow statistic across N")
    sub.add_argument("--config", type=Path, default=None, help="Flat TOML sample-size design file")
    sub.add_argument("--d", type=int, default=None)
    sub.add_argument("--ns", nargs="+", type=int, default=None)
    sub.add_argument("--k-max", type=int, default=None)
    sub.add_argument("--methods", nargs="+", default=None)
    sub.add_argument("--n-ref", type=int, default=None)
    sub.add_argument("--n-init", type=int, default=None)
    sub.add_argument("--fuzzifier", type=float, default=None)
    _add_common_flags(sub)
    sub.set_defaults(handler=cmd_sample_size)

    sub = subparsers.add_parser("theory", help="Print closed-form null predictions as CSV")
    sub.add_argument("--dims", nargs="+", type=int, default=[2, 5, 20, 100])
    sub.add_argument("--k-values", nargs="+", type=int, default=list(range(2, 11)))
    sub.add_argument("--fuzzifier", type=float, default=2.0)
    sub.set_defaults(handler=cmd_theory)
    return parser


def read_data(source: str, header: str = "auto", standardize_features: bool = False) -> Dataset:
    """Dataset from a CSV path or a sample:<name> reference"""
    if source.startswith(SAMPLE_PREFIX):
        from elbowsig.api.sample_data import SampleData

        name = source[len(SAMPLE_PREFIX) :]
        data = SampleData().get(name)
        if data is None:
            raise DataError(f"unknown sample dataset {name!r}")
    else:
        has_header = sniff_header(source) if header == "auto" else header == "yes"
        data = load_csv(source, has_header=has_header)
    return standardize(data) if standardize_features else data


def _method_config(args) -> MethodConfig:
    return MethodConfig(method=args.method, fuzzifier=args.fuzzifier, n_init=args.n_init, rng=RngSpec(args.seed or 0))


def _write(text: str, out: Optional[Path]):
    with translated("write", OUTPUT_ERRORS, out=out):
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
    log.info(f"Wrote {out}")


def cmd_analyze(args) -> int:
    validate_levels(args.k_max, args.n_ref, args.q1, args.q2, args.s_sig, args.f_sel)
    config = _method_config(args)
    data = read_data(args.data, args.header, args.standardize)
    report = analyze(
        data,
        config,
        k_max=args.k_max,
        n_ref=args.n_ref,
        reference_type=args.reference,
        q1=args.q1,
        q2=args.q2,
        rng=config.rng,
        s_sig=args.s_sig,
        f_sel=args.f_sel,
        threads=args.threads,
    )
    print(report.summary_text())
    if args.out:
        if args.format == "csv":
            with translated("write", OUTPUT_ERRORS, out=args.out):
                args.out.parent.mkdir(parents=True, exist_ok=True)
                report.to_tidy_frame().to_csv(args.out, index=False, float_format="%.17g")
        else:
            _write(report.to_json(), args.out)
    return EXIT_OK


def cmd_baselines(args) -> int:
    if args.k_max < 2:
        raise ConfigError(f"k_max must be >= 2, got {args.k_max}")
    config = _method_config(args)
    data = read_data(args.data, args.header, args.standardize)
    gap = gap_statistic(data, config, args.k_max, args.n_ref, args.reference, config.rng, args.threads)
    curves = select_indices(data, config.with_rng(config.rng.derive(0)), args.k_max)
    output = {"gap": gap.to_dict(), **{index.value: curve.to_dict() for index, curve in curves.items()}}
    print(f"Gap(I): k = {gap.k_hat_I}{' (fallback)' if gap.fallback_I else ''}")
    print(f"Gap(II): k = {gap.k_hat_II}")
    for index, curve in curves.items():
        print(f"{index.value}: k = {curve.k_hat}")
    if args.out:
        _write(dumps(output), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    design = load_design(ExperimentDesign, args.config, seed=args.seed, replicates=args.replicates)
    if args.dry_run:
        print(dumps(design.plan()))
        return EXIT_OK
    result = run_table_experiment(design, threads=args.threads)
    print(result.wide_frame().to_string(index=False))
    if args.out:
        with translated("write", OUTPUT_ERRORS, out=args.out):
            result.write(args.out)
    if result.too_many_failures:
        log.error(f"{len(result.failures)} replicates failed ({result.failed_fraction:.1%} > 1%)")
        return EXIT_NUMERICAL
    return EXIT_OK


def _design_from(args, design_cls, overrides: dict):
    """Design from --config (flags override its keys) or from the flags alone"""
    if args.config:
        return load_design(design_cls, args.config, **overrides)
    return build_design(design_cls, {k: v for k, v in overrides.items() if v is not None}, "flags")


def cmd_scaling(args) -> int:
    overrides = {
        "n": args.n,
        "k_probe": args.k_probe,
        "methods": args.methods,
        "dims": args.dims,
        "n_ref": args.n_ref,
        "fuzzifier": args.fuzzifier,
        "seed": args.seed,
    }
    result = run_scaling_experiment(_design_from(args, ScalingDesign, overrides), threads=args.threads)
    print(result.frame.to_csv(index=False), end="")
    for method, slope in result.slopes.items():
        print(f"# {method}: log-log slope of var(delta) vs D = {slope:.4f}")
    if args.out:
        with translated("write", OUTPUT_ERRORS, out=args.out):
            write_scaling(result, args.out)
    return EXIT_OK


def cmd_sample_size(args) -> int:
    overrides = {
        "d": args.d,
        "ns": args.ns,
        "k_max": args.k_max,
        "methods": args.methods,
        "n_ref": args.n_ref,
        "n_init": args.n_init,
        "fuzzifier": args.fuzzifier,
        "seed": args.seed,
    }
    result = run_sample_size_experiment(_design_from(args, SampleSizeDesign, overrides), threads=args.threads)
    print(result.frame.to_csv(index=False), end="")
    for row in result.slopes.itertuples(index=False):
        print(
            f"# {row.method} k={row.k}: log-log slope vs N of var(delta) = {row.var_delta_slope:.4f}, "
            f"of var(H) = {row.var_H_slope:.4f}"
        )
    if args.out:
        with translated("write", OUTPUT_ERRORS, out=args.out):
            write_scaling(result, args.out)
    return EXIT_OK


def cmd_theory(args) -> int:
    print(prediction_table(args.dims, args.k_values, args.fuzzifier).to_csv(index=False), end="")
    return EXIT_OK


EXIT_CODES = {ConfigError: EXIT_CONFIG, DataError: EXIT_DATA, NumericalError: EXIT_NUMERICAL}


def exit_code_for(error: ElbowSigError) -> int:
    for error_type, code in EXIT_CODES.items():
        if isinstance(error, error_type):
            return code
    return EXIT_NUMERICAL


def main(argv: Optional[List[str]] = None) -> int:
    """Console entry point: returns the exit code"""
    try:
        args = build_parser().parse_args(argv)
        with exception_log_forward(quiet_for=(ElbowSigError,)):
            with translated(args.subcommand, LIBRARY_ERRORS):
                return args.handler(args)
    except ElbowSigError as e:
        log.error(f"{type(e).__name__}: {e}")
        return exit_code_for(e)


if __name__ == "__main__":
    sys.exit(main())
