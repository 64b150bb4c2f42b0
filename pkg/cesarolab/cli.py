#!/usr/bin/env python3
import argparse
import io
import logging
import os
import pprint
import sys
from datetime import datetime, timezone
from typing import Optional, Sequence, TextIO

import yaml  # type: ignore

from cesarolab.config import RunConfig
from cesarolab.harness import EXPERIMENTS, ExperimentReport, run_experiment
from cesarolab.io import (
    OutputFormat,
    dumps_json,
    encode_complex,
    function_summary,
    is_function_spec,
    load_function_spec,
    write_rows_csv,
)
from cesarolab.norms import NORMS, SamplerConfig
from cesarolab.operators import OperatorKind, OperatorSpec, raise_caps
from cesarolab.presets import DEFAULT_CAP, Expectation, resolve_preset
from cesarolab.series import Evaluable, TruncatedSeries

log_level = getattr(logging, os.getenv("LOG_LEVEL", "INFO").upper(), logging.INFO)
logging.basicConfig(level=log_level)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED_VERDICT = 1
EXIT_ERROR = 2

FUNCTION_HELP = """Functions are inline JSON, a path to a JSON file, or a preset name.
  series:     {"kind":"series","dim":1,"cap":2,"terms":[[[2],1,0]]}
  composites: {"kind":"h_a"|"f_a"|"f_k"|"log_kernel","a":[[0.9,0]]}
  presets:    one, zero, zj, zj(2), log-kernel, log-kernel(0.5), random-poly(7,4)
The apply command works on Taylor coefficients and needs series operands;
composites are handled by the norm and experiment commands.
"""

EXPERIMENT_HELP = """CSV columns per experiment:
  theorem1:  part, index, zygmund_f, zygmund_image, ratio
  theorem2:  radius, zygmund_h, zygmund_f, zygmund_ig_h, zygmund_ig_f, ratio_h, ratio_f,
             g_at_a, lower_bound, certificate, log_bloch_term
  theorem3:  radius, zygmund_ig_fk, lower_bound, g_at_zk, compact_sup_fk
  corollary: index, zygmund_f, zygmund_mg_f, ratio, residual
  probes:    probe, value and probe-specific columns
"""


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def resolve_function(text: str, dim: int, cap: int = DEFAULT_CAP) -> tuple[Evaluable, Optional[Expectation]]:
    """A JSON spec (inline or file) or a preset; presets also carry their expected membership."""
    if is_function_spec(text):
        return load_function_spec(text), None
    return resolve_preset(text, dim, cap)


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, help="YAML run config; flags override its values")
    common.add_argument("--seed", type=int, help="Seed of the sampler and of random families (default 0)")
    common.add_argument("--out", type=str, help="Write output to this file instead of stdout")
    common.add_argument("--format", choices=[f.value for f in OutputFormat], help="Output format (default json)")
    common.add_argument("--dim", type=int, help="Dimension n used by presets (default 1)")
    common.add_argument("--nodes", type=int, help="Gauss-Legendre nodes for t-integrals (default 64)")
    common.add_argument(
        "--samples-per-radius", type=int, help="Directions per ladder radius (default 512 for n=1, 256 else)"
    )
    common.add_argument("--ladder-depth", type=int, help="Radius ladder depth J, r_j = 1 - 2^-j (default 14)")
    common.add_argument("--refine-iters", type=int, help="Golden-section refinement iterations (default 40)")
    common.add_argument("--stamp", action="store_true", default=None, help="Record a UTC timestamp in the output")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="cesaro-lab",
        description="""Numerical toolkit for the extended Cesàro operator T_g, its companion I_g and
the multiplication operator M_g on the unit ball of C^n, with H∞, Bloch, log-Bloch and
Zygmund norm estimators.

Examples:
    cesaro-lab norm --space zygmund --fn '{"kind":"series","dim":1,"cap":2,"terms":[[[2],1,0]]}'
    cesaro-lab apply tg --g '{"kind":"series","dim":1,"cap":1,"terms":[[[1],1,0]]}' --f '...'
    cesaro-lab experiment theorem3 --g one --radii 0.9,0.99,0.999
    cesaro-lab experiment probes --format csv --out probes.csv
""",
        epilog=FUNCTION_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    norm = sub.add_parser("norm", parents=[common], help="Estimate a norm of a function", epilog=FUNCTION_HELP,
                          formatter_class=argparse.RawDescriptionHelpFormatter)
    norm.add_argument("--space", choices=sorted(NORMS), required=True, help="Norm to estimate")
    norm.add_argument("--fn", type=str, required=True, help="Function spec")

    apply = sub.add_parser("apply", parents=[common], help="Apply an operator in coefficient space",
                           epilog=FUNCTION_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    apply.add_argument("op", choices=[k.value for k in OperatorKind], help="Operator")
    apply.add_argument("--g", type=str, help="Symbol spec (not used by cesaro)")
    apply.add_argument("--f", type=str, required=True, help="Operand spec")

    experiment = sub.add_parser("experiment", parents=[common], help="Run an experiment and check its verdicts",
                                epilog=FUNCTION_HELP + "\n" + EXPERIMENT_HELP,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    experiment.add_argument("name", choices=EXPERIMENTS, help="Experiment")
    experiment.add_argument("--g", type=str, help="Symbol spec or preset (not used by probes)")
    experiment.add_argument("--radii", type=_float_list, help="Anchor radii, e.g. 0.9,0.99,0.999")
    experiment.add_argument("--k-values", type=_int_list, help="Exponents k of z^k/k")
    experiment.add_argument("--expect", choices=[e.value for e in Expectation],
                            help="Expected membership of g; presets set it automatically")
    experiment.add_argument("--literal-prefactor", action="store_true", default=None,
                            help="theorem3: evaluate the f_k prefactor as log(2/(1−|z_k|))⁻²")
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    rc = RunConfig.from_file(args.config) if args.config else RunConfig()
    return rc.with_overrides(
        seed=args.seed,
        dim=args.dim,
        nodes=args.nodes,
        format=args.format,
        out=args.out,
        stamp=args.stamp,
        radii=getattr(args, "radii", None),
        k_values=getattr(args, "k_values", None),
        expect=getattr(args, "expect", None),
        literal_prefactor=getattr(args, "literal_prefactor", None),
        sampler={
            "samples_per_radius": args.samples_per_radius,
            "ladder_depth": args.ladder_depth,
            "refine_iters": args.refine_iters,
        },
    )


def sampler_config(rc: RunConfig) -> SamplerConfig:
    """The run's sampler; its seed defaults to the run seed."""
    return SamplerConfig.from_yaml({"seed": rc.seed, **rc.sampler})


def _metadata(rc: RunConfig) -> dict:
    meta: dict = {"seed": rc.seed}
    if rc.stamp:
        meta["timestamp"] = datetime.now(timezone.utc).isoformat()
    return meta


def _emit(text: str, rc: RunConfig, out: TextIO):
    if rc.out:
        with open(rc.out, "w", newline="") as f:
            f.write(text)
        logger.info(f"Wrote {rc.out}")
    else:
        out.write(text)


def _table(rows: list, rc: RunConfig, envelope: dict) -> str:
    if rc.format == OutputFormat.CSV.value:
        buf = io.StringIO()
        write_rows_csv(rows, buf)
        return buf.getvalue()
    return dumps_json({**envelope, "rows": rows})


def cmd_norm(args: argparse.Namespace, rc: RunConfig, out: TextIO) -> int:
    F, _ = resolve_function(args.fn, rc.dim)
    estimate = NORMS[args.space](F, sampler_config(rc))
    envelope = {
        "command": "norm",
        "space": args.space,
        "fn": function_summary(F),
        "config": rc.to_dict(),
        "metadata": _metadata(rc),
    }
    _emit(_table([estimate.to_dict()], rc, envelope), rc, out)
    return EXIT_OK


def cmd_apply(args: argparse.Namespace, rc: RunConfig, out: TextIO) -> int:
    f, _ = resolve_function(args.f, rc.dim)
    kind = OperatorKind(args.op)
    if not isinstance(f, TruncatedSeries):
        raise TypeError(f"apply needs a series operand f, got {type(f).__name__}")
    if kind == OperatorKind.CESARO:
        coefficients = OperatorSpec(kind).apply(f)
        _emit(dumps_json([encode_complex(c) for c in coefficients]), rc, out)  # type: ignore[union-attr]
        return EXIT_OK
    if not args.g:
        raise ValueError(f"Operator {kind.value} needs --g")
    g, _ = resolve_function(args.g, f.dim)
    if not isinstance(g, TruncatedSeries):
        raise TypeError(f"apply needs a series symbol g, got {type(g).__name__}")
    g, f = raise_caps(g, f)
    image = OperatorSpec(kind, g).apply(f)
    _emit(dumps_json(image.to_dict()), rc, out)  # type: ignore[union-attr]
    return EXIT_OK


def cmd_experiment(args: argparse.Namespace, rc: RunConfig, out: TextIO) -> int:
    g, expectation = (None, None)
    if args.name != "probes":
        if not args.g:
            raise ValueError(f"Experiment {args.name} needs --g")
        g, expectation = resolve_function(args.g, rc.dim)
    if rc.expect:
        expectation = Expectation(rc.expect)
    report: ExperimentReport = run_experiment(
        args.name,
        g=g,
        cfg=sampler_config(rc),
        dim=g.dim if g is not None else rc.dim,
        seed=rc.seed,
        nodes=rc.nodes,
        radii=rc.radii,
        k_values=rc.k_values,
        expectation=expectation,
        literal_prefactor=rc.literal_prefactor,
    )
    report.config["run"] = rc.to_dict()
    report.metadata.update(_metadata(rc))
    text = report.to_csv() if rc.format == OutputFormat.CSV.value else report.to_json()
    _emit(text, rc, out)
    for name, ok in report.verdicts.items():
        logger.info(f"{report.experiment}: {name} {'pass' if ok else 'FAIL'}")
    return EXIT_OK if report.passed else EXIT_FAILED_VERDICT


COMMANDS = {"norm": cmd_norm, "apply": cmd_apply, "experiment": cmd_experiment}


def main(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = sys.stdout if out is None else out
    try:
        rc = _run_config(args)
        if logging.getLevelName(logging.root.level) == "DEBUG":
            logger.debug("Run config:\n" + pprint.pformat(rc.to_dict()))
        return COMMANDS[args.command](args, rc, out)
    except (ValueError, TypeError, OSError, yaml.YAMLError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
