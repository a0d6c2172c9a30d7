# cppgen/cli/commands/verify.py
"""
verify: suite de aceptación. Imprime una línea por criterio y escribe el
reporte JSON ({criterion, statistic, p_value, tolerance, pass}) en --output.
Código de salida 0 si y solo si todos los criterios pasan.
"""
import json
import sys

from cppgen.cli.deps import build_config, format_float, open_output
from cppgen.schemas.config_schema import VerifyConfig
from cppgen.services import verification_suite

from .common import add_run_arguments, resolve_seed

NAME = "verify"


def register(subparsers) -> None:
    parser = subparsers.add_parser(NAME, help="Correr la suite de aceptación", description=__doc__)
    parser.add_argument("--quick", action="store_true", help="Solo chequeos deterministas")
    parser.add_argument("--scale", type=float, default=None, help="Multiplicador de réplicas (1.0 = tamaño completo)")
    add_run_arguments(parser)
    parser.set_defaults(handler=run)


def run(args) -> int:
    config = build_config(
        VerifyConfig, seed=resolve_seed(args), quick=args.quick, scale=args.scale,
        threads=args.threads, output=args.output,
    )
    report = verification_suite.run(seed=config.seed, quick=config.quick, scale=config.scale)
    for result in report.results:
        status = "PASS" if result.passed else "FAIL"
        p_value = "-" if result.p_value is None else format_float(result.p_value)
        print(
            f"{status} {result.criterion} statistic={format_float(result.statistic)} "
            f"p_value={p_value} tolerance={format_float(result.tolerance)}",
            file=sys.stderr if config.output is None else sys.stdout,
        )
    with open_output(config.output) as handle:
        json.dump(report.to_report(), handle, indent=2)
        handle.write("\n")
    return 0 if report.passed else 1
