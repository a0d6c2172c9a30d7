# cppgen/cli/commands/fig.py
"""
fig: datos del espectro normalizado E xi_k / E S para n = 10.

spt: una serie por tau en {1, 10, 100, 1000} (p = 1, t = tau) y la recta 1/(n-1).
spp: una serie por prior g_0 y g_1, y la recta 1/(n-1).
"""
from cppgen.cli.deps import build_config, csv_writer, format_float, open_output
from cppgen.schemas.config_schema import FigConfig
from cppgen.schemas.params_schema import FixedTime, PowerPrior
from cppgen.services import mutation_sfs

from .common import add_run_arguments

NAME = "fig"
TAUS = (1, 10, 100, 1000)
PRIORS = (0, 1)


def register(subparsers) -> None:
    parser = subparsers.add_parser(NAME, help="Datos de figuras (CSV)", description=__doc__)
    parser.add_argument("figure", choices=["spt", "spp"])
    parser.add_argument("--n", type=int, default=10)
    add_run_arguments(parser)
    parser.set_defaults(handler=run)


def figure_series(config: FigConfig):
    """(encabezado, columnas) de la figura pedida"""
    n = config.n
    if config.figure == "spt":
        names = [f"tau_{tau}" for tau in TAUS]
        series = [mutation_sfs.normalized_sfs(FixedTime(t=float(tau)), n, 1.0, 1.0) for tau in TAUS]
    else:
        names = [f"prior_{i}" for i in PRIORS]
        series = [mutation_sfs.normalized_sfs(PowerPrior(i=i), n, 1.0, 1.0) for i in PRIORS]
    return ["k"] + names + ["reference"], series


def run(args) -> int:
    config = build_config(FigConfig, figure=args.figure, n=args.n, output=args.output)
    head, series = figure_series(config)
    reference = mutation_sfs.normalized_sfs_limit(config.n)
    with open_output(config.output) as handle:
        writer = csv_writer(handle)
        writer.writerow(head)
        for k in range(1, config.n):
            writer.writerow([k] + [format_float(values[k - 1]) for values in series] + [format_float(reference)])
    return 0
