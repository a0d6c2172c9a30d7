# cppgen/cli/commands/sfs.py
"""
sfs: espectro de frecuencias de sitios.

--mode expected: columnas k, expected, method (closed_form, quadrature o infinite).
--mode mc: columnas k, mean, se, note; con origen infinito la rama raíz se
excluye y la nota es root_excluded.
"""
import math

import numpy as np

from cppgen.cli.deps import build_config, csv_writer, format_float, open_output
from cppgen.schemas.config_schema import SfsConfig
from cppgen.schemas.params_schema import InfiniteTime
from cppgen.services import cpp_sampler, mutation_sfs
from cppgen.services.base_service import BaseService

from .common import add_model_arguments, resolve_origin, resolve_seed

NAME = "sfs"
EXPECTED_HEADER = ["k", "expected", "method"]
MC_HEADER = ["k", "mean", "se", "note"]
ROOT_EXCLUDED = "root_excluded"

_runner = BaseService(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser(NAME, help="Espectro esperado o Monte Carlo", description=__doc__)
    parser.add_argument("--mode", choices=["expected", "mc"], default="expected")
    add_model_arguments(parser, theta_default=1.0)
    parser.set_defaults(handler=run)


def expected_rows(config: SfsConfig):
    params = config.model_params()
    values = mutation_sfs.expected_sfs_vector(config.origin_condition(), params.n, params.theta, params.p)
    return [[k, format_float(value), method] for k, (value, method) in enumerate(values, start=1)]


def monte_carlo_rows(config: SfsConfig):
    params = config.model_params()
    origin = config.origin_condition()

    def replicate(index, stream):
        genealogy = cpp_sampler.sample_genealogy(params, origin, stream)
        return mutation_sfs.simulate_sfs(genealogy, params.theta, stream).xi

    spectra = np.array(_runner.map_replicates(replicate, config.seed, config.replicates, config.threads), dtype=float)
    means = spectra.mean(axis=0)
    if spectra.shape[0] > 1:
        se = spectra.std(axis=0, ddof=1) / math.sqrt(spectra.shape[0])
    else:
        se = np.full(means.shape, math.inf)
    note = ROOT_EXCLUDED if isinstance(origin, InfiniteTime) else ""
    return [
        [k, format_float(mean), format_float(error), note]
        for k, (mean, error) in enumerate(zip(means, se), start=1)
    ]


def run(args) -> int:
    config = build_config(
        SfsConfig,
        mode=args.mode, n=args.n, p=args.p, alpha=args.alpha, theta=args.theta,
        origin=resolve_origin(args), replicates=args.replicates, seed=resolve_seed(args),
        threads=args.threads, output=args.output,
    )
    if config.mode == "expected":
        head, rows = EXPECTED_HEADER, expected_rows(config)
    else:
        head, rows = MC_HEADER, monte_carlo_rows(config)
    with open_output(config.output) as handle:
        writer = csv_writer(handle)
        writer.writerow(head)
        writer.writerows(rows)
    return 0
