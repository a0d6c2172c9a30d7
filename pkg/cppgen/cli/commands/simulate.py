# cppgen/cli/commands/simulate.py
"""
simulate: una genealogía por fila.

Columnas: replicate, origin, H1..H{n-1}. Con --mutations se escribe además
un CSV replicate, branch, time, carriers con las mutaciones de cada réplica.
"""
from cppgen.cli.deps import build_config, csv_writer, format_float, open_output
from cppgen.schemas.config_schema import SimulateConfig
from cppgen.schemas.params_schema import FixedTime
from cppgen.services import cpp_sampler, forward_oracle, mutation_sfs
from cppgen.services.base_service import BaseService

from .common import add_model_arguments, resolve_origin, resolve_seed

NAME = "simulate"
MUTATION_HEADER = ["replicate", "branch", "time", "carriers"]

_runner = BaseService(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser(NAME, help="Simular genealogías de la muestra", description=__doc__)
    add_model_arguments(parser)
    parser.add_argument("--engine", choices=["exact", "forward"], default="exact")
    parser.add_argument("--N", type=float, help="Tasa de nacimiento/muerte (motor forward)")
    parser.add_argument("--mutations", default=None, help="CSV de mutaciones (requiere --theta > 0)")
    parser.add_argument("--max-attempts", type=int, default=None, dest="max_attempts")
    parser.set_defaults(handler=run)


def header(n: int):
    return ["replicate", "origin"] + [f"H{j}" for j in range(1, n)]


def simulate_replicates(config: SimulateConfig):
    """(genealogía, mutaciones o None) por réplica, en orden de índice"""
    params = config.model_params(config.N)
    origin = config.origin_condition()
    record_mutations = config.mutations is not None and config.theta > 0

    def replicate(index, stream):
        if config.engine == "forward":
            assert isinstance(origin, FixedTime)
            genealogy = forward_oracle.sample_conditioned_genealogy(
                params.N, params.p, origin.t, params.n, stream, config.max_attempts
            )
        else:
            genealogy = cpp_sampler.sample_genealogy(params, origin, stream)
        record = mutation_sfs.place_mutations(genealogy, config.theta, stream) if record_mutations else None
        return genealogy, record

    return _runner.map_replicates(replicate, config.seed, config.replicates, config.threads)


def run(args) -> int:
    config = build_config(
        SimulateConfig,
        n=args.n, p=args.p, alpha=args.alpha, theta=args.theta, origin=resolve_origin(args),
        replicates=args.replicates, seed=resolve_seed(args), threads=args.threads, output=args.output,
        engine=args.engine, N=args.N, mutations=args.mutations, max_attempts=args.max_attempts,
    )
    results = simulate_replicates(config)

    with open_output(config.output) as handle:
        writer = csv_writer(handle)
        writer.writerow(header(config.n))
        for index, (genealogy, _) in enumerate(results):
            writer.writerow([index, format_float(genealogy.origin)] + [format_float(h) for h in genealogy.depths])

    if config.mutations is not None:
        with open_output(config.mutations) as handle:
            writer = csv_writer(handle)
            writer.writerow(MUTATION_HEADER)
            for index, (genealogy, record) in enumerate(results):
                for event in record or []:
                    carriers = mutation_sfs.carrier_count(genealogy, event)
                    writer.writerow([index, event.branch, format_float(event.time), carriers])
    return 0
