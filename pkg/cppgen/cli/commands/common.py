# cppgen/cli/commands/common.py


def add_model_arguments(parser, theta_default: float = 0.0) -> None:
    """Parámetros del modelo compartidos por simulate y sfs"""
    parser.add_argument("--n", type=int, required=True, help="Tamaño de muestra (n >= 2)")
    rate = parser.add_mutually_exclusive_group(required=True)
    rate.add_argument("--p", type=float, help="Tasa de muestreo por linaje")
    rate.add_argument("--alpha", type=float, help="Régimen límite: p = n/alpha")
    parser.add_argument("--theta", type=float, default=theta_default, help="Tasa de mutación")
    parser.add_argument(
        "--origin", default="infinite",
        help="Condición de origen: fixed:T, infinite o prior:I (por defecto infinite)",
    )
    parser.add_argument("--prior", type=int, help="Atajo de --origin prior:I")
    parser.add_argument("--replicates", type=int, default=1)
    add_run_arguments(parser)


def add_run_arguments(parser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="Semilla (entero sin signo de 64 bits)")
    parser.add_argument("--threads", type=int, default=None, help="Hilos (si no, CPPGEN_THREADS)")
    parser.add_argument("--output", default=None, help="Archivo de salida (por defecto stdout)")


def resolve_origin(args) -> str:
    return f"prior:{args.prior}" if args.prior is not None else args.origin


def resolve_seed(args) -> int:
    from cppgen.config import get_settings

    return args.seed if args.seed is not None else get_settings().seed
