#!/usr/bin/env python3
"""
Ponto de entrada da CLI.

Uso:
    python main.py solve --alpha 1 --beta 1 --out runs/solve
    python main.py solve --alpha 0 --beta 1 --delta-well
    python main.py potential --field 2 --window 0.5
    python main.py ladder --model hydrogenic --fields 1e6 1e9 1e12 1e18
    python main.py perturb --eps 1e-2 1e-3 1e-4
    python main.py verify --quick
    python main.py --show-defaults
"""

import argparse
import json
import logging
import sys

from cli.commands import COMMANDS, EXIT_CONFIG, EXIT_NOT_CONVERGED
from cli.config import build_config, read_config_file
from cli.defaults import get_defaults
from core.errors import ConfigError, FitError, GridError, PolaronError, SolverError

logger = logging.getLogger(__name__)


def configure_logging(level: str = "INFO") -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format='[%(asctime)s] [%(levelname)s] %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S',
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Polaron e átomo hidrogênico em campo magnético forte",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="Threads: variável de ambiente POLARON_THREADS (padrão: CPUs disponíveis).",
    )
    parser.add_argument("--show-defaults", action="store_true",
                        help="Imprime a tabela de padrões (JSON) e sai")
    parser.add_argument("--log-level", default="INFO", help="Nível de log (padrão: INFO)")
    sub = parser.add_subparsers(dest="command")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Arquivo JSON de configuração")
    common.add_argument("--out", help="Diretório de saída")
    common.add_argument("--format", choices=["csv", "json"], help="Formato das tabelas")
    common.add_argument("--alpha", type=float, help="Acoplamento α ≥ 0")
    common.add_argument("--beta", type=float, help="Força coulombiana β > 0")
    common.add_argument("--half-width", type=float, help="Meia-largura da grade 1D")
    common.add_argument("--n", type=int, help="Número de nós da grade 1D (ímpar)")
    common.add_argument("--max-iter", type=int, help="Máximo de iterações do solver")

    solve = sub.add_parser("solve", parents=[common], help="Minimiza o funcional 1D")
    solve.add_argument("--delta-well", action="store_true",
                       help="Caminho α = 0 (poço delta puro)")

    potential = sub.add_parser("potential", parents=[common], help="Tabela dos potenciais efetivos")
    potential.add_argument("--field", type=float, help="Campo B")
    potential.add_argument("--x-min", type=float)
    potential.add_argument("--x-max", type=float)
    potential.add_argument("--samples", type=int)
    potential.add_argument("--window", type=float, action="append",
                           help="Janela L para 𝒢 e 𝒟 (repetível)")

    ladder = sub.add_parser("ladder", parents=[common], help="Escada de campos e ajuste")
    ladder.add_argument("--model", choices=["polaron", "hydrogenic"])
    ladder.add_argument("--fields", type=float, nargs="+")
    ladder.add_argument("--ladder-n", type=int, help="Nós da grade por campo")

    perturb = sub.add_parser("perturb", parents=[common], help="Identidade da derivada em ε = 0")
    perturb.add_argument("--eps", type=float, nargs="+", help="Escada de ε")
    perturb.add_argument("--no-extrapolate", action="store_true",
                         help="Secantes sobre energias da grade fina, sem Richardson")
    perturb.add_argument("--pairing-fields", type=float, nargs="*")
    perturb.add_argument("--quick", action="store_true", help="Pula o pareamento de densidades")

    verify = sub.add_parser("verify", parents=[common], help="Suíte de verificação")
    verify.add_argument("--quick", action="store_true", help="Apenas o subconjunto rápido")
    return parser


def overrides_from_args(args: argparse.Namespace) -> dict:
    """Flags presentes viram um documento parcial de configuração."""
    doc: dict = {}

    def put(path: str, value):
        if value is None:
            return
        node = doc
        *parents, leaf = path.split(".")
        for key in parents:
            node = node.setdefault(key, {})
        node[leaf] = value

    get = lambda name: getattr(args, name, None)  # noqa: E731
    put("out", get("out"))
    put("format", get("format"))
    put("params.alpha", get("alpha"))
    put("params.beta", get("beta"))
    put("grid.half_width", get("half_width"))
    put("grid.n", get("n"))
    put("solver.max_iter", get("max_iter"))
    put("potential.field", get("field"))
    put("potential.x_min", get("x_min"))
    put("potential.x_max", get("x_max"))
    put("potential.samples", get("samples"))
    put("potential.windows", get("window"))
    put("ladder.model", get("model"))
    put("ladder.fields", get("fields"))
    put("ladder.n", get("ladder_n"))
    put("perturb.eps_ladder", get("eps"))
    put("perturb.pairing_fields", get("pairing_fields"))
    if get("no_extrapolate"):
        put("perturb.extrapolate", False)
    if get("delta_well"):
        put("delta_well", True)
    if get("quick"):
        put("quick", True)
    return doc


def run(argv: list[str] | None = None) -> int:
    """Executa a CLI e devolve o código de saída."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)

    if args.show_defaults:
        print(json.dumps(get_defaults(), indent=2, sort_keys=True))
        return 0
    if not args.command:
        parser.print_help()
        return EXIT_CONFIG

    try:
        file_doc = read_config_file(args.config) if args.config else None
        config = build_config(args.command, file_doc, overrides_from_args(args))
        return COMMANDS[args.command](config)
    except (ConfigError, GridError) as exc:
        logger.error(f"❌ configuração inválida: {exc}")
        return EXIT_CONFIG
    except (SolverError, FitError) as exc:
        logger.error(f"❌ {exc}")
        return EXIT_NOT_CONVERGED
    except PolaronError as exc:
        logger.error(f"❌ {type(exc).__name__}: {exc}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(run())
