import argparse
import asyncio
import logging
import sys
from typing import List, Optional

from src.cli.handlers import generate_command, predict_command, report_command, run_command
from src.config.settings import LOG_FILE_PATH, LOG_LEVEL
from src.utils.log_setup import configure_logging

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oolr",
        description="Оптимистичное онлайн-резервирование ресурсов: трассы, прогоны, отчёты",
    )
    parser.add_argument("--log-level", default=None, help="уровень логирования (по умолчанию LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", default=None, help="YAML конфиг эксперимента (или CONFIG_PATH)")
        p.add_argument("--seed", type=int, default=None, help="переопределяет seed из конфига")
        p.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="SECTION.KEY=VALUE",
            help="переопределение параметра конфига, можно повторять",
        )

    p_generate = sub.add_parser("generate", help="сгенерировать трассу в CSV")
    with_config(p_generate)
    p_generate.add_argument("--out", required=True)
    p_generate.set_defaults(handler=generate_command)

    p_run = sub.add_parser("run", help="прогнать все комбинации и записать отчёты")
    with_config(p_run)
    p_run.add_argument("--trace", default=None, help="CSV трассы; без него трасса генерируется")
    p_run.add_argument("--out-dir", default=None, help="каталог отчётов (по умолчанию OUTPUT_DIR)")
    p_run.set_defaults(handler=run_command)

    p_report = sub.add_parser("report", help="склеить средние регреты отчётов по t")
    p_report.add_argument("--out", required=True)
    p_report.add_argument("files", nargs="+")
    p_report.set_defaults(handler=report_command)

    p_predict = sub.add_parser("predict", help="онлайн-прогноз ARMA-OGD столбца CSV")
    p_predict.add_argument("--trace", required=True)
    p_predict.add_argument("--column", required=True)
    p_predict.add_argument("--out", required=True)
    p_predict.add_argument("--lag-order", type=int, default=5)
    p_predict.add_argument("--step-scale", type=float, default=0.1)
    p_predict.add_argument("--coeff-bound", type=float, default=1.0)
    p_predict.set_defaults(handler=predict_command)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging((args.log_level or LOG_LEVEL).upper(), LOG_FILE_PATH)
    return asyncio.run(args.handler(args))


if __name__ == "__main__":
    sys.exit(main())
