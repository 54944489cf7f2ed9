import logging

from src.cli.handlers.common import EXIT_OK, command, load_scenario
from src.managers.trace_generator import generate
from src.services.trace_io import export_trace_csv
from src.utils.log_setup import run_context

logger = logging.getLogger(__name__)


@command
async def generate_command(args) -> int:
    """generate --config F --out F: трасса по конфигу и seed"""
    scenario = load_scenario(args.config, args.set, args.seed)
    with run_context(scenario=scenario.scenario):
        slots = generate(scenario.trace)
    export_trace_csv(slots, args.out)
    print(f"{len(slots)} rows written to {args.out}")
    return EXIT_OK
