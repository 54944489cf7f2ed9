import logging

from src.cli.handlers.common import EXIT_OK, command
from src.services.report_service import join_reports, write_joined_csv

logger = logging.getLogger(__name__)


@command
async def report_command(args) -> int:
    """report --out F FILES...: склейка средних регретов по t"""
    table = join_reports(args.files)
    write_joined_csv(table, args.out)
    print(f"{len(table.rows)} rows, {len(table.header)} columns written to {args.out}")
    return EXIT_OK
