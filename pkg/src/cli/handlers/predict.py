import csv
import io
import logging

from src.cli.handlers.common import EXIT_OK, command
from src.managers.predictors import arma_forecast_series
from src.managers.trace_generator import ingest_demand_csv
from src.utils.files import atomic_write_text, format_number

logger = logging.getLogger(__name__)

FORECAST_COLUMNS = ("t", "observed", "predicted", "squared_error", "running_mse")


@command
async def predict_command(args) -> int:
    """predict --trace F --column C --out F: онлайн-прогноз ARMA-OGD одного столбца"""
    values = ingest_demand_csv(args.trace, args.column, normalize=False)
    rows = arma_forecast_series(
        values,
        lag_order=args.lag_order,
        step_scale=args.step_scale,
        coeff_bound=args.coeff_bound,
    )
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(FORECAST_COLUMNS)
    for row in rows:
        writer.writerow([str(row.t)] + [format_number(getattr(row, c)) for c in FORECAST_COLUMNS[1:]])
    atomic_write_text(args.out, buffer.getvalue())
    print(f"{len(rows)} rows written to {args.out}; final running MSE {rows[-1].running_mse:.6g}")
    return EXIT_OK
