"""Отчёты: CSV по слотам, сводная таблица запуска и склейка для графиков"""
import csv
import io
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from src.services.benchmark_service import REPORT_COLUMNS, RegretReport
from src.utils.errors import HorizonMismatchError, ReportError
from src.utils.files import atomic_write_text, format_number

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = (
    "combination",
    "oracle_assisted",
    "avg_regret_static",
    "avg_regret_dynamic",
    "regret_static",
    "bound",
    "bound_holds",
    "fixed_point_fallbacks",
    "unconverged_benchmarks",
)


def render_report_csv(report: RegretReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    columns = report.columns()
    for i in range(report.horizon):
        row = [str(int(columns["t"][i]))]
        row += [format_number(columns[name][i]) for name in REPORT_COLUMNS[1:]]
        writer.writerow(row)
    return buffer.getvalue()


def write_report_csv(report: RegretReport, path: Union[str, Path]) -> Path:
    return atomic_write_text(path, render_report_csv(report))


def read_report_csv(path: Union[str, Path]) -> Dict[str, np.ndarray]:
    """Читает отчёт в словарь столбцов"""
    path = Path(path)
    if not path.is_file():
        raise ReportError(f"report not found: {path}")
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        missing = [c for c in REPORT_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise ReportError(f"{path}: missing columns {missing}")
        data: Dict[str, List[float]] = {c: [] for c in REPORT_COLUMNS}
        for row in reader:
            try:
                for column in REPORT_COLUMNS:
                    data[column].append(float(row[column]))
            except (TypeError, ValueError):
                raise ReportError(f"{path}: line {reader.line_num}: non-numeric cell") from None
    if not data["t"]:
        raise ReportError(f"{path}: no data rows")
    return {c: np.asarray(v, dtype=float) for c, v in data.items()}


@dataclass(frozen=True)
class SummaryTable:
    header: List[str]
    rows: List[List[float]]


def join_reports(paths: Sequence[Union[str, Path]]) -> SummaryTable:
    """Широкая таблица по t: для каждого отчёта <stem>_avg_regret_static и _dynamic"""
    if not paths:
        raise ReportError("no report files given")
    header = ["t"]
    columns: List[np.ndarray] = []
    t_axis = None
    first_path = None
    for path in paths:
        path = Path(path)
        data = read_report_csv(path)
        if t_axis is None:
            t_axis, first_path = data["t"], path
        elif data["t"].size != t_axis.size or not np.array_equal(data["t"], t_axis):
            raise HorizonMismatchError(
                f"{path} has T={data['t'].size}, {first_path} has T={t_axis.size}"
            )
        header += [f"{path.stem}_avg_regret_static", f"{path.stem}_avg_regret_dynamic"]
        columns += [data["avg_regret_static"], data["avg_regret_dynamic"]]
    if len(set(header)) != len(header):
        raise ReportError("report file names must have distinct stems")
    rows = [[t_axis[i]] + [c[i] for c in columns] for i in range(t_axis.size)]
    return SummaryTable(header=header, rows=rows)


def write_joined_csv(table: SummaryTable, path: Union[str, Path]) -> Path:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.header)
    for row in table.rows:
        writer.writerow([str(int(row[0]))] + [format_number(v) for v in row[1:]])
    return atomic_write_text(path, buffer.getvalue())


def summary_rows(reports: Sequence[RegretReport]) -> List[dict]:
    rows = []
    for report in reports:
        rows.append({
            "combination": report.label,
            "oracle_assisted": report.oracle_assisted,
            "avg_regret_static": report.final_avg_regret_static,
            "avg_regret_dynamic": report.final_avg_regret_dynamic,
            "regret_static": report.final_regret_static,
            "bound": report.final_bound,
            "bound_holds": report.bound_holds(),
            "fixed_point_fallbacks": report.diagnostics.fixed_point_fallbacks,
            "unconverged_benchmarks": report.diagnostics.unconverged_benchmarks,
        })
    return rows


def _cell(value) -> str:
    if value is None:
        return "n/a"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_number(value)
    return str(value)


def write_summary_csv(reports: Sequence[RegretReport], path: Union[str, Path]) -> Path:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SUMMARY_COLUMNS)
    for row in summary_rows(reports):
        writer.writerow([_cell(row[c]) for c in SUMMARY_COLUMNS])
    return atomic_write_text(path, buffer.getvalue())


def _yes_no(flag: Optional[bool]) -> str:
    if flag is None:
        return "n/a"
    return "yes" if flag else "no"


def format_summary_table(reports: Sequence[RegretReport]) -> str:
    """Таблица для консоли: итоговое R_T/T по комбинациям"""
    rows = summary_rows(reports)
    name_width = max([len("combination")] + [len(r["combination"]) for r in rows])
    lines = [
        f"{'combination':<{name_width}}  {'R_T/T static':>14}  {'R_T/T dynamic':>14}  {'bound ok':>8}  oracle"
    ]
    for r in rows:
        dynamic = r["avg_regret_dynamic"]
        dynamic_text = "n/a" if math.isnan(dynamic) else f"{dynamic:.6g}"
        lines.append(
            f"{r['combination']:<{name_width}}  {r['avg_regret_static']:>14.6g}  {dynamic_text:>14}  "
            f"{_yes_no(r['bound_holds']):>8}  {'yes' if r['oracle_assisted'] else 'no'}"
        )
    return "\n".join(lines)
