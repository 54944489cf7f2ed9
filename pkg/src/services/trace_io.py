"""CSV-формат трассы.

Заголовок: t,a,p_1..p_m,q_1..q_m,theta_1..theta_m[,alpha_1..alpha_m,beta_1..beta_m]
"""
import csv
import io
import logging
import math
import re
from pathlib import Path
from typing import List, Sequence, Union

import numpy as np

from src.utils.errors import OolrError, TraceSourceError
from src.utils.files import atomic_write_text, format_number
from src.utils.loss import TraceSlot

logger = logging.getLogger(__name__)

_INDEXED = re.compile(r"^(p|q|theta|alpha|beta)_(\d+)$")


def trace_header(m: int, with_sla: bool) -> List[str]:
    header = ["t", "a"]
    for prefix in ("p", "q", "theta"):
        header += [f"{prefix}_{i}" for i in range(1, m + 1)]
    if with_sla:
        for prefix in ("alpha", "beta"):
            header += [f"{prefix}_{i}" for i in range(1, m + 1)]
    return header


def _ratios(values, m: int) -> np.ndarray:
    return np.ones(m) if values is None else values


def render_trace_csv(slots: Sequence[TraceSlot]) -> str:
    if not slots:
        raise TraceSourceError("cannot export an empty trace")
    m = slots[0].m
    with_sla = any(s.has_sla for s in slots)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(trace_header(m, with_sla))
    for t, slot in enumerate(slots, start=1):
        row = [str(t), format_number(slot.demand)]
        row += [format_number(v) for v in slot.price_adv]
        row += [format_number(v) for v in slot.price_spot]
        row += [format_number(v) for v in slot.theta]
        if with_sla:
            row += [format_number(v) for v in _ratios(slot.alpha, m)]
            row += [format_number(v) for v in _ratios(slot.beta, m)]
        writer.writerow(row)
    return buffer.getvalue()


def export_trace_csv(slots: Sequence[TraceSlot], path: Union[str, Path]) -> Path:
    written = atomic_write_text(path, render_trace_csv(slots))
    logger.info(f"Трасса записана: {written} ({len(slots)} строк)")
    return written


def _parse_header(header: List[str], path: Path):
    if header[:2] != ["t", "a"]:
        raise TraceSourceError(f"{path}: header must start with 't,a', got {header[:2]}")
    groups = {}
    for name in header[2:]:
        match = _INDEXED.match(name)
        if not match:
            raise TraceSourceError(f"{path}: unexpected column {name!r}")
        groups.setdefault(match.group(1), []).append(int(match.group(2)))
    m = len(groups.get("theta", []))
    if m == 0:
        raise TraceSourceError(f"{path}: no theta_i columns")
    for prefix in ("p", "q", "theta"):
        if groups.get(prefix) != list(range(1, m + 1)):
            raise TraceSourceError(f"{path}: columns {prefix}_1..{prefix}_{m} missing or out of order")
    with_sla = "alpha" in groups or "beta" in groups
    if with_sla:
        for prefix in ("alpha", "beta"):
            if groups.get(prefix) != list(range(1, m + 1)):
                raise TraceSourceError(f"{path}: columns {prefix}_1..{prefix}_{m} missing or out of order")
    if header != trace_header(m, with_sla):
        raise TraceSourceError(f"{path}: column order differs from the trace format")
    return m, with_sla


def load_trace_csv(path: Union[str, Path]) -> List[TraceSlot]:
    """Читает трассу; ошибки указывают номер строки файла"""
    path = Path(path)
    if not path.is_file():
        raise TraceSourceError(f"trace file not found: {path}")

    slots: List[TraceSlot] = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if not header:
            raise TraceSourceError(f"{path}: empty file")
        m, with_sla = _parse_header([h.strip() for h in header], path)
        width = len(header)
        for row in reader:
            if not row:
                continue
            if len(row) != width:
                raise TraceSourceError(f"{path}: line {reader.line_num}: expected {width} cells, got {len(row)}")
            try:
                values = [float(cell) for cell in row]
            except ValueError:
                raise TraceSourceError(f"{path}: line {reader.line_num}: non-numeric cell") from None
            if not all(math.isfinite(v) for v in values):
                raise TraceSourceError(f"{path}: line {reader.line_num}: non-finite cell")
            body = np.asarray(values[2:])
            try:
                slots.append(TraceSlot(
                    demand=values[1],
                    price_adv=body[0:m],
                    price_spot=body[m:2 * m],
                    theta=body[2 * m:3 * m],
                    alpha=body[3 * m:4 * m] if with_sla else None,
                    beta=body[4 * m:5 * m] if with_sla else None,
                ))
            except OolrError as e:
                raise TraceSourceError(f"{path}: line {reader.line_num}: {e}") from e

    if not slots:
        raise TraceSourceError(f"{path}: no data rows")
    logger.debug(f"Загружена трасса {path}: T={len(slots)}, m={m}")
    return slots
