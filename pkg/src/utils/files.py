import logging
import os
import tempfile
import threading
from pathlib import Path
from typing import Union

logger = logging.getLogger(__name__)

_lock = threading.Lock()


def format_number(value: float) -> str:
    """17 значащих цифр: повторный прогон даёт байт-в-байт тот же файл"""
    return f"{float(value):.17g}"


def atomic_write_text(path: Union[str, Path], text: str) -> Path:
    """Пишет во временный файл рядом с целевым и переименовывает"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        with _lock:
            os.replace(tmp_name, path)
    except Exception as e:
        logger.error(f"Ошибка записи {path}: {e}")
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return path
