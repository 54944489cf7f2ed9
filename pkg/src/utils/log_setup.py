import logging
from contextlib import contextmanager
from contextvars import ContextVar
from logging.handlers import RotatingFileHandler
from typing import Iterator, Optional

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - [%(scenario)s/%(combination)s] %(message)s'

_scenario: ContextVar[str] = ContextVar("scenario", default="-")
_combination: ContextVar[str] = ContextVar("combination", default="-")


class RunContextFilter(logging.Filter):
    """Проставляет scenario/combination текущего прогона в записи лога.

    Значения берутся из contextvars: asyncio.to_thread копирует контекст,
    поэтому поток каждой комбинации видит своё имя. Поля, переданные
    через extra, не перезаписываются.
    """

    def filter(self, record: logging.LogRecord) -> bool:
        if not hasattr(record, "scenario"):
            record.scenario = _scenario.get()
        if not hasattr(record, "combination"):
            record.combination = _combination.get()
        return True


@contextmanager
def run_context(scenario: Optional[str] = None, combination: Optional[str] = None) -> Iterator[None]:
    """Задаёт сценарий и/или комбинацию для записей лога внутри блока"""
    tokens = []
    if scenario is not None:
        tokens.append((_scenario, _scenario.set(scenario or "-")))
    if combination is not None:
        tokens.append((_combination, _combination.set(combination or "-")))
    try:
        yield
    finally:
        for var, token in reversed(tokens):
            var.reset(token)


def _attach_filter(target) -> None:
    if not any(isinstance(existing, RunContextFilter) for existing in target.filters):
        target.addFilter(RunContextFilter())


_configured = False


def configure_logging(level: str = "INFO", log_file: Optional[str] = None) -> None:
    """Настраивает корневой логгер один раз за процесс"""
    global _configured
    root_logger = logging.getLogger()
    if _configured:
        root_logger.setLevel(level)
        return

    handlers = [logging.StreamHandler()]
    if log_file:
        handlers.append(RotatingFileHandler(log_file, maxBytes=1_000_000, backupCount=3, encoding='utf-8'))

    logging.basicConfig(format=LOG_FORMAT, level=level, handlers=handlers)

    # Сторонние библиотеки не должны засорять лог
    for logger_name in ("matplotlib", "numba", "asyncio"):
        logging.getLogger(logger_name).setLevel(logging.WARNING)

    # Фильтр логгера не видит записи дочерних логгеров, поэтому он стоит и на обработчиках
    _attach_filter(root_logger)
    for handler in root_logger.handlers:
        _attach_filter(handler)
    _configured = True
