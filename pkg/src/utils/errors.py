"""Исключения предметной области.

Каждое исключение несёт стабильный ``code``: по нему CLI и тесты
различают категории ошибок, не завязываясь на текст сообщения.
"""
from typing import Optional


class OolrError(ValueError):
    """Базовая ошибка библиотеки"""

    code = "error"
    module = "oolr"

    def __init__(self, message: str = "", *, module: Optional[str] = None):
        if module:
            self.module = module
        text = f"{self.code}: {message}" if message else self.code
        super().__init__(text)


class DimensionError(OolrError):
    """Несовпадение размерностей векторов"""
    code = "dimension"
    module = "domain"


class InfeasibleError(OolrError):
    """Решение вне допустимого множества"""
    code = "infeasible"
    module = "learners"


class LossDomainError(OolrError):
    """Аргумент логарифма вышел из области определения"""
    code = "domain"
    module = "loss"


class LengthMismatchError(OolrError):
    code = "length"
    module = "benchmarks"


class TraceSourceError(OolrError):
    """Источник трассы недоступен, пуст или повреждён"""
    code = "trace-source"
    module = "traces"


class HorizonMismatchError(OolrError):
    code = "horizon mismatch"
    module = "harness"


class ConfigError(OolrError):
    """Невалидная конфигурация эксперимента"""
    code = "config"
    module = "config"


class ReportError(OolrError):
    """Файл отчёта отсутствует или не в формате отчёта"""
    code = "report"
    module = "harness"
