# Config package
# ConfigManager импортируется из src.config.manager напрямую: он зависит от сервисов,
# которые сами читают src.config.settings
from .settings import (
    LOG_LEVEL,
    LOG_FILE_PATH,
    OUTPUT_DIR,
    RUN_WORKERS,
    CONFIG_PATH,
)

__all__ = [
    'LOG_LEVEL',
    'LOG_FILE_PATH',
    'OUTPUT_DIR',
    'RUN_WORKERS',
    'CONFIG_PATH',
]
