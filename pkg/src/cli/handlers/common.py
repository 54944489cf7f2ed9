import functools
import logging
import sys
from typing import List, Optional

from src.config.manager import ConfigManager, ScenarioConfig
from src.config.settings import CONFIG_PATH
from src.utils.errors import ConfigError, OolrError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1


def report_error(module: str, message: str) -> int:
    print(f"error [{module}]: {message}", file=sys.stderr)
    return EXIT_ERROR


def command(func):
    """Оборачивает обработчик команды: ошибки превращаются в код выхода 1"""

    @functools.wraps(func)
    async def wrapper(args) -> int:
        name = func.__name__.replace("_command", "")
        logger.info(f"Команда {name}: старт")
        try:
            status = await func(args)
        except OolrError as e:
            logger.error(f"Команда {name} завершилась ошибкой: {e}")
            return report_error(e.module, str(e))
        except OSError as e:
            logger.error(f"Команда {name}: ошибка ввода-вывода: {e}")
            return report_error("io", str(e))
        except Exception as e:
            logger.error(f"Необработанная ошибка в команде {name}: {e}", exc_info=True)
            return report_error("internal", str(e))
        logger.info(f"Команда {name}: готово")
        return status

    return wrapper


def load_scenario(config_path: Optional[str], overrides: List[str], seed: Optional[int]) -> ScenarioConfig:
    path = config_path or CONFIG_PATH
    if not path:
        raise ConfigError("no config given: pass --config or set CONFIG_PATH")
    return ConfigManager(path, overrides=overrides).resolve(seed=seed)
