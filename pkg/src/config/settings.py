import os
from pathlib import Path
from dotenv import load_dotenv

load_dotenv()

# Определяем корень проекта (3 уровня выше от src/config/settings.py)
PROJECT_ROOT = Path(__file__).parent.parent.parent

LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO').upper()

# Логи
LOG_FILE_PATH = os.getenv('LOG_FILE_PATH', 'logs/oolr.log')
# Создаем директорию для логов, если она не существует
_log_path = Path(LOG_FILE_PATH)
if not _log_path.is_absolute():
    _log_path = PROJECT_ROOT / _log_path
_log_dir = _log_path.parent
if _log_dir != PROJECT_ROOT:
    _log_dir.mkdir(parents=True, exist_ok=True)
# Абсолютный путь для RotatingFileHandler
LOG_FILE_PATH = str(_log_path)

# Каталог по умолчанию для отчётов и трасс
OUTPUT_DIR = os.getenv('OUTPUT_DIR', 'out')

# Сколько комбинаций считать одновременно
RUN_WORKERS = int(os.getenv('RUN_WORKERS', '4'))

# Конфиг эксперимента, если --config не передан
CONFIG_PATH = os.getenv('CONFIG_PATH')
