import os
import sys
from pathlib import Path

from dynaconf import Dynaconf
from loguru import logger


confi_format = "[ {time} | process: {process.id} | {level: <8}] {module}.{function}:{line} {message}"


settings = Dynaconf(
    envvar_prefix="MDPC",
    settings_files=[
        "settings.toml",
        ".secrets.toml",
        "../settings.toml",
        "/data/settings.toml",
    ],
    environments=True,
    load_dotenv=True,
)


def _add_file_sinks(log_dir: Path, rotation: str):
    log_dir.mkdir(parents=True, exist_ok=True)
    logger.add(log_dir / "mdpc.log", rotation=rotation, level="INFO")
    logger.add(log_dir / "mdpc_WARNING.log", rotation=rotation, level="WARNING")


def start_logger():
    type_logger = "development"
    if os.environ.get("MDPC_ENV") == "production":
        type_logger = "production"
        logger.remove()
        logger.add(sys.stderr, level="INFO", format=confi_format)

    rotation = settings.get("LOG_ROTATION", "500 MB")
    try:
        _add_file_sinks(Path(settings.get("LOG_DIR", "/logs/mdpc")), rotation)
    except OSError:
        _add_file_sinks(Path("./logs/mdpc"), rotation)

    logger.info(f"The system is operating in mode {type_logger}")
