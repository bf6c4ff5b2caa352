import logging
from logging.handlers import RotatingFileHandler

from dscf import data
from dscf.config import settings

# log configuration
logger = logging.getLogger(data.LOG_NAME)
logger.setLevel(settings.log_level)
logger.propagate = False


def setup_logging(log_file=None, level=None):
    """
    Attach the rotating file handler to the package logger.

    Calling it again replaces the previous handlers, so commands can redirect
    the log file into their output directory.

    Args:
        log_file (str): Path of the rotating log file, defaults to `settings.log_file`.
        level (str): Logging level name, defaults to `settings.log_level`.

    Returns:
        logging.Logger: The configured package logger.
    """
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()
    formatter = logging.Formatter(data.LOG_MESSAGE_FORMAT, data.LOG_DATE_FORMAT)

    handler = RotatingFileHandler(log_file or settings.log_file,
                                  maxBytes=settings.log_max_size_bytes,
                                  backupCount=settings.log_backup_count)
    handler.setFormatter(formatter)
    logger.addHandler(handler)

    logger.setLevel(level or settings.log_level)
    return logger


def log(module, message, level=logging.INFO):
    """
    Log a pipeline event under a module column.

    Args:
        module (str): The name of the module.
        message (str): The message to record.
        level (int): Logging level.

    Returns:
        None
    """
    logger.log(level, f"{module.rjust(10)} :: {message}")
