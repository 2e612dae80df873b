import abc
import logging
import os
import sys


class Singleton(abc.ABCMeta, type):
    """
    Singleton metaclass for ensuring only one instance of a class.
    """

    _instances = {}

    def __call__(cls, *args, **kwargs):
        if cls not in cls._instances:
            cls._instances[cls] = super(
                Singleton, cls).__call__(
                *args, **kwargs)
        return cls._instances[cls]


# Custom logging formatter to handle newlines properly
class NewlineFormatter(logging.Formatter):
    def format(self, record):
        message = super().format(record)
        return message.replace('\\n', '\n')


def setup_logging(log_file, debug):
    log_formatter = NewlineFormatter('%(asctime)s [%(levelname)s] %(message)s')

    handlers = []
    if log_file:
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setFormatter(log_formatter)
        file_handler.setLevel(logging.DEBUG)
        handlers.append(file_handler)

    stream_handler = logging.StreamHandler(sys.stdout)
    stream_handler.setFormatter(log_formatter)
    stream_handler.setLevel(logging.DEBUG if debug else logging.INFO)
    handlers.append(stream_handler)

    root_logger = logging.getLogger()

    # Remove previous handlers
    for handler in root_logger.handlers[:]:
        handler.flush()
        handler.close()
        root_logger.removeHandler(handler)

    root_logger.setLevel(logging.DEBUG)
    for handler in handlers:
        root_logger.addHandler(handler)


def _env_flag(name):
    return os.environ.get(name, "").strip().lower() in {"1", "true", "yes", "on"}


def _env_threads():
    raw = os.environ.get("DRM_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError:
        logging.getLogger(__name__).warning(f"Ignoring non-integer DRM_THREADS={raw!r}")
        return os.cpu_count() or 1
    return max(1, value)


class Config(metaclass=Singleton):
    """
    Process-wide runtime switches shared by every subcommand.
    Algorithm settings live in config.settings; this only holds what the
    environment decides (logging, parallelism).
    """

    def __init__(self):
        self.debug = _env_flag("DRM_DEBUG")
        self.log_file_name = os.environ.get("DRM_LOG_FILE") or None
        self.threads = _env_threads()
        self.logging_ready = False

    def setup(self):
        setup_logging(self.log_file_name, self.debug)
        self.logging_ready = True

    def set_debug(self, value: bool):
        self.debug = value
        self.setup()

    def set_threads(self, value: int):
        self.threads = max(1, int(value))
