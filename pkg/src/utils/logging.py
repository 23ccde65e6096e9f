"""
Log setup for kss runs.

Every module logs through ``logging.getLogger(__name__)``.
``setup_logging`` sends all of it to stderr, plus an optional run file,
so that the JSON documents the CLI prints on stdout stay parseable.
"""

import functools
import logging
import logging.config
import os
import time
from datetime import datetime

ROOT_LOGGER_NAME = 'kss'


class LoggingManager:
    """Root-logger wiring plus timing and step decorators for oracles and pipelines"""

    @staticmethod
    def setup_logging(config=None, log_file=None, level=None, add_timestamp=True):
        """
        Install the console handler (stderr) and, when a run file is
        named, a file handler beside it.

        Args:
            config (dict, optional): ``ConfigLoader.get_logging_config()``
            log_file (str, optional): Run log path; ``--log-file`` wins over ``KSS_LOG_FILE``.
            level (str, optional): Level name; falls back to the config, then INFO.
            add_timestamp (bool): Suffix the run file name with the start time.

        Returns:
            logger: the ``kss`` logger the scripts report progress on
        """
        config = config or {}
        level = level or config.get('level') or 'INFO'
        log_file = log_file or config.get('file')
        log_format = config.get('format') or '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

        numeric_level = getattr(logging, str(level).upper(), logging.INFO)

        if add_timestamp and log_file:
            filename, ext = os.path.splitext(log_file)
            timestamp = datetime.now().strftime('%Y%m%d_%H%M%S')
            log_file = f"{filename}_{timestamp}{ext}"

        log_config = {
            'version': 1,
            'disable_existing_loggers': False,
            'formatters': {
                'standard': {
                    'format': log_format
                },
            },
            'handlers': {
                # stderr so JSON written to stdout stays parseable
                'console': {
                    'class': 'logging.StreamHandler',
                    'level': numeric_level,
                    'formatter': 'standard',
                    'stream': 'ext://sys.stderr',
                },
            },
            'loggers': {
                '': {
                    'handlers': ['console'],
                    'level': numeric_level,
                    'propagate': True
                }
            }
        }

        if log_file:
            log_dir = os.path.dirname(log_file)
            if log_dir and not os.path.exists(log_dir):
                os.makedirs(log_dir)

            log_config['handlers']['file'] = {
                'class': 'logging.FileHandler',
                'level': numeric_level,
                'formatter': 'standard',
                'filename': log_file,
            }
            log_config['loggers']['']['handlers'].append('file')

        logging.config.dictConfig(log_config)

        logger = logging.getLogger(ROOT_LOGGER_NAME)
        logger.debug(f"Logging initialized at level {level}")
        if log_file:
            logger.info(f"Logging to file: {log_file}")

        return logger

    @staticmethod
    def log_execution_time(func):
        """Log the wall time of an exact oracle or bench call, failed calls included"""
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            logger = logging.getLogger(func.__module__)
            start_time = time.perf_counter()
            logger.debug(f"Starting {func.__name__}")

            try:
                result = func(*args, **kwargs)
                execution_time = time.perf_counter() - start_time
                logger.info(f"Finished {func.__name__} in {execution_time:.3f} seconds")
                return result
            except Exception as e:
                execution_time = time.perf_counter() - start_time
                logger.error(f"Failed {func.__name__} after {execution_time:.3f} seconds: {str(e)}")
                raise

        return wrapper

    @staticmethod
    def log_step(description):
        """Announce a pipeline stage (candidate selection, verification) at INFO before it runs"""
        def decorator(func):
            @functools.wraps(func)
            def wrapper(*args, **kwargs):
                logger = logging.getLogger(func.__module__)
                logger.info(f"STEP: {description}")
                return func(*args, **kwargs)

            return wrapper

        return decorator
