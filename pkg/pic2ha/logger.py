import datetime
import json
import logging
import os
import sys


class JSONFormatter(logging.Formatter):
    """
    Formatter to output logs in JSON Lines format.
    """
    def format(self, record):
        log_record = {
            "timestamp": datetime.datetime.fromtimestamp(record.created).isoformat(),
            "level": record.levelname,
            "component": record.name,
            "event": record.msg,  # the message is the event name
            "data": record.args if isinstance(record.args, dict) else {},
        }
        if record.exc_info:
            log_record["exception"] = self.formatException(record.exc_info)
        return json.dumps(log_record, default=str)


def setup_logging(session_id=None, log_file=None, verbose=False, log_dir=None):
    """
    Configures the root logger for a CLI run.

    Args:
        session_id (str): Optional ID used in the JSONL filename when log_dir is set.
        log_file (str): Explicit JSONL path. Overrides log_dir naming.
        verbose (bool): DEBUG level and console output of every record.
        log_dir (str): Directory for session_<id>.jsonl files. No file is
                       written when both log_file and log_dir are None.
    """
    root_logger = logging.getLogger()
    root_logger.setLevel(logging.DEBUG if verbose else logging.INFO)
    root_logger.handlers = []

    if log_file is None and log_dir is not None:
        os.makedirs(log_dir, exist_ok=True)
        if session_id:
            filename = f"session_{session_id}.jsonl"
        else:
            timestamp = datetime.datetime.now().strftime("%Y-%m-%d_%H-%M-%S")
            filename = f"session_{timestamp}.jsonl"
        log_file = os.path.join(log_dir, filename)
    elif log_file is not None and os.path.dirname(log_file):
        os.makedirs(os.path.dirname(log_file), exist_ok=True)

    if log_file is not None:
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(JSONFormatter())
        file_handler.setLevel(logging.DEBUG if verbose else logging.INFO)
        root_logger.addHandler(file_handler)

    # stdout carries the report, so the console handler goes to stderr
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(logging.Formatter(
        '[%(asctime)s] [%(levelname)s] [%(name)s] %(message)s'
    ))
    console_handler.setLevel(logging.DEBUG if verbose else logging.WARNING)
    root_logger.addHandler(console_handler)

    logging.getLogger("sympy").setLevel(logging.ERROR)

    logging.info("LoggingInitialized", {"log_file": log_file})


def get_logger(name):
    """
    Returns a logger instance with the given name.
    """
    return logging.getLogger(name)
