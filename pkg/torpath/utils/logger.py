import logging
import os
import sys
from typing import Sequence
try:
    import colorlog
except ImportError:
    pass

FORMAT = '%(asctime)s - %(levelname)-8s - %(name)s - %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'
LOG_COLORS = {'DEBUG': 'thin_yellow', 'INFO': 'reset',
              'WARNING': 'bold_yellow', 'ERROR': 'bold_red',
              'CRITICAL': 'bold_red'}


def setup_logging(level: int = logging.DEBUG, without: Sequence[str] = ()):
    """Configure the root logger once.

    :param without: loggers to keep one level quieter than ``level``
    """
    root = logging.getLogger()
    root.setLevel(level)
    if 'colorlog' in sys.modules and os.isatty(2):
        formatter = colorlog.ColoredFormatter('%(log_color)s' + FORMAT, DATE_FORMAT,
                                              log_colors=LOG_COLORS)
    else:
        formatter = logging.Formatter(FORMAT, DATE_FORMAT)
    if not root.handlers:
        root.addHandler(logging.StreamHandler())
    for handler in root.handlers:
        handler.setFormatter(formatter)
    for logger in without:
        logging.getLogger(logger).setLevel(level + 10)
