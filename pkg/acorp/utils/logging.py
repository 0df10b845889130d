# Written by the acorp developers - 2026
#####################################################
import logging
import sys

from termcolor import colored

_LEVEL_COLORS = {
    logging.DEBUG: "blue",
    logging.INFO: "cyan",
    logging.WARNING: "yellow",
    logging.ERROR: "red",
    logging.CRITICAL: "red",
}


class ColoredFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        message = super().format(record)
        level = colored(record.levelname, _LEVEL_COLORS.get(record.levelno, "white"))
        return level + " " + message


# One stream handler on the package logger; calling it again only adjusts the level
def setup_logging(verbose: bool = False, stream=None) -> logging.Logger:
    logger = logging.getLogger("acorp")
    logger.setLevel(logging.DEBUG if verbose else logging.WARNING)
    if not any(getattr(h, "_acorp_handler", False) for h in logger.handlers):
        handler = logging.StreamHandler(stream if stream is not None else sys.stderr)
        handler.setFormatter(ColoredFormatter("%(name)s: %(message)s"))
        handler._acorp_handler = True
        logger.addHandler(handler)
    return logger
