import logging
from typing import Optional

try:
    from pythonjsonlogger.json import JsonFormatter
except ImportError:  # python-json-logger < 3
    from pythonjsonlogger.jsonlogger import JsonFormatter

from fluctum.config.settings import settings

PLAIN_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
JSON_FORMAT = "%(asctime)s %(name)s %(levelname)s %(message)s"

_HANDLER_NAME = "fluctum"


def setup_logging(level: Optional[str] = None, json_output: Optional[bool] = None) -> logging.Logger:
    """
    Configure the root logger once; repeated calls only update level and format.

    Args:
        level: Logging level name, defaults to settings.log_level
        json_output: Emit JSON records instead of plain lines, defaults to settings.log_json
    """
    level = (level or settings.log_level).upper()
    json_output = settings.log_json if json_output is None else json_output

    root = logging.getLogger()
    handler = next((h for h in root.handlers if h.get_name() == _HANDLER_NAME), None)
    if handler is None:
        handler = logging.StreamHandler()
        handler.set_name(_HANDLER_NAME)
        root.addHandler(handler)

    formatter = JsonFormatter(JSON_FORMAT) if json_output else logging.Formatter(PLAIN_FORMAT)
    handler.setFormatter(formatter)
    root.setLevel(level)
    return root
