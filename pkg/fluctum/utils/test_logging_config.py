import json
import logging

from fluctum.utils.logging_config import setup_logging


def _handler():
    return [h for h in logging.getLogger().handlers if h.get_name() == "fluctum"]


def test_setup_is_idempotent():
    setup_logging("WARNING", False)
    setup_logging("DEBUG", False)
    assert len(_handler()) == 1
    assert logging.getLogger().level == logging.DEBUG


def test_json_output_formats_records():
    setup_logging("INFO", True)
    record = logging.LogRecord("fluctum.test", logging.INFO, __file__, 1, "hello %s", ("world",), None)
    payload = json.loads(_handler()[0].format(record))
    assert payload["message"] == "hello world"
    assert payload["levelname"] == "INFO"
    setup_logging("INFO", False)
    assert " - fluctum.test - INFO - hello world" in _handler()[0].format(record)
