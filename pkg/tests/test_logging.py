import logging

import pytest

from thermoporo_splitting.utils.logging import LogContext, log_performance


def test_log_context_reports_start_and_finish(caplog):
    logger = logging.getLogger("tps.test")
    with caplog.at_level(logging.INFO, logger="tps.test"):
        with LogContext(logger, "装配"):
            pass
    messages = [r.getMessage() for r in caplog.records]
    assert messages[0] == "开始: 装配"
    assert messages[1].startswith("完成: 装配")


def test_log_context_does_not_swallow(caplog):
    logger = logging.getLogger("tps.test")
    with pytest.raises(RuntimeError):
        with LogContext(logger, "求解"):
            raise RuntimeError("boom")
    assert any(r.levelno == logging.ERROR and "boom" in r.getMessage() for r in caplog.records)


def test_log_performance_keeps_result_and_name():
    @log_performance
    def double(x):
        return 2 * x

    assert double(21) == 42
    assert double.__name__ == "double"
