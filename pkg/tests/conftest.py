"""Test isolation: restore structlog configuration after each test.

Tests that reconfigure structlog under ``capsys`` would otherwise leave the
global logger bound to a captured stream that pytest closes afterwards.
"""
import pytest
import structlog


@pytest.fixture(autouse=True)
def _restore_structlog_config():
    saved = structlog.get_config()
    yield
    structlog.configure(**saved)
