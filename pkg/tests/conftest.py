"""Общие настройки pytest."""

import logging

import pytest

def pytest_configure(config):
    config.addinivalue_line("markers", "slow: обучение на эталонной записи (минуты на CPU)")

@pytest.fixture(autouse=True)
def _reset_root_logging():
    """Снимает обработчики root-логгера после теста: они держат потоки захвата pytest, закрытые между тестами."""
    yield
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()
