"""
测试公共配置
"""
import pytest

from config.settings import settings


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: 耗时较长的系综与标度测试")


@pytest.fixture
def dense_cap(monkeypatch):
    """测试内可修改的稠密上限，结束后恢复"""
    monkeypatch.setattr(settings, 'DENSE_CAP', settings.DENSE_CAP)
    return settings
