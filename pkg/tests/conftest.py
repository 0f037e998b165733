import pytest


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running Monte Carlo checks")


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    # keep sample caches out of the user's home directory
    monkeypatch.setenv("ARCSINE_LEVY_CACHE", str(tmp_path / "cache"))
