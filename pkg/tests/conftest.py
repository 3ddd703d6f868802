import pytest

from raqr.config import load_config
from raqr.experiments import build_receivers

ACCEPTANCE = {}


@pytest.fixture(scope="session")
def cfg():
    return load_config()


@pytest.fixture(scope="session")
def defaults(cfg):
    return cfg.atomic_system(), cfg.optical_drive(), cfg.rf_drive(), cfg.photoreceiver()


@pytest.fixture(scope="session")
def receivers(cfg):
    return build_receivers(cfg)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k)):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {key}: {detail}")
