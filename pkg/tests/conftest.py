import pytest
from hypothesis import HealthCheck, settings

from weibull_ratio_chart.chart import RatioRun
from weibull_ratio_chart.io import fixture_path, load_run_config, parse_dataset

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

ACCEPTANCE_LINES = []


def _ratio_run(config_name, x_name, y_name):
    cfg = load_run_config(fixture_path(config_name))
    xs = parse_dataset(fixture_path(x_name))
    ys = parse_dataset(fixture_path(y_name))
    run = RatioRun.create(cfg.x, cfg.y, track_beta=True)
    for sx, sy in zip(xs, ys):
        run.step(sx, sy)
    return run


@pytest.fixture(scope="session")
def example1():
    return _ratio_run("example1.toml", "table1.csv", "table2.csv")


@pytest.fixture(scope="session")
def example2():
    return _ratio_run("example2.toml", "table3a.csv", "table3b.csv")


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
