import numpy as np
import pytest

from circle_blowup.spectral import CircleFunction

# h_test = 2 + cos t - cos(2t)/2 and k_test = cos t - 1: the reference pair
H_TEST = [2.0, 1.0, -0.5]
K_TEST = [-1.0, 1.0]


def h_test(n_grid=1024):
    return CircleFunction.from_trig(cos=H_TEST, n_grid=n_grid)


def k_test(n_grid=1024):
    return CircleFunction.from_trig(cos=K_TEST, n_grid=n_grid)


@pytest.fixture
def hk():
    return h_test(), k_test()


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


def random_trig(rng, degree, n_grid=1024, scale=1.0):
    a = rng.normal(size=degree + 1) * scale
    b = rng.normal(size=degree) * scale
    return CircleFunction.from_trig(cos=a, sin=b, n_grid=n_grid)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        status, detail = mod.RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {status}  {detail}")
