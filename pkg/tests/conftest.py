import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hgauge import bundle2 as b2
from hgauge import connection as cn
from hgauge import crossed_module as xm
from hgauge import groupoid as gp
from hgauge import matlie

settings.register_profile(
    "hgauge", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("hgauge")

B3 = [[0.3, 0.0, 0.1], [0.0, 0.5, 0.2]]
B4 = [[0.4, 0.1], [-0.2, 0.3]]


def gauge_bundle(cm_name, B, base=None):
    """Decorated bundle over the pair groupoid of R^2 with pure-gauge cocycle and potential."""
    cm = xm.builtin(cm_name)
    X = base or gp.pair_groupoid(2)
    pg = b2.PrincipalGBundleOverGroupoid(X, cm.G, cn.gauge_cocycle(cm.G, B, 2))
    return cn.decorated_connection(pg, cm, cn.gauge_potential(cm.G, B))


def cm4_quasi(h=0.7):
    b, C, om = gauge_bundle("CM4", B4)
    Ch = b2.make_Ch(b, C, b2.constant_Hmap(matlie.translation([h])))
    return b, Ch, om


@pytest.fixture(scope="session")
def cm1_setup():
    return gauge_bundle("CM1", B3)


@pytest.fixture(scope="session")
def cm4_setup():
    return cm4_quasi()


@pytest.fixture(scope="session")
def disc_so3_setup():
    return gauge_bundle("DISC:SO3", B3)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
