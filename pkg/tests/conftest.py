import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def z9():
    from valring import make_ring

    return make_ring(3, 1, 2)


@pytest.fixture(scope="session")
def z25():
    from valring import make_ring

    return make_ring(5, 1, 2)


@pytest.fixture(scope="session")
def f9t2():
    # F_9[t]/(t^2): smallest ring with s > 1 and r > 1
    from valring import make_ring

    return make_ring(3, 2, 2, "fqtr")
