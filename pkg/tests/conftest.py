import time

import pytest

from convexflats.grassmann import build_eps_net


@pytest.fixture(scope="session")
def net_gr12():
    """Gr(1,2) net at eps = 0.2 (lines in the plane)."""
    return build_eps_net(2, 1, 0.2, rng_seed=7, audit_samples=20_000)


@pytest.fixture(scope="session")
def net_gr13():
    """Gr(1,3) net at eps = 1/40, below the d=3 threshold 1/36.

    Expensive; built once per session.  The build wall time is stashed on the
    net so the acceptance budget (net build + refutations) can include it.
    """
    t0 = time.monotonic()
    net = build_eps_net(3, 1, 1 / 40, rng_seed=11, stop_after=300, audit_samples=100_000)
    net.audit["build_seconds"] = time.monotonic() - t0
    return net


@pytest.fixture(scope="session")
def net_gr23():
    """Gr(2,3) net at eps = 0.1 (planes through the origin in R^3)."""
    return build_eps_net(3, 2, 0.1, rng_seed=3, audit_samples=20_000)
