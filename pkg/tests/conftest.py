import time

import pytest

from medmission import SweepConfig, run_sweep


@pytest.fixture(scope="session")
def default_sweep():
    """One full default-protocol sweep, shared by the acceptance tests.

    Returns (result, wall_seconds) so the protocol criterion can check the
    single-worker runtime of exactly this run.
    """
    started = time.perf_counter()
    result = run_sweep(SweepConfig(), workers=1)
    elapsed = time.perf_counter() - started
    return result, elapsed
