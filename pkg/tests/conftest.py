import pytest

from kpb.waves import solve_wave


@pytest.fixture(scope="session")
def wave():
    cache = {}

    def get(a, n=32):
        if (a, n) not in cache:
            cache[a, n] = solve_wave(a, n)
        return cache[a, n]

    return get
