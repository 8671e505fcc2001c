import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "ci",
    derandomize=True,
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def write_movielens(path, triples):
    """triples: (user, item, rating) -> tab-separated fixture file."""
    with open(path, "w") as fh:
        for n, (u, i, r) in enumerate(triples):
            fh.write(f"{u}\t{i}\t{r}\t{880000000 + n}\n")
    return path


def write_jester(path, rows):
    """rows: list of length-100 rating lists (99 = unrated)."""
    with open(path, "w") as fh:
        for row in rows:
            rated = sum(1 for v in row if v != 99)
            fh.write(",".join([str(rated)] + [str(v) for v in row]) + "\n")
    return path
