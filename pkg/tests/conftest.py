import numpy as np
import pytest

from scgg.graph import generate_grid, prepare_sample
from scgg.training import TrainConfig, train

TOY_CONFIG = dict(m=2, epochs=200, seed=0)


@pytest.fixture(scope="session")
def toy_grid():
    return generate_grid(3, 3)


@pytest.fixture(scope="session")
def toy_checkpoint(toy_grid):
    """20 copies of the 3x3 grid, m=2, 200 epochs, seed 0."""
    return train([toy_grid] * 20, TrainConfig(**TOY_CONFIG))


@pytest.fixture(scope="session")
def toy_samples(toy_grid):
    """The samples the toy run trained on (same seed, same draw order)."""
    rng = np.random.default_rng(TOY_CONFIG["seed"])
    return [prepare_sample(toy_grid, TOY_CONFIG["m"], rng) for _ in range(20)]


# acceptance criteria register a one-line verdict here; printed at the end of the run
ACCEPTANCE_RESULTS: dict = {}


@pytest.fixture
def verdict():
    def record(number, passed, detail):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}"
        ACCEPTANCE_RESULTS[number] = line
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_RESULTS):
            terminalreporter.write_line(ACCEPTANCE_RESULTS[k])
