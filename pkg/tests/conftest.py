import numpy as np
import pytest

import ptvortex as pv


@pytest.fixture(scope="session")
def basis11():
    return pv.build_basis(11)


@pytest.fixture(scope="session")
def run_grid():
    return pv.default_grid()


@pytest.fixture(scope="session")
def solve_cached(basis11):
    """Memoized stationary solves keyed by (label, g, kind, gamma, d)."""
    cache = {}

    def factory(label, g=1.0, kind="A", gamma=0.0, d=1.0):
        key = (label, g, kind, gamma, d)
        if key not in cache:
            spec = pv.PotentialSpec(kind, d=d, gamma=gamma)
            if gamma == 0.0:
                state = pv.solve_stationary(pv.initial_guess(label, basis11), g, spec,
                                            basis11, label=pv.BranchLabel(label))
            else:
                values = np.round(np.arange(0.0, gamma + 1e-9, 0.25), 10)
                if values[-1] != gamma:
                    values = np.append(values, gamma)
                branch = pv.continue_branch(label, g, spec, "gamma", values, basis11)
                if abs(branch.samples[-1][0] - gamma) > 1e-12:
                    raise RuntimeError(f"branch {key} ended early at {branch.samples[-1][0]}")
                state = branch.samples[-1][1]
            cache[key] = state
        return cache[key]

    return factory
