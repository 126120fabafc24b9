import numpy as np
import pytest

from sparsesvm.data import DesignMatrix
from sparsesvm.objective import PenaltyWeights
from sparsesvm.sparsity import SparsityConstraint


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_problem(rng, n, p, k, rho=1.0):
    """Random design with +/-1 labels and matching penalty weights."""
    X = rng.standard_normal((n, p))
    y = np.where(rng.standard_normal(n) > 0, 1.0, -1.0)
    design = DesignMatrix.from_features(X, y)
    constraint = SparsityConstraint(k=k, p=p)
    weights = PenaltyWeights.for_problem(n, constraint, rho)
    return design, constraint, weights


def random_beta(rng, p):
    return rng.standard_normal(p + 1)
