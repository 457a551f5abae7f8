import numpy as np
import pytest

from rkhs_sgd import KernelSpec, MixtureWeights, generate_dataset
from rkhs_sgd.functions import KernelExpansion


@pytest.fixture(scope="session")
def ref_data():
    return generate_dataset(20, 2, 1, 0.1, seed=20260825)


@pytest.fixture(scope="session")
def ref_spec():
    return KernelSpec("gaussian", 1.0, 2)


@pytest.fixture(scope="session")
def ref_weights(ref_data):
    return MixtureWeights(q=0.3, n=ref_data.n)


def random_expansion(gen, spec, out_dim=1, n_centers=5, scale=1.0):
    centers = gen.uniform(-1.0, 1.0, size=(n_centers, spec.dim))
    coeffs = scale * gen.standard_normal(size=(n_centers, out_dim))
    return KernelExpansion(spec, centers, coeffs)
