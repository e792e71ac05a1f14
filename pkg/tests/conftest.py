"""Shared fixtures and random-data helpers for the test suite."""

import numpy as np
import pytest

from manifold_means import backend
from manifold_means.grassmann import stiefel_to_grassmann
from manifold_means.stiefel import StiefelPoint, StiefelTangent, tangent_project


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(params=backend.available_backends())
def kernel_backend(request, monkeypatch):
    """Run the test once per kernel implementation (pure python, compiled)."""
    monkeypatch.setattr(backend, "kernels", backend.get_kernels(request.param))
    return request.param


def random_stiefel(rng, p=10, k=5):
    q, _ = np.linalg.qr(rng.standard_normal((p, k)))
    return StiefelPoint(q)


def random_tangent(rng, u, scale=1.0):
    """Random tangent vector at ``u`` with Frobenius norm ``scale``."""
    xi = tangent_project(u, rng.standard_normal((u.p, u.k)))
    return StiefelTangent(u, (scale / np.linalg.norm(xi.xi)) * xi.xi)


def random_grassmann(rng, p=10, k=5):
    return stiefel_to_grassmann(random_stiefel(rng, p, k))


def perturbed_cloud(rng, center, n, scale=0.3):
    """n Stiefel points scattered around ``center`` by rotation noise."""
    from manifold_means.linalg import expm_skew

    out = []
    for _ in range(n):
        om = rng.standard_normal((center.p, center.p))
        rot = expm_skew(scale * 0.5 * (om - om.T))
        out.append(StiefelPoint(rot @ center.U))
    return out
