import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from lieact import InvariantCoordinates
from lieact.errors import ConstructionError, DomainError


def ring_points(rng, n=20):
    th = rng.uniform(-3, 3, n)
    r = rng.uniform(0.5, 2.0, n)
    return np.column_stack([r * np.cos(th), r * np.sin(th)])


def test_transform_gives_radius(rng):
    X = ring_points(rng)
    est = InvariantCoordinates(anchor=[1.0, 0.0]).fit(X)
    np.testing.assert_allclose(est.transform(X)[:, 0], np.linalg.norm(X, axis=1) - 1,
                               atol=1e-12)


def test_canonicalize_on_section(rng):
    X = ring_points(rng)
    est = InvariantCoordinates(anchor=[1.0, 0.0]).fit(X)
    C = est.canonicalize(X)
    np.testing.assert_allclose(C[:, 1], 0.0, atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(C, axis=1), np.linalg.norm(X, axis=1))
    F = est.frames(X)
    np.testing.assert_allclose(np.einsum("nij,nj->ni", F, X), C, atol=1e-12)


def test_flat_coordinates_round_trip(rng):
    X = ring_points(rng)
    est = InvariantCoordinates(anchor=[1.0, 0.0]).fit(X)
    H, Z = est.flat_coordinates(X)
    th = H[:, 0]
    rad = Z[:, 0] + 1
    np.testing.assert_allclose(np.column_stack([rad * np.cos(th), rad * np.sin(th)]), X,
                               atol=1e-12)


def test_transitive_action_has_no_invariants(rng):
    X = rng.normal(size=(5, 2))
    Z = InvariantCoordinates("translations2-r2").fit_transform(X)
    assert Z.shape == (5, 0)


def test_not_fitted():
    with pytest.raises(NotFittedError):
        InvariantCoordinates().transform([[1.0, 0.0]])


def test_invalid_input():
    with pytest.raises(DomainError):
        InvariantCoordinates().fit([[0.0, 0.0]])
    with pytest.raises(ConstructionError):
        InvariantCoordinates("se2-r2").fit([[1.0, 0.0]])
    est = InvariantCoordinates().fit([[1.0, 0.0]])
    with pytest.raises(ValueError):
        est.inverse_transform([[1.0, 2.0]])


def test_clone_and_params():
    est = InvariantCoordinates("scaling2-r2-punctured", method="newton")
    assert clone(est).get_params() == {"action": "scaling2-r2-punctured", "anchor": None,
                                       "method": "newton"}
