"""scikit-learn style front end for flat charts and moving frames."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils import check_array
from sklearn.utils.validation import check_is_fitted

from . import groups
from .actions import Point, builtin_action, check_points
from .frames import build_cross_section, flat_chart, moving_frame


class InvariantCoordinates(TransformerMixin, BaseEstimator):
    """Map points of M to invariant coordinates of a builtin free action.

    ``fit`` builds a normal cross-section through ``anchor`` (the first sample
    when ``anchor`` is None) and the flat chart on it.  ``transform`` returns
    the z-coordinates, which are constant along orbits; ``inverse_transform``
    returns the canonical orbit representatives on the cross-section.

    Parameters
    ----------
    action : str
        Name of a builtin action, e.g. ``"so2-r2-punctured"``.
    anchor : array-like of shape (manifold_dim,), optional
    method : {"auto", "analytic", "newton"}
    """

    def __init__(self, action="so2-r2-punctured", anchor=None, method="auto"):
        self.action = action
        self.anchor = anchor
        self.method = method

    def fit(self, X, y=None):
        spec = builtin_action(self.action)
        X = check_points(spec, X)
        anchor = X[0] if self.anchor is None else np.asarray(self.anchor, dtype=float)
        x0 = spec.point(anchor)
        self.spec_ = spec
        self.section_ = build_cross_section(spec, x0)
        self.chart_ = flat_chart(spec, self.section_, method=self.method)
        self.n_features_in_ = spec.manifold_dim
        self.n_invariants_ = self.section_.param_dim
        return self

    def _points(self, X):
        check_is_fitted(self, "chart_")
        X = check_points(self.spec_, X)
        return [Point(row, self.spec_.domain_id) for row in X]

    def transform(self, X):
        pts = self._points(X)
        out = np.empty((len(pts), self.n_invariants_))
        for i, p in enumerate(pts):
            out[i] = self.chart_.to_flat(p)[1]
        return out

    def inverse_transform(self, Z):
        check_is_fitted(self, "chart_")
        Z = check_array(Z, dtype=float, ensure_min_features=0)
        if Z.shape[1] != self.n_invariants_:
            raise ValueError(f"expected {self.n_invariants_} invariant columns, got {Z.shape[1]}")
        return np.array([self.section_.embed_coords(z) for z in Z]).reshape(
            len(Z), self.n_features_in_)

    def frames(self, X):
        """Moving frames rho(x) as an array of shape (n_samples, n, n)."""
        return np.stack([moving_frame(self.chart_, p).matrix for p in self._points(X)])

    def flat_coordinates(self, X):
        """(H, Z): principal log coordinates of the group part, and z."""
        pts = self._points(X)
        H = np.empty((len(pts), self.spec_.group.group_dim))
        Z = np.empty((len(pts), self.n_invariants_))
        for i, p in enumerate(pts):
            h, z = self.chart_.to_flat(p)
            H[i] = groups.log(h)
            Z[i] = z
        return H, Z

    def canonicalize(self, X):
        """rho(x).x for every row: the representative of x on the cross-section."""
        return self.inverse_transform(self.transform(X))
