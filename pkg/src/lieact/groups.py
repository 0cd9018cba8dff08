"""Matrix Lie groups: group law, translation maps, exponential and local charts.

Every group is a closed subgroup of GL(n) described by a :class:`GroupDescriptor`.
Elements are immutable :class:`GroupElement` values; all operations are pure.

Local coordinates are left-trivialized exponential coordinates::

    chart_point(c, center) = center @ expm(sum_i c[i] * basis[i])

so the differential of a left translation is the identity in coordinates.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import expm as _scipy_expm
from scipy.linalg import logm as _scipy_logm

from .errors import (
    ChartDomainError,
    NotInGroupError,
    NumericalDegradationError,
    UsageError,
)

SIDES = ("left", "right", "conjugate")


def _unit(n, i, j):
    m = np.zeros((n, n))
    m[i, j] = 1.0
    return m


@dataclass(frozen=True, eq=False)
class GroupDescriptor:
    """Static description of a matrix Lie group.

    ``kind`` selects the defining relations, projection and closed-form
    logarithm; it is one of ``rotation``, ``translation``, ``euclidean``,
    ``affine_line``, ``scaling`` or ``generic``.
    """

    name: str
    matrix_dim: int
    group_dim: int
    algebra_basis: tuple
    kind: str = "generic"
    membership_tol: float = 1e-9
    chart_radius: float = math.inf
    radius_index: tuple = ()
    abelian: bool = False
    _vee_op: np.ndarray = field(init=False, repr=False)
    _basis_flat: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        basis = tuple(np.asarray(b, dtype=float) for b in self.algebra_basis)
        n, r = self.matrix_dim, self.group_dim
        if len(basis) != r:
            raise UsageError(f"{self.name}: expected {r} basis matrices, got {len(basis)}")
        if any(b.shape != (n, n) for b in basis):
            raise UsageError(f"{self.name}: basis matrices must be {n}x{n}")
        flat = np.stack([b.ravel() for b in basis])
        if np.linalg.matrix_rank(flat) != r:
            raise UsageError(f"{self.name}: algebra basis is linearly dependent")
        object.__setattr__(self, "algebra_basis", basis)
        object.__setattr__(self, "_vee_op", np.linalg.pinv(flat.T))
        object.__setattr__(self, "_basis_flat", flat)

    def __repr__(self):
        return f"GroupDescriptor({self.name!r}, n={self.matrix_dim}, r={self.group_dim})"

    # -- algebra coordinates -------------------------------------------------
    def hat(self, coords) -> np.ndarray:
        coords = np.asarray(coords, dtype=float).reshape(self.group_dim)
        n = self.matrix_dim
        return (coords @ self._basis_flat).reshape(n, n)

    def vee(self, matrix) -> np.ndarray:
        return self._vee_op @ np.asarray(matrix, dtype=float).ravel()

    # -- membership ----------------------------------------------------------
    def membership_residual(self, m: np.ndarray) -> float:
        """Violation of the defining relations (0 for exact members)."""
        n = self.matrix_dim
        if not math.isfinite(m.sum()):
            return math.inf
        if abs(_det(m)) <= self.membership_tol:
            return math.inf
        k = self.kind
        if k == "rotation":
            return _rotation_residual(m)
        if k == "generic":
            return 0.0
        res = float(np.abs(m[-1] - _eye(n)[-1]).max())
        top = m[:-1, :-1]
        if k == "translation":
            res += float(np.abs(top - _eye(n - 1)).max())
        elif k == "euclidean":
            res += _rotation_residual(top)
        elif k == "affine_line":
            if m[0, 0] <= 0:
                return math.inf
        elif k == "scaling":
            s = float(np.mean(np.diag(top)))
            if s <= 0:
                return math.inf
            res += float(np.abs(top - s * _eye(n - 1)).max())
        return res

    def project(self, m: np.ndarray) -> np.ndarray:
        """Nearest-member correction used to remove accumulated drift."""
        m = np.array(m, dtype=float)
        n = self.matrix_dim
        k = self.kind
        if k == "rotation":
            return _polar(m)
        if k == "generic":
            return m
        m[-1] = 0.0
        m[-1, -1] = 1.0
        if k == "translation":
            m[:-1, :-1] = np.eye(n - 1)
        elif k == "euclidean":
            m[:-1, :-1] = _polar(m[:-1, :-1])
        elif k == "scaling":
            m[:-1, :-1] = np.mean(np.diag(m[:-1, :-1])) * np.eye(n - 1)
        return m

    def identity(self) -> "GroupElement":
        return GroupElement._validated(self, _eye(self.matrix_dim))


def _eye(n, _cache={}):
    e = _cache.get(n)
    if e is None:
        e = _cache[n] = np.eye(n)
        e.setflags(write=False)
    return e


def _det(m):
    # closed forms: np.linalg.det dominates runtime on tiny matrices
    n = m.shape[0]
    if n == 1:
        return float(m[0, 0])
    if n == 2:
        return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    if n == 3:
        return float(m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
                     - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
                     + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0]))
    return float(np.linalg.det(m))


def _rotation_residual(m):
    d = m.shape[0]
    return float(np.abs(m.T @ m - _eye(d)).max() + abs(_det(m) - 1.0))


def _polar(m):
    u, _, vt = np.linalg.svd(m)
    r = u @ vt
    if np.linalg.det(r) < 0:
        u[:, -1] *= -1
        r = u @ vt
    return r


@dataclass(frozen=True, eq=False)
class GroupElement:
    """An element of a matrix Lie group.

    Construction validates the defining relations and raises
    :class:`NotInGroupError` on violation.
    """

    descriptor: GroupDescriptor
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        n = self.descriptor.matrix_dim
        if m.shape != (n, n):
            raise UsageError(f"expected a {n}x{n} matrix for {self.descriptor.name}, got {m.shape}")
        res = self.descriptor.membership_residual(m)
        if not res <= self.descriptor.membership_tol:
            raise NotInGroupError(
                f"matrix is not in {self.descriptor.name} (residual {res:.3g})"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def _validated(cls, descriptor, m):
        # m has already passed the membership check
        g = object.__new__(cls)
        m = np.array(m, dtype=float)
        m.setflags(write=False)
        object.__setattr__(g, "descriptor", descriptor)
        object.__setattr__(g, "matrix", m)
        return g

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return multiply(self, other)

    @property
    def inv(self) -> "GroupElement":
        return inverse(self)

    def __repr__(self):
        return f"GroupElement({self.descriptor.name}, {self.matrix.tolist()})"


def element(desc: GroupDescriptor, m: np.ndarray) -> GroupElement:
    """Wrap a computed matrix, re-projecting if it drifted off the group."""
    m = np.asarray(m, dtype=float)
    if m.shape != (desc.matrix_dim, desc.matrix_dim):
        raise UsageError(f"expected a {desc.matrix_dim}x{desc.matrix_dim} matrix for {desc.name}")
    res = desc.membership_residual(m)
    if res > desc.membership_tol / 10:
        m = desc.project(m)
        res = desc.membership_residual(m)
    if not res <= desc.membership_tol:
        raise NumericalDegradationError(
            f"result left {desc.name} (residual {res:.3g})"
        )
    return GroupElement._validated(desc, m)


@dataclass(frozen=True, eq=False)
class AlgebraVector:
    """A tangent vector at the identity, stored by its basis coefficients."""

    descriptor: GroupDescriptor
    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=float).reshape(-1)
        if c.shape != (self.descriptor.group_dim,):
            raise UsageError(
                f"{self.descriptor.name} algebra has dimension {self.descriptor.group_dim}"
            )
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @property
    def matrix(self) -> np.ndarray:
        return self.descriptor.hat(self.coords)

    @classmethod
    def from_matrix(cls, descriptor: GroupDescriptor, matrix) -> "AlgebraVector":
        matrix = np.asarray(matrix, dtype=float)
        coords = descriptor.vee(matrix)
        err = np.max(np.abs(descriptor.hat(coords) - matrix))
        if err > descriptor.membership_tol:
            raise UsageError(f"matrix is not in the Lie algebra of {descriptor.name}")
        return cls(descriptor, coords)


# -- group law ---------------------------------------------------------------

def _same(g, h):
    if g.descriptor is not h.descriptor and g.descriptor.name != h.descriptor.name:
        raise UsageError(
            f"descriptor mismatch: {g.descriptor.name} vs {h.descriptor.name}"
        )


def multiply(g: GroupElement, h: GroupElement) -> GroupElement:
    _same(g, h)
    return element(g.descriptor, g.matrix @ h.matrix)


def inverse(g: GroupElement) -> GroupElement:
    desc = g.descriptor
    # the inverse of a validated member is a member; skip the recheck
    if desc.kind == "rotation":
        return GroupElement._validated(desc, g.matrix.T)
    if abs(_det(g.matrix)) <= desc.membership_tol:
        raise NumericalDegradationError("near-singular group element")
    return GroupElement._validated(desc, np.linalg.inv(g.matrix))


def translate(g: GroupElement, h: GroupElement, side: str) -> GroupElement:
    """L_g(h) = gh, R_g(h) = hg or C_g(h) = g h g^-1."""
    _same(g, h)
    if side == "left":
        m = g.matrix @ h.matrix
    elif side == "right":
        m = h.matrix @ g.matrix
    elif side == "conjugate":
        m = g.matrix @ h.matrix @ inverse(g).matrix
    else:
        raise UsageError(f"side must be one of {SIDES}, got {side!r}")
    return element(g.descriptor, m)


def distance(g: GroupElement, h: GroupElement) -> float:
    """Frobenius distance between the matrices of two elements."""
    return float(np.linalg.norm(g.matrix - h.matrix))


# -- exponential -------------------------------------------------------------

def expm(a: np.ndarray) -> np.ndarray:
    """Matrix exponential (scipy's scaling-and-squaring Pade approximant)."""
    a = np.asarray(a, dtype=float)
    if not math.isfinite(a.sum()):
        raise UsageError("matrix exponential of non-finite input")
    return _scipy_expm(a)


def exp(v: AlgebraVector, t: float = 1.0) -> GroupElement:
    """The one-parameter subgroup t -> exp(t v)."""
    if not math.isfinite(t):
        raise UsageError("non-finite time in exp")
    return element(v.descriptor, exp_coords(v.descriptor, t * v.coords))


def exp_coords(desc: GroupDescriptor, coords) -> np.ndarray:
    """exp(sum c_i B_i)."""
    return expm(desc.hat(coords))


def closed_form_exp(desc: GroupDescriptor, coords) -> np.ndarray:
    """Closed-form exponential of the builtin kinds (a test oracle for :func:`expm`)."""
    c = np.asarray(coords, dtype=float)
    n = desc.matrix_dim
    k = desc.kind
    if k == "rotation" and n == 2:
        return _rot2(c[0])
    if k == "rotation" and n == 3:
        theta = np.linalg.norm(c)
        w = desc.hat(c)
        if theta < 1e-12:
            return np.eye(3) + w
        return (np.eye(3) + math.sin(theta) / theta * w
                + (1 - math.cos(theta)) / theta**2 * (w @ w))
    if k == "translation":
        m = np.eye(n)
        m[:-1, -1] = c
        return m
    if k == "euclidean":
        th = c[2]
        if abs(th) < 1e-12:
            v = np.eye(2)
        else:
            s, co = math.sin(th), math.cos(th)
            v = np.array([[s, -(1 - co)], [1 - co, s]]) / th
        m = np.eye(3)
        m[:2, :2] = _rot2(th)
        m[:2, 2] = v @ c[:2]
        return m
    if k == "affine_line":
        al, be = c
        factor = 1.0 if al == 0 else math.expm1(al) / al
        return np.array([[math.exp(al), be * factor], [0.0, 1.0]])
    if k == "scaling":
        m = math.exp(c[0]) * np.eye(n)
        m[-1, -1] = 1.0
        return m
    raise UsageError(f"no closed form exponential for {desc.name}")


def _rot2(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


# -- logarithm and charts ----------------------------------------------------

def log(g: GroupElement) -> np.ndarray:
    """Principal logarithm in algebra coordinates.

    Closed forms are used for the builtin kinds; the rotation angle pi in
    SO(3) picks the axis whose first nonzero component is nonnegative.
    """
    return log_matrix(g.descriptor, g.matrix)


def log_matrix(desc: GroupDescriptor, m: np.ndarray) -> np.ndarray:
    """:func:`log` on a raw matrix assumed to lie on the group."""
    k = desc.kind
    if k == "rotation" and desc.matrix_dim == 2:
        return np.array([math.atan2(m[1, 0], m[0, 0])])
    if k == "rotation" and desc.matrix_dim == 3:
        return _so3_log(m)
    if k == "translation":
        return m[:-1, -1].copy()
    if k == "euclidean":
        th = math.atan2(m[1, 0], m[0, 0])
        half = th / 2
        a = 1 - th * th / 12 if abs(th) < 1e-6 else half / math.tan(half)
        vinv = np.array([[a, half], [-half, a]])
        return np.concatenate([vinv @ m[:2, 2], [th]])
    if k == "affine_line":
        al = math.log(m[0, 0])
        factor = 1 - al / 2 if abs(al) < 1e-12 else al / math.expm1(al)
        return np.array([al, m[0, 1] * factor])
    if k == "scaling":
        return np.array([math.log(m[0, 0])])
    return desc.vee(np.real(_scipy_logm(m)))


def _so3_log(r):
    w = 0.5 * np.array([r[2, 1] - r[1, 2], r[0, 2] - r[2, 0], r[1, 0] - r[0, 1]])
    c = (np.trace(r) - 1) / 2
    s = np.linalg.norm(w)
    theta = math.atan2(s, c)
    if theta < 1e-6:
        return (1 + theta * theta / 6) * w
    if math.pi - theta > 1e-4:
        return theta / math.sin(theta) * w
    # near pi: axis from the symmetric part, R + R^T = 2c I + 2(1-c) a a^T
    aat = ((r + r.T) / 2 - c * np.eye(3)) / (1 - c)
    i = int(np.argmax(np.diag(aat)))
    axis = aat[:, i] / math.sqrt(aat[i, i])
    if s > 1e-10:
        if axis @ w < 0:
            axis = -axis
    else:
        nz = axis[np.abs(axis) > 1e-12]
        if nz.size and nz[0] < 0:
            axis = -axis
    return theta * axis


def _check_radius(desc, coords):
    if not desc.radius_index:
        return
    size = float(np.linalg.norm(coords[list(desc.radius_index)]))
    if size >= desc.chart_radius:
        raise ChartDomainError(
            f"{desc.name}: chart coordinates of norm {size:.4g} exceed "
            f"injectivity radius {desc.chart_radius:.4g}"
        )


def chart_point(coords, center: GroupElement) -> GroupElement:
    """center @ exp(sum c_i basis_i)."""
    return element(center.descriptor, chart_matrix(coords, center))


def chart_matrix(coords, center: GroupElement) -> np.ndarray:
    """Unvalidated matrix of :func:`chart_point`, for difference stencils."""
    desc = center.descriptor
    c = np.asarray(coords, dtype=float).reshape(desc.group_dim)
    return center.matrix @ exp_coords(desc, c)


def chart_coords(g: GroupElement, center: GroupElement) -> np.ndarray:
    """Local inverse of :func:`chart_point` inside the injectivity radius."""
    _same(g, center)
    rel = element(g.descriptor, inverse(center).matrix @ g.matrix)
    c = log(rel)
    _check_radius(g.descriptor, c)
    return c


def chart_coords_matrix(m: np.ndarray, center_inv: np.ndarray,
                        desc: GroupDescriptor) -> np.ndarray:
    """Unvalidated :func:`chart_coords` given the inverse of the centre."""
    c = log_matrix(desc, center_inv @ m)
    _check_radius(desc, c)
    return c


def adjoint(g: GroupElement) -> np.ndarray:
    """Matrix of Ad_g = dC_g at e in algebra coordinates (columns vee(g B g^-1))."""
    desc = g.descriptor
    gi = inverse(g).matrix
    return np.column_stack([desc.vee(g.matrix @ b @ gi) for b in desc.algebra_basis])


def random_element(desc: GroupDescriptor, rng: np.random.Generator,
                   scale: float = 1.0) -> GroupElement:
    return chart_point(rng.normal(scale=scale, size=desc.group_dim), desc.identity())


def random_algebra(desc: GroupDescriptor, rng: np.random.Generator,
                   scale: float = 1.0) -> AlgebraVector:
    return AlgebraVector(desc, rng.normal(scale=scale, size=desc.group_dim))


# -- builtin descriptors -----------------------------------------------------

@functools.lru_cache(maxsize=None)
def so2() -> GroupDescriptor:
    return GroupDescriptor("SO(2)", 2, 1, (np.array([[0.0, -1.0], [1.0, 0.0]]),),
                           kind="rotation", chart_radius=math.pi - 0.1,
                           radius_index=(0,), abelian=True)


@functools.lru_cache(maxsize=None)
def so3() -> GroupDescriptor:
    basis = (
        _unit(3, 2, 1) - _unit(3, 1, 2),
        _unit(3, 0, 2) - _unit(3, 2, 0),
        _unit(3, 1, 0) - _unit(3, 0, 1),
    )
    return GroupDescriptor("SO(3)", 3, 3, basis, kind="rotation",
                           chart_radius=math.pi - 0.1, radius_index=(0, 1, 2))


@functools.lru_cache(maxsize=None)
def translations(m: int) -> GroupDescriptor:
    basis = tuple(_unit(m + 1, i, m) for i in range(m))
    return GroupDescriptor(f"Translations({m})", m + 1, m, basis,
                           kind="translation", abelian=True)


@functools.lru_cache(maxsize=None)
def se2() -> GroupDescriptor:
    basis = (_unit(3, 0, 2), _unit(3, 1, 2), _unit(3, 1, 0) - _unit(3, 0, 1))
    return GroupDescriptor("SE(2)", 3, 3, basis, kind="euclidean",
                           chart_radius=math.pi - 0.1, radius_index=(2,))


@functools.lru_cache(maxsize=None)
def axplusb() -> GroupDescriptor:
    """x -> a x + b with a > 0, as [[a, b], [0, 1]]."""
    return GroupDescriptor("AxPlusB", 2, 2, (_unit(2, 0, 0), _unit(2, 0, 1)),
                           kind="affine_line")


@functools.lru_cache(maxsize=None)
def scaling(m: int) -> GroupDescriptor:
    gen = np.eye(m + 1)
    gen[-1, -1] = 0.0
    return GroupDescriptor(f"Scaling({m})", m + 1, 1, (gen,), kind="scaling",
                           abelian=True)


_GROUPS = {
    "so2": so2(),
    "so3": so3(),
    "translations1": translations(1),
    "translations2": translations(2),
    "translations3": translations(3),
    "se2": se2(),
    "axplusb": axplusb(),
    "scaling1": scaling(1),
    "scaling2": scaling(2),
}


def builtin_group(key: str) -> GroupDescriptor:
    """Shared descriptor instances; elements of one group must share one."""
    try:
        return _GROUPS[key]
    except KeyError:
        raise UsageError(f"unknown group {key!r}; known: {sorted(_GROUPS)}") from None


def builtin_groups() -> dict:
    return dict(_GROUPS)


# -- convenience constructors for builtin elements ---------------------------

def rotation2(theta: float) -> GroupElement:
    return GroupElement(builtin_group("so2"), _rot2(theta))


def translation(vec: Sequence[float]) -> GroupElement:
    vec = np.asarray(vec, dtype=float)
    m = np.eye(len(vec) + 1)
    m[:-1, -1] = vec
    return GroupElement(builtin_group(f"translations{len(vec)}"), m)


def affine(a: float, b: float) -> GroupElement:
    return GroupElement(builtin_group("axplusb"), np.array([[a, b], [0.0, 1.0]]))


def euclidean2(theta: float, tx: float, ty: float) -> GroupElement:
    m = np.eye(3)
    m[:2, :2] = _rot2(theta)
    m[:2, 2] = (tx, ty)
    return GroupElement(builtin_group("se2"), m)


def dilation(s: float, m: int = 2) -> GroupElement:
    mat = s * np.eye(m + 1)
    mat[-1, -1] = 1.0
    return GroupElement(builtin_group(f"scaling{m}"), mat)
