"""Smooth group actions on Euclidean chart domains.

An :class:`ActionSpec` bundles a group, a domain predicate and the map
``apply(g_matrix, x) -> x'``.  ``apply`` accepts raw matrices so that the
action extends smoothly off the group (the flow integrator relies on this).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import groups
from .errors import DomainError, UsageError
from .groups import GroupDescriptor, GroupElement

RANK_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class Point:
    coords: np.ndarray
    domain_id: str

    def __post_init__(self):
        c = np.array(self.coords, dtype=float).reshape(-1)
        if not np.all(np.isfinite(c)):
            raise DomainError("point coordinates must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    def __repr__(self):
        return f"Point({self.coords.tolist()}, {self.domain_id!r})"


@dataclass(frozen=True, eq=False)
class ActionSpec:
    """A left action of ``group`` on an open subset of R^m.

    ``jac_x(g, x)`` is the m x m Jacobian of x -> g.x and ``jac_g(g, x)`` the
    m x r Jacobian of c -> (g exp(c)).x at c = 0; both take raw matrices and
    are optional (finite differences are used when absent).

    ``orbit_dim(x)`` is the analytically known orbit dimension, used only by
    verification code.  ``flat_kind`` names the closed-form flat-chart solver
    (see :mod:`lieact.frames`).
    """

    name: str
    group: GroupDescriptor
    manifold_dim: int
    domain_id: str
    domain_predicate: Callable[[np.ndarray], bool]
    apply: Callable[[np.ndarray, np.ndarray], np.ndarray]
    sample_coords: Callable[[np.random.Generator], np.ndarray]
    jac_x: Optional[Callable] = None
    jac_g: Optional[Callable] = None
    known_free: bool = False
    known_regular: bool = False
    known_transitive: bool = False
    orbit_dim: Optional[Callable[[np.ndarray], int]] = None
    orbit_label: Optional[Callable[[np.ndarray], np.ndarray]] = None
    isotropy_sample: Optional[Callable] = None
    flat_kind: Optional[str] = None
    default_point: Optional[tuple] = None
    point_to_matrix: Optional[Callable] = None
    matrix_to_point: Optional[Callable] = None
    special_points: tuple = ()
    description: str = ""

    def __repr__(self):
        return f"ActionSpec({self.name!r})"

    @property
    def has_analytic(self) -> bool:
        return self.jac_x is not None and self.jac_g is not None

    def point(self, coords) -> Point:
        """Build a validated point of this action's domain."""
        p = Point(coords, self.domain_id)
        _check_domain(self, p)
        return p

    def sample_point(self, rng: np.random.Generator) -> Point:
        return Point(self.sample_coords(rng), self.domain_id)


def _check_domain(spec, x: Point):
    if x.domain_id != spec.domain_id:
        raise DomainError(f"point from domain {x.domain_id!r} used with {spec.domain_id!r}")
    if x.coords.shape != (spec.manifold_dim,):
        raise DomainError(
            f"{spec.name} expects {spec.manifold_dim} coordinates, got {x.coords.shape[0]}"
        )
    if not spec.domain_predicate(x.coords):
        raise DomainError(f"point {x.coords.tolist()} is outside domain {spec.domain_id!r}")


def _check_group(spec, g):
    if g.descriptor.name != spec.group.name:
        raise UsageError(f"{spec.name} is an action of {spec.group.name}, got {g.descriptor.name}")


# -- core operations ---------------------------------------------------------

def act(spec: ActionSpec, g: GroupElement, x: Point) -> Point:
    """g . x"""
    _check_group(spec, g)
    _check_domain(spec, x)
    return Point(spec.apply(g.matrix, x.coords), spec.domain_id)


def psi_eval(spec: ActionSpec, x: Point, g: GroupElement) -> Point:
    """The orbit map psi_x(g) = g . x."""
    return act(spec, g, x)


def orbit_sample(spec: ActionSpec, x: Point, n: int, rng_seed: int) -> list:
    """``n`` points g_i . x for seeded random g_i (trial i uses stream (seed, i))."""
    if n < 0:
        raise UsageError("n must be nonnegative")
    out = []
    for i in range(n):
        rng = np.random.default_rng([rng_seed % 2**64, i])
        out.append(act(spec, groups.random_element(spec.group, rng), x))
    return out


def write_orbit_csv(points, path, domain_id: str, manifold_dim: int):
    """CSV with header ``domain_id,i,coord_0..coord_{m-1}``."""
    header = ["domain_id", "i"] + [f"coord_{j}" for j in range(manifold_dim)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i, p in enumerate(points):
            w.writerow([domain_id, i] + [format(float(c), ".17g") for c in p.coords])


# -- differentials -----------------------------------------------------------

def fd_jacobian(f, x, step, fd_order=2):
    """Central-difference Jacobian of ``f`` at ``x`` with absolute step ``step``.

    ``fd_order=4`` applies one Richardson step, (4 D(step/2) - D(step)) / 3.
    """
    if fd_order not in (2, 4):
        raise UsageError(f"fd_order must be 2 or 4, got {fd_order!r}")
    x = np.asarray(x, dtype=float)
    if fd_order == 4:
        return (4 * fd_jacobian(f, x, step / 2) - fd_jacobian(f, x, step)) / 3
    cols = []
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = step
        cols.append((np.asarray(f(x + e)) - np.asarray(f(x - e))) / (2 * step))
    if not cols:
        return np.zeros((np.asarray(f(x)).size, 0))
    return np.column_stack(cols)


def jacobian_x(spec: ActionSpec, g: GroupElement, x: Point, *, analytic=True,
               fd_step=1e-6) -> np.ndarray:
    """m x m Jacobian of x -> g.x."""
    if analytic and spec.jac_x is not None:
        return np.asarray(spec.jac_x(g.matrix, x.coords), dtype=float)
    h = fd_step * (1 + np.linalg.norm(x.coords))
    return fd_jacobian(lambda y: spec.apply(g.matrix, y), x.coords, h)


def jacobian_g(spec: ActionSpec, g: GroupElement, x: Point, *, analytic=True,
               fd_step=1e-6) -> np.ndarray:
    """m x r Jacobian of h -> h.x in the left-trivialized chart centred at g."""
    if analytic and spec.jac_g is not None:
        return np.asarray(spec.jac_g(g.matrix, x.coords), dtype=float).reshape(
            spec.manifold_dim, spec.group.group_dim)

    def f(c):
        return spec.apply(groups.chart_point(c, g).matrix, x.coords)

    return fd_jacobian(f, np.zeros(spec.group.group_dim), fd_step)


def singular_rank(jac: np.ndarray, rel_tol: float = RANK_TOL) -> int:
    """Number of singular values above rel_tol * (largest + 1)."""
    if jac.size == 0:
        return 0
    sv = np.linalg.svd(jac, compute_uv=False)
    return int(np.sum(sv > rel_tol * (sv[0] + 1.0)))


def rank_at(spec: ActionSpec, x: Point, g: Optional[GroupElement] = None, *,
            analytic=True, fd_step=1e-6) -> int:
    """Orbit dimension at g.x, as the numerical rank of d(psi_x) at g."""
    g = spec.group.identity() if g is None else g
    _check_domain(spec, x)
    return singular_rank(jacobian_g(spec, g, x, analytic=analytic, fd_step=fd_step))


@dataclass(frozen=True)
class RankReport:
    ranks: frozenset
    trials: int

    @property
    def passed(self) -> bool:
        return len(self.ranks) == 1


def constant_rank_check(spec: ActionSpec, x: Point, trials: int, rng_seed: int, *,
                        analytic=True) -> RankReport:
    """Rank of psi_x at ``trials`` seeded random group elements."""
    if trials < 2:
        raise UsageError("constant_rank_check needs at least 2 trials")
    ranks = set()
    for i in range(trials):
        rng = np.random.default_rng([rng_seed % 2**64, i])
        ranks.add(rank_at(spec, x, groups.random_element(spec.group, rng),
                          analytic=analytic))
    return RankReport(frozenset(ranks), trials)


def check_points(spec: ActionSpec, X) -> np.ndarray:
    """Validate a sample matrix (n_samples, manifold_dim) against the domain."""
    from sklearn.utils import check_array

    X = check_array(X, dtype=float, ensure_min_samples=1, ensure_min_features=0)
    if X.shape[1] != spec.manifold_dim:
        raise UsageError(
            f"{spec.name} acts on R^{spec.manifold_dim}, got {X.shape[1]} features"
        )
    bad = [i for i, row in enumerate(X) if not spec.domain_predicate(row)]
    if bad:
        raise DomainError(f"rows {bad[:5]} lie outside domain {spec.domain_id!r}")
    return X


# -- builtin catalog ---------------------------------------------------------

def _linear(name, group, domain_id, pred, sampler, **kw):
    """G <= GL(m) acting on R^m by matrix-vector product."""
    basis = np.stack(group.algebra_basis)

    def jac_g(gm, x):
        return np.column_stack([gm @ b @ x for b in basis])

    return ActionSpec(
        name=name, group=group, manifold_dim=group.matrix_dim, domain_id=domain_id,
        domain_predicate=pred, apply=lambda gm, x: gm @ x, sample_coords=sampler,
        jac_x=lambda gm, x: np.array(gm, dtype=float), jac_g=jac_g, **kw)


def _affine(name, group, domain_id, pred, sampler, **kw):
    """Homogeneous (m+1)x(m+1) matrices acting on R^m."""
    m = group.matrix_dim - 1
    basis = np.stack(group.algebra_basis)

    def apply(gm, x):
        return gm[:m, :m] @ x + gm[:m, m]

    def jac_g(gm, x):
        xh = np.append(x, 1.0)
        return np.column_stack([(gm @ b @ xh)[:m] for b in basis])

    return ActionSpec(
        name=name, group=group, manifold_dim=m, domain_id=domain_id,
        domain_predicate=pred, apply=apply, sample_coords=sampler,
        jac_x=lambda gm, x: np.array(gm[:m, :m], dtype=float), jac_g=jac_g, **kw)


def _self_action(name, group, to_matrix, to_point, pred, sampler, **kw):
    """Left multiplication of G on itself, in a global parameter chart of G."""
    return ActionSpec(
        name=name, group=group, manifold_dim=group.group_dim, domain_id=name,
        domain_predicate=pred,
        apply=lambda gm, x: to_point(gm @ to_matrix(x)),
        sample_coords=sampler, known_free=True, known_regular=True,
        known_transitive=True, orbit_dim=lambda x: group.group_dim,
        flat_kind="self", point_to_matrix=to_matrix, matrix_to_point=to_point,
        **kw)


def _nonzero(x):
    return bool(np.all(np.isfinite(x)) and np.linalg.norm(x) > 1e-12)


def _finite(x):
    return bool(np.all(np.isfinite(x)))


def _annulus_sampler(m):
    def sample(rng):
        d = rng.normal(size=m)
        d /= np.linalg.norm(d)
        return d * rng.uniform(0.3, 3.0)
    return sample


def _gauss_sampler(m, scale=1.5):
    return lambda rng: rng.normal(scale=scale, size=m)


def _se2_isotropy(x, rng):
    # rotations about x: T(x) R(th) T(-x)
    th = rng.uniform(-3.0, 3.0)
    c, s = math.cos(th), math.sin(th)
    rot = np.array([[c, -s], [s, c]])
    m = np.eye(3)
    m[:2, :2] = rot
    m[:2, 2] = x - rot @ x
    return m


def _so2_isotropy(x, rng):
    if np.linalg.norm(x) > 1e-12:
        return np.eye(2)
    th = rng.uniform(-3.0, 3.0)
    c, s = math.cos(th), math.sin(th)
    return np.array([[c, -s], [s, c]])


def _affine_isotropy(x, rng):
    # x -> a (y - x) + x fixes x
    a = math.exp(rng.normal())
    return np.array([[a, x[0] * (1 - a)], [0.0, 1.0]])


def _so3_isotropy(x, rng):
    nrm = np.linalg.norm(x)
    if nrm < 1e-12:
        return groups.random_element(groups.so3(), rng).matrix
    axis = x / nrm
    return groups.chart_point(axis * rng.uniform(-3.0, 3.0),
                              groups.so3().identity()).matrix


def _build_catalog():
    so2, so3, se2 = groups.so2(), groups.so3(), groups.se2()
    aff = groups.axplusb()
    specs = [
        _linear("so2-r2-punctured", so2, "r2-punctured", _nonzero, _annulus_sampler(2),
                known_free=True, known_regular=True, orbit_dim=lambda x: 1,
                orbit_label=lambda x: np.array([np.linalg.norm(x)]),
                flat_kind="rotation_plane", default_point=(1.0, 0.0),
                description="rotations of the punctured plane"),
        _linear("so2-r2", so2, "r2", _finite, _gauss_sampler(2),
                orbit_dim=lambda x: int(np.linalg.norm(x) > 0),
                isotropy_sample=_so2_isotropy, default_point=(1.0, 0.0),
                special_points=((0.0, 0.0),),
                description="rotations of the plane (origin fixed)"),
        _linear("so3-r3", so3, "r3", _finite, _gauss_sampler(3),
                orbit_dim=lambda x: 2 if np.linalg.norm(x) > 0 else 0,
                isotropy_sample=_so3_isotropy, default_point=(1.0, 0.0, 0.0),
                special_points=((0.0, 0.0, 0.0),),
                description="rotations of space (not free)"),
        _affine("se2-r2", se2, "r2", _finite, _gauss_sampler(2),
                known_transitive=True, known_regular=True, orbit_dim=lambda x: 2,
                isotropy_sample=_se2_isotropy, default_point=(1.0, 0.0),
                description="rigid motions of the plane (transitive, not free)"),
        _affine("affine-r1", aff, "r1", _finite, _gauss_sampler(1),
                known_transitive=True, known_regular=True, orbit_dim=lambda x: 1,
                isotropy_sample=_affine_isotropy, default_point=(0.0,),
                description="x -> a x + b on the line (transitive, not free)"),
        _affine("scaling2-r2-punctured", groups.scaling(2), "r2-punctured", _nonzero,
                _annulus_sampler(2), known_free=True, known_regular=True,
                orbit_dim=lambda x: 1,
                orbit_label=lambda x: np.array([math.atan2(x[1], x[0])]),
                flat_kind="scaling", default_point=(1.0, 0.0),
                description="positive dilations of the punctured plane"),
    ]
    for m in (1, 2, 3):
        specs.append(_affine(
            f"translations{m}-r{m}", groups.translations(m), f"r{m}", _finite,
            _gauss_sampler(m), known_free=True, known_regular=True,
            known_transitive=True, orbit_dim=lambda x, m=m: m,
            flat_kind="translation", default_point=(0.0,) * m,
            description=f"translations of R^{m}"))

    def t2_mat(p):
        m = np.eye(3)
        m[:2, 2] = p
        return m

    def aff_mat(p):
        return np.array([[p[0], p[1]], [0.0, 1.0]])

    def sc_mat(p):
        return np.array([[p[0], 0.0], [0.0, 1.0]])

    specs += [
        _self_action("translations2-self", groups.translations(2), t2_mat,
                     lambda m: np.array(m[:2, 2], dtype=float), _finite,
                     _gauss_sampler(2), default_point=(0.0, 0.0),
                     description="Translations(2) acting on itself"),
        _self_action("affine-self", aff, aff_mat,
                     lambda m: np.array([m[0, 0], m[0, 1]], dtype=float),
                     lambda p: bool(np.all(np.isfinite(p)) and p[0] > 0),
                     lambda rng: np.array([math.exp(rng.normal(scale=0.7)),
                                           rng.normal()]),
                     default_point=(1.0, 0.0),
                     description="AxPlusB acting on itself"),
        _self_action("scaling1-self", groups.scaling(1), sc_mat,
                     lambda m: np.array([m[0, 0]], dtype=float),
                     lambda p: bool(np.all(np.isfinite(p)) and p[0] > 0),
                     lambda rng: np.array([math.exp(rng.normal(scale=0.7))]),
                     default_point=(1.0,),
                     description="Scaling(1) acting on itself"),
    ]
    return {s.name: s for s in specs}


_CATALOG = _build_catalog()


def builtin_action(name: str) -> ActionSpec:
    try:
        return _CATALOG[name]
    except KeyError:
        raise UsageError(f"unknown action {name!r}; known: {sorted(_CATALOG)}") from None


def builtin_actions() -> dict:
    return dict(sorted(_CATALOG.items()))
