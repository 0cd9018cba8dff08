"""Invariant vector fields on G, their conjugates and transport to M.

Tangent vectors on G are written in the left-trivialized chart centred at
their base point (:class:`GroupTangent`); tangent vectors on M are plain
component vectors in the global chart (:class:`TangentVec`).  Every
differential is computed through :func:`differential`, which uses an analytic
Jacobian when the map carries one and central differences otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import groups
from .actions import (
    ActionSpec,
    Point,
    act,
    fd_jacobian,
    jacobian_g,
)
from .errors import DomainError, UsageError
from .groups import AlgebraVector, GroupElement, adjoint, chart_coords, chart_point


@dataclass(frozen=True, eq=False)
class GroupTangent:
    base: GroupElement
    coords: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        """The tangent as an ambient matrix, base @ hat(coords)."""
        return self.base.matrix @ self.base.descriptor.hat(self.coords)


@dataclass(frozen=True, eq=False)
class TangentVec:
    base: Point
    components: np.ndarray


@dataclass(frozen=True, eq=False)
class InvariantField:
    """Left- or right-invariant field determined by its value at the identity."""

    seed: AlgebraVector
    side: str = "left"

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise UsageError(f"side must be 'left' or 'right', got {self.side!r}")

    @property
    def descriptor(self):
        return self.seed.descriptor


@dataclass(frozen=True)
class ChartMap:
    """A smooth map written in local coordinates, with optional Jacobian."""

    func: Callable[[np.ndarray], np.ndarray]
    jac: Optional[Callable[[np.ndarray], np.ndarray]] = None


def jacobian(fmap: ChartMap, at, *, analytic=True, fd_step=1e-6) -> np.ndarray:
    at = np.asarray(at, dtype=float)
    if analytic and fmap.jac is not None:
        return np.asarray(fmap.jac(at), dtype=float)
    h = fd_step * (1 + np.linalg.norm(at))
    try:
        return fd_jacobian(fmap.func, at, h)
    except DomainError as exc:
        raise DomainError(f"map undefined inside the difference stencil: {exc}") from exc


def differential(fmap: ChartMap, at, direction, *, analytic=True, fd_step=1e-6):
    """Pushforward of ``direction`` at ``at``."""
    return jacobian(fmap, at, analytic=analytic, fd_step=fd_step) @ np.asarray(
        direction, dtype=float)


# -- chart representations of the standard maps -----------------------------

def group_map_chart(F: Callable[[GroupElement], GroupElement], at: GroupElement,
                    jac=None) -> ChartMap:
    """F: G -> G in the charts centred at ``at`` and ``F(at)``."""
    target = F(at)
    return ChartMap(lambda c: chart_coords(F(chart_point(c, at)), target), jac)


def translation_chart(g: GroupElement, side: str, at: GroupElement) -> ChartMap:
    """L_g, R_g or C_g near ``at``.

    In left-trivialized charts dL_g = I, dR_g = Ad(g^-1) and dC_g = Ad(g),
    independently of the base point.
    """
    if side == "left":
        jac = np.eye(g.descriptor.group_dim)
    elif side == "right":
        jac = adjoint(g.inv)
    elif side == "conjugate":
        jac = adjoint(g)
    else:
        raise UsageError(f"unknown side {side!r}")
    desc = g.descriptor
    gm = g.matrix
    cache = {}

    def func(c):
        # raw matrices: stencil points need no membership validation
        if not cache:
            cache["gi"] = g.inv.matrix
            cache["target_inv"] = groups.translate(g, at, side).inv.matrix
        m = groups.chart_matrix(c, at)
        if side == "left":
            m = gm @ m
        elif side == "right":
            m = m @ gm
        else:
            m = gm @ m @ cache["gi"]
        return groups.chart_coords_matrix(m, cache["target_inv"], desc)

    return ChartMap(func, lambda c: jac)


def psi_chart(spec: ActionSpec, x: Point, g: GroupElement, *, fd_step=1e-6) -> ChartMap:
    """psi_x near g: chart coordinates on G to global coordinates on M."""
    def func(c):
        return spec.apply(groups.chart_matrix(c, g), x.coords)

    jac = None
    if spec.jac_g is not None:
        # evaluated only at the chart centre c = 0
        jac = lambda c: jacobian_g(spec, g, x)  # noqa: E731
    return ChartMap(func, jac)


def phi_chart(spec: ActionSpec, g: GroupElement) -> ChartMap:
    """phi_g: M -> M in global coordinates."""
    jac = None
    if spec.jac_x is not None:
        jac = lambda y: spec.jac_x(g.matrix, y)  # noqa: E731
    return ChartMap(lambda y: spec.apply(g.matrix, y), jac)


# -- fields on G -------------------------------------------------------------

def field_at(f: InvariantField, g: GroupElement, *, analytic=True,
             fd_step=1e-6) -> GroupTangent:
    """v_L|g = dL_g(v|e) or v_R|g = dR_g(v|e)."""
    e = f.descriptor.identity()
    dmap = translation_chart(g, f.side, e)
    coords = differential(dmap, np.zeros(f.descriptor.group_dim), f.seed.coords,
                          analytic=analytic, fd_step=fd_step)
    return GroupTangent(g, coords)


def curve_velocity(curve: Callable[[float], GroupElement], base: GroupElement,
                   step=1e-5) -> np.ndarray:
    """d/dt at t=0 of a group curve through ``base``, in the chart at ``base``."""
    return (chart_coords(curve(step), base) - chart_coords(curve(-step), base)) / (2 * step)


def conjugate_field(f: InvariantField, g: GroupElement, *, analytic=True,
                    fd_step=1e-6) -> InvariantField:
    """The g-conjugate: same side, seeded by dC_g(v|e)."""
    e = f.descriptor.identity()
    seed = differential(translation_chart(g, "conjugate", e),
                        np.zeros(f.descriptor.group_dim), f.seed.coords,
                        analytic=analytic, fd_step=fd_step)
    return InvariantField(AlgebraVector(f.descriptor, seed), f.side)


# -- transport to M ----------------------------------------------------------

def transport(spec: ActionSpec, f: InvariantField, x: Point, g: GroupElement, *,
              analytic=True, fd_step=1e-6) -> TangentVec:
    """d(psi_x)(v|g), based at g.x.

    For a right field this is the infinitesimal generator of v at g.x; for a
    left field it is the value of the base-point field v^x at g.x.
    """
    tangent = field_at(f, g, analytic=analytic, fd_step=fd_step)
    comps = differential(psi_chart(spec, x, g), np.zeros(spec.group.group_dim),
                         tangent.coords, analytic=analytic, fd_step=fd_step)
    return TangentVec(act(spec, g, x), comps)


def generator(spec: ActionSpec, v: AlgebraVector, y: Point, *, step=1e-5) -> np.ndarray:
    """d/dt exp(tv).y at t=0, by differencing along the curve itself."""
    plus = act(spec, groups.exp(v, step), y).coords
    minus = act(spec, groups.exp(v, -step), y).coords
    return (plus - minus) / (2 * step)


def push_phi(spec: ActionSpec, g: GroupElement, tv: TangentVec, *, analytic=True,
             fd_step=1e-6) -> TangentVec:
    """d(phi_g) applied to a tangent vector of M."""
    comps = differential(phi_chart(spec, g), tv.base.coords, tv.components,
                         analytic=analytic, fd_step=fd_step)
    return TangentVec(act(spec, g, tv.base), comps)


def push_group(g: GroupElement, side: str, t: GroupTangent, *, analytic=True,
               fd_step=1e-6) -> GroupTangent:
    """dL_g, dR_g or dC_g applied to a tangent vector of G."""
    dmap = translation_chart(g, side, t.base)
    coords = differential(dmap, np.zeros(g.descriptor.group_dim), t.coords,
                          analytic=analytic, fd_step=fd_step)
    return GroupTangent(groups.translate(g, t.base, side), coords)


# -- identity residuals ------------------------------------------------------

CHECK_REFS = {
    "eq4_left_from_right": "Lemma 2.1, Eq (4): v_L|g = dC_g(v_R|g)",
    "eq4_right_from_left": "Lemma 2.1, Eq (4): v_R|g = dC_{g^-1}(v_L|g)",
    "prop2_2_conjugate_right_invariant": "Prop 2.2: dC_g preserves right invariance",
    "eq3_left_curve": "Eq (3): left field equals d/dt g exp(tv)",
    "eq3_right_curve": "Eq (3): right field equals d/dt exp(tv) g",
    "eq6_generator": "Eq (6)/(5): d psi_x(v_R|g) = v_R at g.x",
    "lemma2_3_base_point": "Lemma 2.3: d psi_y(v_R|h) = d psi_x(v_R|hg), y = g.x",
    "eq10_right_conjugate": "Prop 2.9, Eq (10): (v_R^g)|g = v_L|g",
    "eq10_left_conjugate": "Prop 2.9, Eq (10): (v_L^g)|g = dC_g(v_L|g)",
    "eq11_g_invariance": "Prop 2.11, Eq (11): v^x|g.x = d phi_g(v^x|x)",
    "prop2_11_curve": "Prop 2.11: v^x|g.x = d/dt g exp(tv).x",
    "thm2_12_first": "Thm 2.12(ii): v^x|hg.x = (v^g)^{g.x}|hg.x",
    "thm2_12_second": "Thm 2.12(ii): v^{g.x}|hg.x = (v^{g^-1})^x|hg.x",
    "differential_linearity": "d(psi_x) is linear in the direction",
}


GROUP_CHECKS = ("eq4_left_from_right", "eq4_right_from_left",
                "prop2_2_conjugate_right_invariant", "eq10_right_conjugate",
                "eq10_left_conjugate", "eq3_left_curve", "eq3_right_curve")
MANIFOLD_CHECKS = ("eq6_generator", "lemma2_3_base_point", "eq11_g_invariance",
                   "thm2_12_first", "thm2_12_second", "differential_linearity",
                   "prop2_11_curve")


def group_residuals(f: InvariantField, samples, *, analytic=True, fd_step=1e-6,
                    curve_checks=True, only=None) -> dict:
    """Residuals of the identities that live on G alone.

    ``samples`` is an iterable of (g, h, k) triples; returns check -> max residual.
    ``only`` restricts the computation to a subset of check names.
    """
    v = f.seed
    left = InvariantField(v, "left")
    right = InvariantField(v, "right")
    kw = dict(analytic=analytic, fd_step=fd_step)
    keys = [k for k in GROUP_CHECKS if only is None or k in only]
    if not curve_checks:
        keys = [k for k in keys if "curve" not in k]
    out = {k: 0.0 for k in keys}
    if not out:
        return out

    def upd(key, val):
        out[key] = max(out[key], float(val))

    for g, h, k in samples:
        vl = field_at(left, g, **kw)
        vr = field_at(right, g, **kw)
        if "eq4_left_from_right" in out:
            upd("eq4_left_from_right",
                np.linalg.norm(vl.coords - push_group(g, "conjugate", vr, **kw).coords))
        if "eq4_right_from_left" in out:
            upd("eq4_right_from_left",
                np.linalg.norm(vr.coords - push_group(g.inv, "conjugate", vl, **kw).coords))
        if "prop2_2_conjugate_right_invariant" in out or "eq10_right_conjugate" in out:
            w = conjugate_field(right, g, **kw)
        if "prop2_2_conjugate_right_invariant" in out:
            wk = field_at(w, k, **kw)
            lhs = push_group(h, "right", wk, **kw)
            rhs = field_at(w, k @ h, **kw)
            upd("prop2_2_conjugate_right_invariant", np.linalg.norm(lhs.coords - rhs.coords))
        if "eq10_right_conjugate" in out:
            upd("eq10_right_conjugate",
                np.linalg.norm(field_at(w, g, **kw).coords - vl.coords))
        if "eq10_left_conjugate" in out:
            wl = conjugate_field(left, g, **kw)
            upd("eq10_left_conjugate",
                np.linalg.norm(field_at(wl, g, **kw).coords
                               - push_group(g, "conjugate", vl, **kw).coords))
        if "eq3_left_curve" in out:
            cl = curve_velocity(lambda t: g @ groups.exp(v, t), g)
            upd("eq3_left_curve", np.linalg.norm(vl.coords - cl))
        if "eq3_right_curve" in out:
            cr = curve_velocity(lambda t: groups.exp(v, t) @ g, g)
            upd("eq3_right_curve", np.linalg.norm(vr.coords - cr))
    return out


def identity_residuals(spec: ActionSpec, f: InvariantField, samples, *, analytic=True,
                       fd_step=1e-6, curve_checks=True, rng=None, only=None) -> dict:
    """Residuals of the transport identities on M.

    ``samples`` is an iterable of (g, h, x).  Only the seed vector of ``f`` is
    used; both sides are exercised.  Returns check -> max residual; the group
    identities of :func:`group_residuals` are included.  ``only`` restricts
    the computation to a subset of check names.
    """
    samples = list(samples)
    out = group_residuals(f, [(g, h, h @ g) for g, h, _ in samples],
                          analytic=analytic, fd_step=fd_step, curve_checks=curve_checks,
                          only=only)
    v = f.seed
    left = InvariantField(v, "left")
    right = InvariantField(v, "right")
    kw = dict(analytic=analytic, fd_step=fd_step)
    keys = [k for k in MANIFOLD_CHECKS if only is None or k in only]
    if not curve_checks:
        keys = [k for k in keys if k != "prop2_11_curve"]
    out.update({k: 0.0 for k in keys})
    if not keys:
        return out

    def want(key):
        return key in keys
    rng = rng if rng is not None else np.random.default_rng(0)

    def upd(key, val):
        out[key] = max(out[key], float(val))

    e = spec.group.identity()
    for g, h, x in samples:
        gx = act(spec, g, x)
        hg = h @ g
        if want("eq6_generator"):
            # transported right field against the generator evaluated at g.x
            tr = transport(spec, right, x, g, **kw)
            if analytic and spec.jac_g is not None:
                # closed-form generator: d/dt exp(tv).y = J_g(I, y) v
                gen = spec.jac_g(np.eye(spec.group.matrix_dim), gx.coords) @ v.coords
            else:
                gen = generator(spec, v, gx)
            upd("eq6_generator", np.linalg.norm(tr.components - gen))
        if want("lemma2_3_base_point"):
            a = transport(spec, right, gx, h, **kw).components
            b = transport(spec, right, x, hg, **kw).components
            upd("lemma2_3_base_point", np.linalg.norm(a - b))
        if want("eq11_g_invariance") or want("prop2_11_curve"):
            at_gx = transport(spec, left, x, g, **kw)
        if want("eq11_g_invariance"):
            at_x = transport(spec, left, x, e, **kw)
            upd("eq11_g_invariance",
                np.linalg.norm(at_gx.components - push_phi(spec, g, at_x, **kw).components))
        if want("prop2_11_curve"):
            upd("prop2_11_curve",
                np.linalg.norm(at_gx.components - _orbit_curve_velocity(spec, g, v, x)))
        if want("thm2_12_first"):
            vg = conjugate_field(left, g, **kw)
            lhs = transport(spec, left, x, hg, **kw).components
            rhs = transport(spec, vg, gx, h, **kw).components
            upd("thm2_12_first", np.linalg.norm(lhs - rhs))
        if want("thm2_12_second"):
            vgi = conjugate_field(left, g.inv, **kw)
            lhs = transport(spec, left, gx, h, **kw).components
            rhs = transport(spec, vgi, x, hg, **kw).components
            upd("thm2_12_second", np.linalg.norm(lhs - rhs))
        if want("differential_linearity"):
            u, w = rng.normal(size=(2, spec.group.group_dim))
            a_, b_ = rng.normal(size=2)
            pc = psi_chart(spec, x, g)
            zero = np.zeros(spec.group.group_dim)
            combo = differential(pc, zero, a_ * u + b_ * w, **kw)
            sep = (a_ * differential(pc, zero, u, **kw)
                   + b_ * differential(pc, zero, w, **kw))
            upd("differential_linearity", np.linalg.norm(combo - sep))
    return out


def _orbit_curve_velocity(spec, g, v, x, step=1e-5):
    plus = act(spec, g @ groups.exp(v, step), x).coords
    minus = act(spec, g @ groups.exp(v, -step), x).coords
    return (plus - minus) / (2 * step)


def right_field_invariance_defect(spec: ActionSpec, v: AlgebraVector, g: GroupElement,
                                  x: Point, *, analytic=True, fd_step=1e-6) -> float:
    """||v_R|g.x - d phi_g(v_R|x)||: generally nonzero for non-abelian G."""
    right = InvariantField(v, "right")
    e = spec.group.identity()
    at_gx = transport(spec, right, act(spec, g, x), e, analytic=analytic, fd_step=fd_step)
    at_x = transport(spec, right, x, e, analytic=analytic, fd_step=fd_step)
    pushed = push_phi(spec, g, at_x, analytic=analytic, fd_step=fd_step)
    return float(np.linalg.norm(at_gx.components - pushed.components))


# -- flows -------------------------------------------------------------------

def _matrix_direction(spec, km, direction, y, step=1e-6):
    """Derivative of apply(K, y) along the matrix direction (exact for affine K)."""
    return (spec.apply(km + step * direction, y)
            - spec.apply(km - step * direction, y)) / (2 * step)


def flow_integrate(spec: ActionSpec, f: InvariantField, x: Point, g: GroupElement,
                   t_end: float, dt: float, *, analytic=True) -> Point:
    """Classical RK4 integration of the transported field, starting at g.x.

    Right fields are genuine fields on M.  The left field v^x is only defined
    along the orbit through its base point, so the integration runs on the
    lifted state (K, y) with K' = K V and y' = d psi_x(v_L|K); the group
    component is carried in ambient matrix coordinates.
    """
    if not dt > 0:
        raise UsageError("dt must be positive")
    if not math.isfinite(t_end):
        raise UsageError("t_end must be finite")
    start = act(spec, g, x)
    if t_end == 0:
        return start
    steps = max(1, int(math.ceil(abs(t_end) / dt - 1e-9)))
    h = t_end / steps
    vm = f.seed.matrix
    use_jac = analytic and spec.jac_g is not None

    if f.side == "right":
        def rhs(y):
            if use_jac:
                return spec.jac_g(np.eye(spec.group.matrix_dim), y) @ f.seed.coords
            return _matrix_direction(spec, np.eye(spec.group.matrix_dim), vm, y)

        y = start.coords.copy()
        for i in range(steps):
            k1 = rhs(y)
            k2 = rhs(y + h / 2 * k1)
            k3 = rhs(y + h / 2 * k2)
            k4 = rhs(y + h * k3)
            y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            _check_flow(spec, y, (i + 1) * h)
        return Point(y, spec.domain_id)

    x0 = x.coords

    def rhs_lift(km):
        if use_jac:
            return km @ vm, spec.jac_g(km, x0) @ f.seed.coords
        return km @ vm, _matrix_direction(spec, km, km @ vm, x0)

    km = np.array(g.matrix, dtype=float)
    y = start.coords.copy()
    for i in range(steps):
        a1, b1 = rhs_lift(km)
        a2, b2 = rhs_lift(km + h / 2 * a1)
        a3, b3 = rhs_lift(km + h / 2 * a2)
        a4, b4 = rhs_lift(km + h * a3)
        km = km + h / 6 * (a1 + 2 * a2 + 2 * a3 + a4)
        y = y + h / 6 * (b1 + 2 * b2 + 2 * b3 + b4)
        _check_flow(spec, y, (i + 1) * h)
    return Point(y, spec.domain_id)


def _check_flow(spec, y, t):
    if not spec.domain_predicate(y):
        raise DomainError(f"flow left domain {spec.domain_id!r} at t={t:.6g}", exit_time=t)


def exact_flow_endpoint(spec: ActionSpec, f: InvariantField, x: Point, g: GroupElement,
                        t_end: float) -> Point:
    """g exp(t v).x for left fields, exp(t v) g.x for right fields."""
    et = groups.exp(f.seed, t_end)
    k = g @ et if f.side == "left" else et @ g
    return act(spec, k, x)
