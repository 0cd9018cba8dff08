"""Cross-sections, flat local coordinates, moving frames and the induced action.

For a free action a flat chart identifies a neighbourhood in M with G x Z so
that the action becomes g.(h, z) = (gh, z).  It is built from an affine
cross-section k(z) = x0 + N z through x0, normal to the orbit there, by
solving x = h . k(z).  The z-part is an invariant function (a chart of the
orbit space); rho(x) = h(x)^-1 is a right-equivariant moving frame.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
from scipy.linalg import null_space

from . import groups
from .actions import ActionSpec, Point, act, jacobian_g, jacobian_x, singular_rank
from .errors import ChartDomainError, ConstructionError, DomainError
from .groups import GroupElement

NEWTON_MAX_ITER = 50
NEWTON_HALVINGS = 6
NEWTON_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class CrossSection:
    """Affine slice z -> anchor + normal @ z transverse to the orbits."""

    spec: ActionSpec
    anchor: Point
    normal: np.ndarray
    orbit_dim: int

    @property
    def param_dim(self) -> int:
        return self.normal.shape[1]

    def embed_coords(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float).reshape(self.param_dim)
        return self.anchor.coords + self.normal @ z

    def embed(self, z) -> Point:
        return Point(self.embed_coords(z), self.spec.domain_id)

    def valid(self, z) -> bool:
        y = self.embed_coords(z)
        if not self.spec.domain_predicate(y):
            return False
        if self.spec.flat_kind == "rotation_plane":
            # the opposite half-line lies on the same orbits
            return bool(y @ self.anchor.coords > 0)
        return True

    def transversality_rank(self, z) -> int:
        """Rank of [orbit tangents at k(z) | dk/dz]; m when transverse."""
        k = self.embed(z)
        tangents = jacobian_g(self.spec, self.spec.group.identity(), k)
        return singular_rank(np.hstack([tangents, self.normal]))

    def distance(self, x: Point) -> float:
        """Euclidean distance from x to the affine span of the slice."""
        d = x.coords - self.anchor.coords
        return float(np.linalg.norm(d - self.normal @ (self.normal.T @ d)))


def build_cross_section(spec: ActionSpec, x0: Point) -> CrossSection:
    """Normal slice through x0: orthonormal complement of the orbit tangent space."""
    if not spec.domain_predicate(x0.coords):
        raise ConstructionError(f"anchor {x0.coords.tolist()} outside {spec.domain_id!r}")
    tangents = jacobian_g(spec, spec.group.identity(), x0)
    s = singular_rank(tangents)
    if s < spec.group.group_dim:
        raise ConstructionError(
            f"{spec.name}: orbit dimension {s} < group dimension "
            f"{spec.group.group_dim} at {x0.coords.tolist()}; action not locally free"
        )
    normal = null_space(tangents.T, rcond=1e-9) if s < spec.manifold_dim \
        else np.zeros((spec.manifold_dim, 0))
    for j in range(normal.shape[1]):
        col = normal[:, j]
        if col[np.argmax(np.abs(col))] < 0:
            normal[:, j] = -col
    normal = normal + 0.0  # no negative zeros
    return CrossSection(spec, x0, normal, s)


@dataclass(frozen=True, eq=False)
class FlatChart:
    """Flat local coordinates x = h . k(z) built on a cross-section."""

    spec: ActionSpec
    cross_section: CrossSection
    method: str = "analytic"

    @property
    def anchor(self) -> Point:
        return self.cross_section.anchor

    def from_flat(self, h: GroupElement, z) -> Point:
        return act(self.spec, h, self.cross_section.embed(z))

    def to_flat(self, x: Point):
        """Return (h, z) with x = h . k(z)."""
        if x.domain_id != self.spec.domain_id or not self.spec.domain_predicate(x.coords):
            raise ChartDomainError(f"{x!r} is outside the domain of {self.spec.name}")
        if self.method == "analytic":
            h, z = _ANALYTIC[self.spec.flat_kind](self, x)
        else:
            h, z = _newton_to_flat(self, x)
        if not self.cross_section.valid(z):
            raise ChartDomainError(f"{x!r} maps outside the cross-section")
        return h, z

    def chart_domain(self, x: Point) -> bool:
        try:
            self.to_flat(x)
        except (ChartDomainError, DomainError):
            return False
        return True


def flat_chart(spec: ActionSpec, section: Optional[CrossSection] = None,
               x0: Optional[Point] = None, *, method: str = "auto") -> FlatChart:
    """Flat chart for a free regular action.

    ``method`` is ``analytic`` (closed-form inversion for the builtin kinds),
    ``newton`` (damped Newton on x - h.k(z)) or ``auto``.
    """
    if section is None:
        if x0 is None:
            raise ConstructionError("need a cross-section or an anchor point")
        section = build_cross_section(spec, x0)
    if not spec.known_free:
        raise ConstructionError(f"{spec.name} is not a free action")
    if method == "auto":
        method = "analytic" if spec.flat_kind in _ANALYTIC else "newton"
    if method == "analytic" and spec.flat_kind not in _ANALYTIC:
        raise ConstructionError(f"no closed-form flat chart for {spec.name}")
    if method not in ("analytic", "newton"):
        raise ConstructionError(f"unknown method {method!r}")
    return FlatChart(spec, section, method)


# -- closed-form inversions --------------------------------------------------

def _rotation_plane(chart, x):
    x0 = chart.anchor.coords
    theta = np.arctan2(x.coords[1], x.coords[0]) - np.arctan2(x0[1], x0[0])
    c, s = np.cos(theta), np.sin(theta)
    h = groups.element(chart.spec.group, np.array([[c, -s], [s, c]]))
    back = h.matrix.T @ x.coords
    return h, chart.cross_section.normal.T @ (back - x0)


def _scaling(chart, x):
    x0 = chart.anchor.coords
    s = float(x.coords @ x0 / (x0 @ x0))
    if s <= 0:
        raise ChartDomainError(f"{x!r} is not in the half-space of the anchor")
    m = len(x0)
    mat = s * np.eye(m + 1)
    mat[-1, -1] = 1.0
    h = groups.element(chart.spec.group, mat)
    return h, chart.cross_section.normal.T @ (x.coords / s - x0)


def _translation(chart, x):
    m = len(x.coords)
    mat = np.eye(m + 1)
    mat[:m, m] = x.coords - chart.anchor.coords
    return groups.element(chart.spec.group, mat), np.zeros(0)


def _self(chart, x):
    spec = chart.spec
    xm = spec.point_to_matrix(x.coords)
    x0m = spec.point_to_matrix(chart.anchor.coords)
    return groups.element(spec.group, xm @ np.linalg.inv(x0m)), np.zeros(0)


_ANALYTIC = {
    "rotation_plane": _rotation_plane,
    "scaling": _scaling,
    "translation": _translation,
    "self": _self,
}


def _newton_to_flat(chart, x):
    spec = chart.spec
    sec = chart.cross_section
    n_ = sec.normal
    h = spec.group.identity()
    z = n_.T @ (x.coords - sec.anchor.coords)
    tol = NEWTON_TOL * (1 + np.linalg.norm(x.coords))

    def residual(h, z):
        return x.coords - spec.apply(h.matrix, sec.embed_coords(z))

    res = residual(h, z)
    for _ in range(NEWTON_MAX_ITER):
        norm = np.linalg.norm(res)
        if norm < tol:
            return h, z
        k = Point(sec.embed_coords(z), spec.domain_id)
        jac = np.hstack([jacobian_g(spec, h, k), jacobian_x(spec, h, k) @ n_])
        step = np.linalg.lstsq(jac, res, rcond=None)[0]
        r = spec.group.group_dim
        for _ in range(NEWTON_HALVINGS + 1):
            try:
                h_new = groups.chart_point(step[:r], h)
                z_new = z + step[r:]
                res_new = residual(h_new, z_new)
                if np.linalg.norm(res_new) < norm and sec.valid(z_new):
                    break
            except (ArithmeticError, ValueError):
                pass
            step = step / 2
        else:
            raise ChartDomainError(f"Newton stalled for {x!r}")
        h, z, res = h_new, z_new, res_new
    if np.linalg.norm(res) < tol:
        return h, z
    raise ChartDomainError(
        f"Newton did not converge in {NEWTON_MAX_ITER} iterations for {x!r}"
    )


# -- frames and invariants ---------------------------------------------------

def moving_frame(chart: FlatChart, x: Point) -> GroupElement:
    """rho(x) = h(x)^-1, so rho(x).x lies on the cross-section and
    rho(g.x) = rho(x) g^-1."""
    h, _ = chart.to_flat(x)
    return h.inv


def invariant_coords(chart: FlatChart, x: Point) -> np.ndarray:
    """z-part of the flat coordinates; constant along orbits."""
    return chart.to_flat(x)[1]


def write_chart_table(chart: FlatChart, points: Iterable[Point], path) -> None:
    """CSV ``coord_*, h_chart_*, z_*`` with h in principal log coordinates."""
    m = chart.spec.manifold_dim
    r = chart.spec.group.group_dim
    d = chart.cross_section.param_dim
    header = ([f"coord_{i}" for i in range(m)] + [f"h_chart_{i}" for i in range(r)]
              + [f"z_{i}" for i in range(d)])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for x in points:
            h, z = chart.to_flat(x)
            row = list(x.coords) + list(groups.log(h)) + list(z)
            w.writerow([format(float(v), ".17g") for v in row])


# -- equivariant maps G -> M -------------------------------------------------

@dataclass(frozen=True, eq=False)
class EquivariantMapHandle:
    """psi_base: G -> M, g -> g . base.  Every equivariant map has this form."""

    spec: ActionSpec
    base: Point

    def __call__(self, g: GroupElement) -> Point:
        return act(self.spec, g, self.base)


def induced_act(g: GroupElement, f: EquivariantMapHandle) -> EquivariantMapHandle:
    """g . psi_x = psi_{g.x}."""
    return EquivariantMapHandle(f.spec, act(f.spec, g, f.base))


def to_handle(spec: ActionSpec, x: Point) -> EquivariantMapHandle:
    """The bijection M -> GM, x -> psi_x."""
    return EquivariantMapHandle(spec, x)


@dataclass(frozen=True)
class DecompositionReport:
    samples: int
    eq14_equivariance: float
    eq15_invariance: Optional[float]
    identity_slice: Optional[float]


def decompose_check(spec: ActionSpec, chart_m: FlatChart, chart_gm: FlatChart,
                    samples) -> DecompositionReport:
    """Write x -> psi_x in flat coordinates as (psi_1, psi_2) and measure the
    equivariance of psi_1, the invariance of psi_2 and psi on the identity slice.

    ``samples`` are (g, h, z) triples with z a valid section parameter.  Points
    of GM are carried by their bases, so ``chart_gm`` acts on bases.
    """
    def psi(h, z):
        handle = to_handle(spec, chart_m.from_flat(h, z))
        return chart_gm.to_flat(handle.base)

    d = chart_m.cross_section.param_dim
    e = spec.group.identity()
    eq14 = eq15 = ident = 0.0
    n = 0
    for g, h, z in samples:
        n += 1
        h1, z1 = psi(g @ h, z)
        h2, z2 = psi(h, z)
        eq14 = max(eq14, groups.distance(h1, g @ h2), float(np.linalg.norm(z1 - z2)))
        if d:
            _, zg = psi(g, z)
            _, ze = psi(e, z)
            eq15 = max(eq15, float(np.linalg.norm(zg - ze)))
            zero = np.zeros(d)
            hh, zz = psi(h, zero)
            he, ze2 = psi(e, z)
            ident = max(ident,
                        groups.distance(hh, h) + float(np.linalg.norm(zz)),
                        groups.distance(he, e) + float(np.linalg.norm(ze2 - z)))
    if d == 0:
        return DecompositionReport(n, eq14, None, None)
    return DecompositionReport(n, eq14, eq15, ident)
