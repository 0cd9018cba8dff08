"""Randomized property suites over the builtin actions.

Each suite takes an action, its own RNG stream and the run settings, and
returns a list of :class:`Check` records.  Streams are derived from
(seed, action name, suite name) so suites can run in any order or in
parallel and still produce identical numbers.
"""
from __future__ import annotations

import functools
import math
import zlib
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

import numpy as np

from . import actions, fields, frames, groups, lifted
from .actions import ActionSpec, Point, act, psi_eval
from .fields import InvariantField

SUITE_NAMES = ("group_laws", "action_axioms", "equivariance", "invariant_fields",
               "conjugates", "transport", "flows", "lifted", "frames", "quotients",
               "induced")

RNG_ALGORITHM = "numpy.random.PCG64 seeded by SeedSequence([seed mod 2^64, crc32(action), crc32(suite)])"

FREENESS_THRESHOLD = 1e-6
NEGATIVE_THRESHOLD = 1e-3
DECOMPOSITION_TOL = 1e-8
JACOBIAN_AGREEMENT_TOL = 1e-5
FLOW_ORDER_MIN_RATIO = 12.0


@dataclass(frozen=True)
class Settings:
    trials: int = 500
    seed: int = 42
    fd_step: float = 1e-6
    tol_fd: float = 1e-6
    tol_analytic: float = 1e-9


@dataclass
class Check:
    """One verified identity.

    ``relation`` is ``max_below`` (max residual < tolerance), ``min_above``
    (min residual > tolerance), ``max_above`` (some residual > tolerance) or
    ``exact`` (integer mismatch count must be 0).
    """

    check_name: str
    paper_ref: str
    action: str
    samples: int
    max_residual: float
    tolerance: float
    relation: str = "max_below"
    min_residual: Optional[float] = None

    @property
    def passed(self) -> bool:
        if self.samples == 0:
            return True
        if self.relation == "max_below":
            return self.max_residual < self.tolerance
        if self.relation == "min_above":
            return self.min_residual is not None and self.min_residual > self.tolerance
        if self.relation == "max_above":
            return self.max_residual > self.tolerance
        if self.relation == "exact":
            return self.max_residual == 0
        raise ValueError(self.relation)

    def as_dict(self) -> dict:
        d = {
            "check_name": self.check_name,
            "paper_ref": self.paper_ref,
            "action": self.action,
            "samples": self.samples,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "relation": self.relation,
        }
        if self.min_residual is not None:
            d["min_residual"] = self.min_residual
        d["pass"] = self.passed
        return d


def suite_rng(seed: int, action: str, suite: str) -> np.random.Generator:
    ss = np.random.SeedSequence([seed % 2**64, zlib.crc32(action.encode()),
                                 zlib.crc32(suite.encode())])
    return np.random.Generator(np.random.PCG64(ss))


class _Max:
    """Running max/min accumulator for a residual."""

    def __init__(self):
        self.max = 0.0
        self.min = math.inf
        self.n = 0

    def add(self, value):
        value = float(value)
        if math.isnan(value):
            value = math.inf
        self.max = max(self.max, value)
        self.min = min(self.min, value)
        self.n += 1


def _check(name, ref, spec, acc, tol, relation="max_below"):
    return Check(name, ref, spec.name, acc.n, acc.max, tol, relation,
                 acc.min if relation == "min_above" and acc.n else None)


def _rand_g(spec, rng, scale=1.0):
    return groups.random_element(spec.group, rng, scale)


def _sample_x(spec, rng, i):
    if spec.special_points and i % 5 == 0:
        pts = spec.special_points
        return Point(pts[(i // 5) % len(pts)], spec.domain_id)
    return spec.sample_point(rng)


def _paths(spec):
    return (("analytic", True), ("fd", False)) if spec.has_analytic else (("fd", False),)


# -- suites ------------------------------------------------------------------

def group_laws(spec: ActionSpec, rng, s: Settings):
    acc = {k: _Max() for k in ("L", "R", "Cinv", "Csplit", "hom")}
    L = lambda a, b: groups.translate(a, b, "left")  # noqa: E731
    R = lambda a, b: groups.translate(a, b, "right")  # noqa: E731
    C = lambda a, b: groups.translate(a, b, "conjugate")  # noqa: E731
    for _ in range(s.trials):
        g, h, k = (_rand_g(spec, rng) for _ in range(3))
        acc["L"].add(groups.distance(L(g @ h, k), L(g, L(h, k))))
        acc["R"].add(groups.distance(R(g @ h, k), R(h, R(g, k))))
        acc["Cinv"].add(groups.distance(C(g.inv, C(g, h)), h))
        acc["Csplit"].add(max(groups.distance(C(g, h), L(g, R(g.inv, h))),
                              groups.distance(C(g, h), R(g.inv, L(g, h)))))
        acc["hom"].add(groups.distance(C(g, h @ k), C(g, h) @ C(g, k)))
    t = s.tol_analytic
    return [
        _check("eq1_left_composition", "Prop 1.1, Eq (1): L_gh = L_g L_h", spec, acc["L"], t),
        _check("eq1_right_composition", "Prop 1.1, Eq (1): R_gh = R_h R_g", spec, acc["R"], t),
        _check("eq1_conjugate_inverse", "Prop 1.1, Eq (1): C_{g^-1} = (C_g)^-1", spec,
               acc["Cinv"], t),
        _check("eq1_conjugate_split", "Prop 1.1, Eq (1): C_g = L_g R_{g^-1} = R_{g^-1} L_g",
               spec, acc["Csplit"], t),
        _check("eq1_conjugate_homomorphism", "Prop 1.1, Eq (1): C_g is a homomorphism", spec,
               acc["hom"], t),
    ]


def action_axioms(spec: ActionSpec, rng, s: Settings):
    n = s.trials
    e = spec.group.identity()
    ident, comp, inv, dom = _Max(), _Max(), _Max(), _Max()
    rank, const, jac = _Max(), _Max(), _Max()
    for i in range(n):
        x = _sample_x(spec, rng, i)
        g, h = _rand_g(spec, rng), _rand_g(spec, rng)
        ident.add(np.linalg.norm(act(spec, e, x).coords - x.coords))
        comp.add(np.linalg.norm(act(spec, g, act(spec, h, x)).coords
                                - act(spec, g @ h, x).coords))
        inv.add(np.linalg.norm(act(spec, g.inv, act(spec, g, x)).coords - x.coords))
        dom.add(0 if spec.domain_predicate(act(spec, g, x).coords) else 1)
        if spec.orbit_dim is not None:
            rank.add(abs(actions.rank_at(spec, x, g) - spec.orbit_dim(x.coords)))
        if i < 20:
            rep = actions.constant_rank_check(spec, x, 5, int(rng.integers(2**63)))
            const.add(0 if rep.passed else 1)
        if spec.has_analytic and i < 100:
            jx = np.max(np.abs(actions.jacobian_x(spec, g, x)
                               - actions.jacobian_x(spec, g, x, analytic=False,
                                                    fd_step=s.fd_step)))
            jg = np.max(np.abs(actions.jacobian_g(spec, g, x)
                               - actions.jacobian_g(spec, g, x, analytic=False,
                                                    fd_step=s.fd_step)))
            jac.add(max(jx, jg))
    t = s.tol_analytic
    out = [
        _check("action_identity", "§1: e.x = x", spec, ident, t),
        _check("action_compatibility", "§1: g.(h.x) = (gh).x", spec, comp, t),
        _check("phi_inverse", "§1: (phi_g)^-1 = phi_{g^-1}", spec, inv, t),
        _check("domain_invariance", "§1: g.x stays in the domain", spec, dom, 0, "exact"),
    ]
    if spec.orbit_dim is not None:
        out.append(_check("orbit_rank_table",
                          "Prop 2.4 / §3 before Prop 3.5: rank of psi_x equals orbit dimension",
                          spec, rank, 0, "exact"))
    out.append(_check("constant_rank", "Thm 3.4: psi_x has constant rank", spec, const, 0,
                      "exact"))
    if spec.has_analytic:
        out.append(_check("jacobian_fd_agreement",
                          "§3: analytic and finite-difference Jacobians agree",
                          spec, jac, JACOBIAN_AGREEMENT_TOL))
    return out


def equivariance(spec: ActionSpec, rng, s: Settings):
    a, b, c = _Max(), _Max(), _Max()
    e = spec.group.identity()
    for i in range(s.trials):
        x = _sample_x(spec, rng, i)
        g, h = _rand_g(spec, rng), _rand_g(spec, rng)
        gx = act(spec, g, x)
        a.add(np.linalg.norm(psi_eval(spec, gx, h).coords - psi_eval(spec, x, h @ g).coords))
        b.add(np.linalg.norm(psi_eval(spec, x, g @ h).coords
                             - act(spec, g, psi_eval(spec, x, h)).coords))
        # an equivariant f: G -> M is determined by f(e)
        f_e = psi_eval(spec, x, e)
        c.add(np.linalg.norm(psi_eval(spec, x, h).coords - act(spec, h, f_e).coords))
    t = s.tol_analytic
    return [
        _check("eq2_i_base_change", "Eq (2)(i): psi_{g.x} = psi_x R_g", spec, a, t),
        _check("eq2_ii_equivariance", "Eq (2)(ii): psi_x L_g = phi_g psi_x", spec, b, t),
        _check("prop1_3_equivariant_maps",
               "Prop 1.3: f(h) = h.f(e) for equivariant f = psi_x", spec, c, t),
    ]


def _field_samples(spec, rng, s, n):
    return [(_rand_g(spec, rng), _rand_g(spec, rng), _sample_x(spec, rng, i))
            for i in range(n)]


def _residual_checks(spec, rng, s, names, with_curves):
    n = s.trials
    v = groups.random_algebra(spec.group, rng)
    samples = _field_samples(spec, rng, s, n)
    lin_seed = int(rng.integers(2**63))
    out = []
    for label, analytic in _paths(spec):
        tol = s.tol_analytic if analytic else s.tol_fd
        res = fields.identity_residuals(spec, InvariantField(v), samples, analytic=analytic,
                                        fd_step=s.fd_step, curve_checks=with_curves,
                                        rng=np.random.default_rng(lin_seed), only=names)
        out += _from_residuals(spec, res, names, n, label, tol, s)
        # curve oracles do not depend on the path
        with_curves = False
    return out


def _from_residuals(spec, res, names, n, label, tol, s):
    out = []
    for key in names:
        if key not in res:
            continue
        acc = _Max()
        acc.n, acc.max = n, res[key]
        # curve-derivative oracles are difference quotients on both paths
        t = s.tol_fd if key in _CURVE_KEYS else tol
        out.append(_check(f"{key}[{label}]", fields.CHECK_REFS[key], spec, acc, t))
    return out


_CURVE_KEYS = {"eq3_left_curve", "eq3_right_curve", "prop2_11_curve"}


def _group_checks(spec, rng, s, names, with_curves):
    n = s.trials
    v = groups.random_algebra(spec.group, rng)
    samples = [(_rand_g(spec, rng), _rand_g(spec, rng), _rand_g(spec, rng))
               for _ in range(n)]
    out = []
    for label, analytic in (("analytic", True), ("fd", False)):
        tol = s.tol_analytic if analytic else s.tol_fd
        res = fields.group_residuals(InvariantField(v), samples, analytic=analytic,
                                     fd_step=s.fd_step, curve_checks=with_curves, only=names)
        out += _from_residuals(spec, res, names, n, label, tol, s)
        with_curves = False
    return out, v, samples


def invariant_fields(spec: ActionSpec, rng, s: Settings):
    names = ["eq3_left_curve", "eq3_right_curve", "eq4_left_from_right",
             "eq4_right_from_left", "prop2_2_conjugate_right_invariant"]
    return _group_checks(spec, rng, s, names, True)[0]


def _conjugates_group(spec, rng, s: Settings):
    desc = spec.group
    out, v, samples = _group_checks(spec, rng, s,
                                    ["eq10_right_conjugate", "eq10_left_conjugate"], False)
    ident, abel = _Max(), _Max()
    f = InvariantField(v)
    for g, _, _ in samples:
        ident.add(np.linalg.norm(fields.conjugate_field(f, desc.identity()).seed.coords
                                 - v.coords))
        if desc.abelian:
            abel.add(np.linalg.norm(fields.conjugate_field(f, g).seed.coords - v.coords))
    out.append(_check("conjugate_at_identity", "Def 2.8: the e-conjugate is the field itself",
                      spec, ident, s.tol_analytic))
    if desc.abelian:
        out.append(_check("abelian_conjugate_trivial", "Def 2.8: C_g = id for abelian G",
                          spec, abel, s.tol_analytic))
    return out


def conjugates(spec: ActionSpec, rng, s: Settings):
    return _residual_checks(spec, rng, s, ["thm2_12_first", "thm2_12_second"], False)


def transport(spec: ActionSpec, rng, s: Settings):
    out = _residual_checks(spec, rng, s, ["eq6_generator", "lemma2_3_base_point",
                                          "eq11_g_invariance", "prop2_11_curve",
                                          "differential_linearity"], True)
    if not spec.group.abelian:
        neg = _Max()
        for _ in range(s.trials):
            # generic points only: fixed points carry no field at all
            x = spec.sample_point(rng)
            neg.add(fields.right_field_invariance_defect(
                spec, groups.random_algebra(spec.group, rng), _rand_g(spec, rng), x))
        out.append(_check("right_field_not_invariant",
                          "Lemma 2.3 remark: v_R on M is not necessarily G-invariant",
                          spec, neg, NEGATIVE_THRESHOLD, "max_above"))
    return out


def flows(spec: ActionSpec, rng, s: Settings):
    n = min(s.trials, 10)
    out = []
    for side in ("left", "right"):
        acc = _Max()
        for i in range(n):
            x = _sample_x(spec, rng, i)
            g = _rand_g(spec, rng, 0.5)
            f = InvariantField(groups.random_algebra(spec.group, rng, 0.5), side)
            got = fields.flow_integrate(spec, f, x, g, 1.0, 0.01)
            want = fields.exact_flow_endpoint(spec, f, x, g, 1.0)
            acc.add(np.linalg.norm(got.coords - want.coords)
                    / (1 + np.linalg.norm(want.coords)))
        out.append(_check(f"rk4_flow_{side}",
                          "Prop 2.11 (left) / Eq (5) (right): RK4 flow follows the exact curve",
                          spec, acc, 1e-7))
    if spec.group.name == "SO(2)" and spec.manifold_dim == 2:
        end, ratio = so2_flow_certificate(spec)
        a = _Max()
        a.add(end)
        out.append(_check("so2_quarter_turn", "Prop 2.11: RK4 quarter turn from (1,0), dt=1e-3",
                          spec, a, 1e-9))
        r = _Max()
        r.add(ratio)
        out.append(_check("rk4_order_ratio", "Prop 2.11: halving dt cuts the error >= 12x",
                          spec, r, FLOW_ORDER_MIN_RATIO, "min_above"))
        out[-1].min_residual = ratio
    return out


def so2_flow_certificate(spec: ActionSpec, coarse_dt: float = math.pi / 20):
    """Endpoint error at dt = 1e-3 and the error ratio for dt -> dt/2.

    The ratio is measured at a coarse step because at dt = 1e-3 the error is
    already at rounding level.
    """
    x = spec.point((1.0, 0.0))
    f = InvariantField(groups.AlgebraVector(spec.group, [1.0]), "right")
    e = spec.group.identity()
    target = np.array([0.0, 1.0])
    end = fields.flow_integrate(spec, f, x, e, math.pi / 2, 1e-3)
    err = np.linalg.norm(end.coords - target)
    e1 = np.linalg.norm(fields.flow_integrate(spec, f, x, e, math.pi / 2, coarse_dt).coords
                        - target)
    e2 = np.linalg.norm(fields.flow_integrate(spec, f, x, e, math.pi / 2,
                                              coarse_dt / 2).coords - target)
    return float(err), float(e1 / e2)


def _away_from_identity(spec, rng, x, i):
    # prefer isotropy elements, the hard case for freeness; they are trivial
    # at generic points of some actions
    if spec.isotropy_sample is not None and i % 2 == 0:
        g = groups.element(spec.group, spec.isotropy_sample(x.coords, rng))
        if np.linalg.norm(groups.log(g)) > 1e-4:
            return g
    while True:
        g = _rand_g(spec, rng)
        if np.linalg.norm(groups.log(g)) > 1e-4:
            return g


def lifted_suite(spec: ActionSpec, rng, s: Settings):
    n = s.trials
    r = spec.group.group_dim
    e = spec.group.identity()
    axioms, proj, p325, pcomp = _Max(), _Max(), _Max(), _Max()
    free = {"left": _Max(), "right": _Max()}
    rank = _Max()
    for i in range(n):
        x = _sample_x(spec, rng, i)
        p = lifted.LiftedPoint(_rand_g(spec, rng), x)
        g, k = _rand_g(spec, rng), _rand_g(spec, rng)
        ax, pr, rk = [], [], []
        for side in ("left", "right"):
            q1 = lifted.lift_act(spec, side, g, lifted.lift_act(spec, side, k, p))
            q2 = lifted.lift_act(spec, side, g @ k, p)
            q0 = lifted.lift_act(spec, side, e, p)
            ax.append(max(groups.distance(q1.group_part, q2.group_part)
                          + np.linalg.norm(q1.base_part.coords - q2.base_part.coords),
                          groups.distance(q0.group_part, p.group_part)
                          + np.linalg.norm(q0.base_part.coords - x.coords)))
            pr.append(np.linalg.norm(lifted.project(lifted.lift_act(spec, side, g, p)).coords
                                     - act(spec, g, lifted.project(p)).coords))
            ga = _away_from_identity(spec, rng, x, i)
            free[side].add(lifted.lifted_freeness_defect(spec, side, ga, p))
            rk.append(abs(lifted.lifted_rank(spec, side, p, g) - r))
        # both lifts are checked on every trial
        axioms.add(max(ax))
        proj.add(max(pr))
        rank.add(max(rk))
        lp = lifted.lifted_psi(spec, p, g)
        p325.add(groups.distance(lp.group_part, groups.translate(p.group_part, g, "right"))
                 + np.linalg.norm(lp.base_part.coords - psi_eval(spec, x, g).coords))
        pcomp.add(np.linalg.norm(lifted.project(lp).coords - psi_eval(spec, x, g).coords))
    t = s.tol_analytic
    return [
        _check("lifted_action_axioms", "Def 2.6, Eqs (8)-(9): lifts are left actions",
               spec, axioms, t),
        _check("lifted_freeness_left", "Thm 2.7: left lift is free", spec, free["left"],
               FREENESS_THRESHOLD, "min_above"),
        _check("lifted_freeness_right", "Thm 2.7: right lift is free", spec, free["right"],
               FREENESS_THRESHOLD, "min_above"),
        _check("lifted_constant_rank", "Thm 2.7: lifted orbits have dimension dim G",
               spec, rank, 0, "exact"),
        _check("projection_equivariance", "Def 2.6: pi_M is G-equivariant", spec, proj, t),
        _check("prop3_25_componentwise", "Prop 3.25: psi_(h,x)(g) = (R_h(g), psi_x(g))",
               spec, p325, t),
        _check("lifted_psi_projects", "Def 2.6 diagram: pi_M psi_(h,x) = psi_x", spec,
               pcomp, t),
    ]


def _chart_for(spec):
    x0 = spec.point(spec.default_point)
    return frames.flat_chart(spec, frames.build_cross_section(spec, x0))


def _chart_samples(spec, chart, rng, n):
    pts = []
    tries = 0
    while len(pts) < n and tries < 50 * n:
        tries += 1
        x = spec.sample_point(rng)
        if chart.chart_domain(x):
            pts.append(x)
    return pts


def frames_suite(spec: ActionSpec, rng, s: Settings):
    if not (spec.known_free and spec.known_regular and spec.flat_kind):
        return []
    chart = _chart_for(spec)
    newton = frames.flat_chart(spec, chart.cross_section, method="newton")
    sec = chart.cross_section
    m = spec.manifold_dim
    e = spec.group.identity()
    trans, rt, triv, on_sec, equi, ident, newt = (_Max() for _ in range(7))
    for x in _chart_samples(spec, chart, rng, s.trials):
        h, z = chart.to_flat(x)
        trans.add(abs(sec.transversality_rank(z) - m))
        rt.add(np.linalg.norm(chart.from_flat(h, z).coords - x.coords))
        g = _rand_g(spec, rng)
        hg, zg = chart.to_flat(act(spec, g, x))
        triv.add(groups.distance(hg, g @ h) + np.linalg.norm(zg - z))
        rho = frames.moving_frame(chart, x)
        y = act(spec, rho, x)
        on_sec.add(max(sec.distance(y), np.linalg.norm(y.coords - sec.embed_coords(z))))
        equi.add(groups.distance(frames.moving_frame(chart, act(spec, g, x)), rho @ g.inv))
        he, ze = chart.to_flat(sec.embed(z))
        ident.add(groups.distance(he, e) + np.linalg.norm(ze - z))
        # Newton is local: compare near the anchor
        zn = rng.normal(scale=0.2, size=sec.param_dim)
        if not sec.valid(zn):
            zn = np.zeros(sec.param_dim)
        xn = chart.from_flat(_rand_g(spec, rng, 0.3), zn)
        ha, za = chart.to_flat(xn)
        hn, zn2 = newton.to_flat(xn)
        newt.add(groups.distance(ha, hn) + np.linalg.norm(za - zn2))
    t = s.tol_fd
    return [
        _check("section_transversality", "Def 3.9: section meets orbits transversally",
               spec, trans, 0, "exact"),
        _check("flat_round_trip", "Thm 3.7, Eq (12): flat coordinates are a chart", spec, rt, t),
        _check("flat_trivialized_action", "Thm 3.7: g.(h, z) = (gh, z)", spec, triv, t),
        _check("identity_cross_section", "Def 3.9 remark: rho(z) = e on the section", spec,
               ident, t),
        _check("moving_frame_on_section", "§4: rho(x).x lies on the cross-section", spec,
               on_sec, t),
        _check("moving_frame_equivariance", "§4: rho(g.x) = rho(x) g^-1", spec, equi, t),
        _check("newton_matches_closed_form", "Thm 3.7: damped Newton inversion of the chart",
               spec, newt, t),
    ]


def quotients(spec: ActionSpec, rng, s: Settings):
    if not (spec.known_free and spec.known_regular and spec.flat_kind):
        return []
    chart = _chart_for(spec)
    inv, sep = _Max(), _Max()
    pts = _chart_samples(spec, chart, rng, s.trials)
    zs = []
    for x in pts:
        z = frames.invariant_coords(chart, x)
        g = _rand_g(spec, rng)
        inv.add(np.linalg.norm(frames.invariant_coords(chart, act(spec, g, x)) - z))
        zs.append(z)
    out = [_check("invariant_coords_invariance",
                  "Def 3.23 / Thm 3.12 proof: theta is constant on orbits", spec, inv, s.tol_fd)]
    if spec.orbit_label is not None and chart.cross_section.param_dim:
        # pair every sample with an independent point on a clearly different orbit
        for x, z in zip(pts, zs):
            lx = np.asarray(spec.orbit_label(x.coords))
            while True:
                y = _chart_samples(spec, chart, rng, 1)[0]
                if np.linalg.norm(np.asarray(spec.orbit_label(y.coords)) - lx) > 1e-2:
                    break
            sep.add(np.linalg.norm(frames.invariant_coords(chart, y) - z))
        out.append(_check("orbit_separation", "Thm 3.12 proof: theta separates orbits",
                          spec, sep, 1e-3, "min_above"))
    d = chart.cross_section.param_dim
    samples = []
    for _ in range(s.trials):
        z = rng.normal(scale=0.3, size=d)
        if not chart.cross_section.valid(z):
            z = np.zeros(d)
        samples.append((_rand_g(spec, rng), _rand_g(spec, rng), z))
    rep = frames.decompose_check(spec, chart, _chart_for(spec), samples)
    for name, ref, val in (
        ("eq14_psi1_equivariance", "Lemma 3.24, Eq (14): psi_1(g.(h,z)) = g.psi_1(h,z)",
         rep.eq14_equivariance),
        ("eq15_psi2_invariance", "Lemma 3.24, Eq (15): psi_2(g,z) = psi_2(e,z)",
         rep.eq15_invariance),
        ("lemma3_25_identity_slice", "Lemma 3.25: psi restricted to the identity slice is Id",
         rep.identity_slice),
    ):
        if val is None:
            continue
        acc = _Max()
        acc.n, acc.max = rep.samples, val
        out.append(_check(name, ref, spec, acc, DECOMPOSITION_TOL))
    return out


def induced(spec: ActionSpec, rng, s: Settings):
    ev, orb, sym, p321 = _Max(), _Max(), _Max(), _Max()
    tol = s.tol_fd
    for i in range(s.trials):
        x = _sample_x(spec, rng, i)
        f = frames.to_handle(spec, x)
        g = _rand_g(spec, rng)
        gf = frames.induced_act(g, f)
        h = _rand_g(spec, rng)
        ev.add(np.linalg.norm(gf(h).coords - act(spec, h, act(spec, g, x)).coords))
        p321.add(np.linalg.norm(gf.base.coords - act(spec, g, x).coords))
        # isotropy of psi_x equals isotropy of x
        if spec.isotropy_sample is not None and i % 3 == 0:
            gi = groups.element(spec.group, spec.isotropy_sample(x.coords, rng))
        elif i % 3 == 1:
            gi = spec.group.identity()
        else:
            gi = g
        moved_x = np.linalg.norm(act(spec, gi, x).coords - x.coords) > tol
        gif = frames.induced_act(gi, f)
        moved_f = max(np.linalg.norm(gif(k).coords - f(k).coords)
                      for k in (_rand_g(spec, rng) for _ in range(3))) > tol
        sym.add(0 if moved_x == moved_f else 1)
    x = spec.sample_point(rng)
    seed = int(rng.integers(2**63))
    f = frames.to_handle(spec, x)
    pts = actions.orbit_sample(spec, x, min(s.trials, 50), seed)
    for i, p in enumerate(pts):
        gi = groups.random_element(spec.group, np.random.default_rng([seed, i]))
        orb.add(np.linalg.norm(frames.induced_act(gi, f).base.coords - p.coords))
    t = s.tol_analytic
    return [
        _check("induced_evaluation", "§3 induced-action: (g.psi_x)(h) = h.(g.x)", spec, ev, t),
        _check("prop3_21_composition", "Prop 3.21: induced action = psi o Psi", spec, p321, t),
        _check("prop3_13_isotropy", "Prop 3.13(a): G_{psi_x} = G_x", spec, sym, 0, "exact"),
        _check("lemma3_19_orbit_correspondence", "Prop 3.13(b) / Lemma 3.19: O^{psi_x} = psi(O^x)",
               spec, orb, t),
    ]


SUITES = {
    "action_axioms": action_axioms,
    "equivariance": equivariance,
    "conjugates": conjugates,
    "transport": transport,
    "flows": flows,
    "lifted": lifted_suite,
    "frames": frames_suite,
    "quotients": quotients,
    "induced": induced,
}


class _GroupOnly(NamedTuple):
    """Stand-in for an action in checks that only involve the group."""

    name: str
    group: groups.GroupDescriptor


# Identities on G alone: computed once per group from a stream keyed by the
# group name, then reported under every action of that group.
GROUP_PARTS = {
    "group_laws": group_laws,
    "invariant_fields": invariant_fields,
    "conjugates": _conjugates_group,
}


@functools.lru_cache(maxsize=256)
def _group_part(suite: str, group_key: str, settings: Settings) -> tuple:
    desc = groups.builtin_group(group_key)
    rng = suite_rng(settings.seed, "group:" + desc.name, suite)
    return tuple(GROUP_PARTS[suite](_GroupOnly("", desc), rng, settings))


def _group_key(desc) -> str:
    for key, d in groups.builtin_groups().items():
        if d is desc:
            return key
    raise KeyError(desc.name)


def run_one(suite: str, spec: ActionSpec, settings: Settings) -> list:
    out = []
    if suite in GROUP_PARTS:
        part = _group_part(suite, _group_key(spec.group), settings)
        out += [replace(c, action=spec.name) for c in part]
    if suite in SUITES:
        rng = suite_rng(settings.seed, spec.name, suite)
        out += SUITES[suite](spec, rng, settings)
    return out
