"""Left- and right-lifted actions of G on the trivial bundle G x M."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import groups
from .actions import ActionSpec, Point, act, fd_jacobian, jacobian_g, singular_rank
from .errors import UsageError
from .groups import GroupElement, adjoint


@dataclass(frozen=True, eq=False)
class LiftedPoint:
    group_part: GroupElement
    base_part: Point


def lift_act(spec: ActionSpec, side: str, g: GroupElement, p: LiftedPoint) -> LiftedPoint:
    """(gh, g.x) for the left lift, (h g^-1, g.x) for the right lift."""
    if side == "left":
        gp = g @ p.group_part
    elif side == "right":
        gp = p.group_part @ g.inv
    else:
        raise UsageError(f"side must be 'left' or 'right', got {side!r}")
    return LiftedPoint(gp, act(spec, g, p.base_part))


def lifted_freeness_defect(spec: ActionSpec, side: str, g: GroupElement,
                           p: LiftedPoint) -> float:
    """How far g moves p; zero iff g = e because the group part cancels exactly."""
    q = lift_act(spec, side, g, p)
    return (groups.distance(q.group_part, p.group_part)
            + float(np.linalg.norm(q.base_part.coords - p.base_part.coords)))


def lifted_psi(spec: ActionSpec, p: LiftedPoint, g: GroupElement) -> LiftedPoint:
    """Orbit map of the left lift at p = (h, x): g -> (gh, g.x) = (R_h(g), psi_x(g))."""
    return lift_act(spec, "left", g, p)


def project(p: LiftedPoint) -> Point:
    """pi_M: G x M -> M."""
    return p.base_part


def lifted_jacobian(spec: ActionSpec, side: str, p: LiftedPoint, g: GroupElement, *,
                    analytic=True, fd_step=1e-6) -> np.ndarray:
    """(r + m) x r Jacobian of the lifted orbit map at g.

    Group rows are in the chart centred at the image's group part: the left
    lift contributes Ad(h^-1), the right lift -Ad(g).
    """
    h = p.group_part
    if analytic:
        top = adjoint(h.inv) if side == "left" else -adjoint(g)
    else:
        target = lift_act(spec, side, g, p).group_part

        def f(c):
            k = groups.chart_point(c, g)
            return groups.chart_coords(lift_act(spec, side, k, p).group_part, target)

        top = fd_jacobian(f, np.zeros(spec.group.group_dim), fd_step)
    bottom = jacobian_g(spec, g, p.base_part, analytic=analytic, fd_step=fd_step)
    return np.vstack([top, bottom])


def lifted_rank(spec: ActionSpec, side: str, p: LiftedPoint, g: GroupElement, *,
                analytic=True) -> int:
    return singular_rank(lifted_jacobian(spec, side, p, g, analytic=analytic))
