import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lieact import groups
from lieact.actions import act, builtin_action, builtin_actions, psi_eval
from lieact.errors import UsageError
from lieact.groups import euclidean2, rotation2
from lieact.lifted import (
    LiftedPoint,
    lift_act,
    lifted_freeness_defect,
    lifted_jacobian,
    lifted_psi,
    lifted_rank,
    project,
)

ALL_ACTIONS = sorted(builtin_actions())
seeds = st.integers(0, 2**32 - 1)


def lifted_sample(spec, r):
    return LiftedPoint(groups.random_element(spec.group, r), spec.sample_point(r))


def test_se2_left_lift_example():
    spec = builtin_action("se2-r2")
    g = euclidean2(0.0, 1.0, 0.0)
    q = lift_act(spec, "left", g, LiftedPoint(spec.group.identity(), spec.point([0, 0])))
    np.testing.assert_allclose(q.group_part.matrix, g.matrix)
    np.testing.assert_allclose(q.base_part.coords, [1, 0])


@pytest.mark.parametrize("side", ["left", "right"])
def test_identity_fixes_lifted_points(side, rng):
    spec = builtin_action("se2-r2")
    p = lifted_sample(spec, rng)
    q = lift_act(spec, side, spec.group.identity(), p)
    np.testing.assert_allclose(q.group_part.matrix, p.group_part.matrix, atol=1e-15)
    np.testing.assert_allclose(q.base_part.coords, p.base_part.coords, atol=1e-15)
    assert lifted_freeness_defect(spec, side, spec.group.identity(), p) < 1e-14


def test_right_lift_with_h_equal_g():
    spec = builtin_action("affine-r1")
    g = groups.affine(2, 3)
    q = lift_act(spec, "right", g, LiftedPoint(g, spec.point([1.0])))
    np.testing.assert_allclose(q.group_part.matrix, np.eye(2), atol=1e-15)


def test_bad_side():
    spec = builtin_action("so2-r2")
    p = LiftedPoint(spec.group.identity(), spec.point([1, 0]))
    with pytest.raises(UsageError):
        lift_act(spec, "up", spec.group.identity(), p)


def test_fixed_point_still_moved():
    spec = builtin_action("so2-r2")
    p = LiftedPoint(spec.group.identity(), spec.point([0, 0]))
    d = lifted_freeness_defect(spec, "left", rotation2(math.pi), p)
    assert math.isclose(d, np.linalg.norm(rotation2(math.pi).matrix - np.eye(2)),
                        rel_tol=1e-12)


@pytest.mark.parametrize("name", ALL_ACTIONS)
@pytest.mark.parametrize("side", ["left", "right"])
@given(seed=seeds)
def test_lifted_action_axiom(name, side, seed):
    spec = builtin_action(name)
    r = np.random.default_rng(seed)
    g, h = groups.random_element(spec.group, r), groups.random_element(spec.group, r)
    p = lifted_sample(spec, r)
    a = lift_act(spec, side, g @ h, p)
    b = lift_act(spec, side, g, lift_act(spec, side, h, p))
    assert groups.distance(a.group_part, b.group_part) < 1e-9
    np.testing.assert_allclose(a.base_part.coords, b.base_part.coords, atol=1e-9, rtol=1e-9)
    np.testing.assert_allclose(project(a).coords, act(spec, g @ h, p.base_part).coords,
                               atol=1e-9, rtol=1e-9)


def test_se2_freeness_sweep():
    spec = builtin_action("se2-r2")
    r = np.random.default_rng(2024)
    p = LiftedPoint(spec.group.identity(), spec.point([1, 0]))
    n = 0
    while n < 1000:
        g = groups.random_element(spec.group, r)
        if np.linalg.norm(groups.log(g)) <= 1e-4:
            continue
        n += 1
        for side in ("left", "right"):
            assert lifted_freeness_defect(spec, side, g, p) > 1e-6


def test_lifted_psi_example():
    spec = builtin_action("so2-r2")
    p = LiftedPoint(rotation2(math.pi / 6), spec.point([1, 0]))
    q = lifted_psi(spec, p, rotation2(math.pi / 3))
    np.testing.assert_allclose(q.group_part.matrix, rotation2(math.pi / 2).matrix, atol=1e-15)
    np.testing.assert_allclose(q.base_part.coords, [0.5, math.sqrt(3) / 2], atol=1e-15)
    e = lifted_psi(spec, p, spec.group.identity())
    np.testing.assert_allclose(e.group_part.matrix, p.group_part.matrix)


@pytest.mark.parametrize("name", ALL_ACTIONS)
def test_lifted_psi_projects(name, rng):
    spec = builtin_action(name)
    for _ in range(20):
        p = lifted_sample(spec, rng)
        g = groups.random_element(spec.group, rng)
        q = lifted_psi(spec, p, g)
        assert groups.distance(q.group_part, g @ p.group_part) < 1e-12
        np.testing.assert_allclose(project(q).coords, psi_eval(spec, p.base_part, g).coords,
                                   atol=1e-12)


@pytest.mark.parametrize("name", ALL_ACTIONS)
@pytest.mark.parametrize("side", ["left", "right"])
def test_lifted_rank_is_group_dim(name, side, rng):
    spec = builtin_action(name)
    for _ in range(10):
        p = lifted_sample(spec, rng)
        g = groups.random_element(spec.group, rng)
        assert lifted_rank(spec, side, p, g) == spec.group.group_dim


@pytest.mark.parametrize("side", ["left", "right"])
def test_lifted_jacobian_matches_fd(side, rng):
    spec = builtin_action("se2-r2")
    p = lifted_sample(spec, rng)
    g = groups.random_element(spec.group, rng)
    a = lifted_jacobian(spec, side, p, g)
    f = lifted_jacobian(spec, side, p, g, analytic=False)
    np.testing.assert_allclose(a, f, atol=1e-6)


def test_origin_fixed_but_lift_free():
    spec = builtin_action("so2-r2")
    p = LiftedPoint(spec.group.identity(), spec.point([0, 0]))
    assert lifted_rank(spec, "left", p, rotation2(0.4)) == 1
