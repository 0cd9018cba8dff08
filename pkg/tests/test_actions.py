import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lieact import groups
from lieact.actions import (
    Point,
    act,
    builtin_action,
    builtin_actions,
    check_points,
    constant_rank_check,
    fd_jacobian,
    jacobian_g,
    jacobian_x,
    orbit_sample,
    psi_eval,
    rank_at,
    write_orbit_csv,
)
from lieact.errors import DomainError, UsageError
from lieact.groups import rotation2, translation

ALL_ACTIONS = sorted(builtin_actions())
seeds = st.integers(0, 2**32 - 1)


def test_catalog_is_sorted_and_complete():
    names = list(builtin_actions())
    assert names == sorted(names)
    assert "so2-r2-punctured" in names and len(names) == 12


def test_unknown_action():
    with pytest.raises(UsageError):
        builtin_action("so5-r5")


def test_rotation_example():
    spec = builtin_action("so2-r2")
    y = act(spec, rotation2(math.pi / 2), spec.point([1, 0]))
    np.testing.assert_allclose(y.coords, [0, 1], atol=1e-15)


@pytest.mark.parametrize("name", ALL_ACTIONS)
def test_identity_acts_trivially(name, rng):
    spec = builtin_action(name)
    x = spec.sample_point(rng)
    np.testing.assert_allclose(act(spec, spec.group.identity(), x).coords, x.coords,
                               atol=1e-15)


def test_translation_action_example():
    spec = builtin_action("translations2-r2")
    np.testing.assert_array_equal(act(spec, translation([1, 2]), spec.point([0, 0])).coords,
                                  [1, 2])


def test_psi_eval_half_turn():
    spec = builtin_action("so2-r2")
    np.testing.assert_allclose(psi_eval(spec, spec.point([1, 0]), rotation2(math.pi)).coords,
                               [-1, 0], atol=1e-15)


def test_domain_violations():
    spec = builtin_action("so2-r2-punctured")
    with pytest.raises(DomainError):
        spec.point([0, 0])
    with pytest.raises(DomainError):
        spec.point([1, 0, 0])
    with pytest.raises(DomainError):
        act(spec, rotation2(0.1), Point([1, 0], "r2"))
    with pytest.raises(DomainError):
        Point([math.nan, 0], "r2")


def test_group_mismatch():
    spec = builtin_action("so2-r2")
    with pytest.raises(UsageError):
        act(spec, translation([1, 0]), spec.point([1, 0]))


@pytest.mark.parametrize("name", ALL_ACTIONS)
@given(seed=seeds)
def test_compatibility_and_equivariance(name, seed):
    spec = builtin_action(name)
    r = np.random.default_rng(seed)
    g, h = groups.random_element(spec.group, r), groups.random_element(spec.group, r)
    x = spec.sample_point(r)
    lhs = act(spec, g @ h, x).coords
    np.testing.assert_allclose(lhs, act(spec, g, act(spec, h, x)).coords, atol=1e-9, rtol=1e-9)
    np.testing.assert_allclose(psi_eval(spec, x, g @ h).coords,
                               act(spec, g, psi_eval(spec, x, h)).coords, atol=1e-9, rtol=1e-9)
    back = act(spec, g.inv, act(spec, g, x)).coords
    np.testing.assert_allclose(back, x.coords, atol=1e-9, rtol=1e-9)


# -- orbits ------------------------------------------------------------------

def test_translation_orbit_distinct():
    spec = builtin_action("translations2-r2")
    pts = orbit_sample(spec, spec.point([0, 0]), 3, 7)
    coords = {tuple(p.coords) for p in pts}
    assert len(coords) == 3


def test_punctured_orbit_on_circle():
    spec = builtin_action("so2-r2-punctured")
    for p in orbit_sample(spec, spec.point([1, 0]), 50, 3):
        assert abs(np.linalg.norm(p.coords) - 1) < 1e-12


def test_fixed_point_orbit():
    spec = builtin_action("so2-r2")
    for p in orbit_sample(spec, spec.point([0, 0]), 10, 3):
        np.testing.assert_array_equal(p.coords, [0, 0])


def test_orbit_sample_seeded():
    spec = builtin_action("se2-r2")
    a = orbit_sample(spec, spec.point([1, 0]), 5, 11)
    b = orbit_sample(spec, spec.point([1, 0]), 5, 11)
    assert all(np.array_equal(p.coords, q.coords) for p, q in zip(a, b))
    assert orbit_sample(spec, spec.point([1, 0]), 0, 11) == []
    with pytest.raises(UsageError):
        orbit_sample(spec, spec.point([1, 0]), -1, 11)


def test_orbit_csv(tmp_path):
    spec = builtin_action("so2-r2-punctured")
    path = tmp_path / "o.csv"
    write_orbit_csv(orbit_sample(spec, spec.point([1, 0]), 2, 1), path, spec.domain_id, 2)
    lines = path.read_text().splitlines()
    assert lines[0] == "domain_id,i,coord_0,coord_1"
    assert lines[1].startswith("r2-punctured,0,") and len(lines) == 3


# -- ranks and Jacobians -----------------------------------------------------

def test_fd_richardson_order():
    f = lambda x: np.array([np.sin(x[0]) * np.exp(x[1])])  # noqa: E731
    x = np.array([0.7, -0.3])
    exact = np.array([[np.cos(0.7) * np.exp(-0.3), np.sin(0.7) * np.exp(-0.3)]])
    e2 = np.abs(fd_jacobian(f, x, 1e-2) - exact).max()
    e4 = np.abs(fd_jacobian(f, x, 1e-2, fd_order=4) - exact).max()
    assert e4 < e2 / 100
    with pytest.raises(UsageError):
        fd_jacobian(f, x, 1e-2, fd_order=3)


def test_fd_jacobian_linear_map():
    a = np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
    np.testing.assert_allclose(fd_jacobian(lambda x: a @ x, np.ones(2), 1e-6), a, atol=1e-8)


@pytest.mark.parametrize("name", [n for n in ALL_ACTIONS if builtin_action(n).has_analytic])
@given(seed=seeds)
def test_analytic_jacobians_match_fd(name, seed):
    spec = builtin_action(name)
    r = np.random.default_rng(seed)
    g, x = groups.random_element(spec.group, r), spec.sample_point(r)
    for jac in (jacobian_x, jacobian_g):
        a = jac(spec, g, x)
        f = jac(spec, g, x, analytic=False)
        assert np.max(np.abs(a - f)) < 1e-5 * (1 + np.max(np.abs(a)))


def test_rank_examples():
    so2 = builtin_action("so2-r2")
    assert rank_at(so2, so2.point([0, 0])) == 0
    assert rank_at(so2, so2.point([1, 0])) == 1
    assert rank_at(so2, so2.point([1, 0]), analytic=False) == 1
    t2 = builtin_action("translations2-r2")
    assert rank_at(t2, t2.point([3, -1])) == 2


@pytest.mark.parametrize("name", ALL_ACTIONS)
def test_rank_matches_table(name, rng):
    spec = builtin_action(name)
    for _ in range(20):
        x = spec.sample_point(rng)
        g = groups.random_element(spec.group, rng)
        assert rank_at(spec, x, g) == spec.orbit_dim(act(spec, g, x).coords)


@pytest.mark.parametrize("name,x,rank", [
    ("so2-r2-punctured", [1, 0], 1), ("translations2-r2", [0, 0], 2), ("se2-r2", [1, 0], 2),
])
def test_constant_rank(name, x, rank):
    spec = builtin_action(name)
    rep = constant_rank_check(spec, spec.point(x), 100, 5)
    assert rep.passed and rep.ranks == {rank}


def test_constant_rank_needs_two_trials():
    spec = builtin_action("se2-r2")
    with pytest.raises(UsageError):
        constant_rank_check(spec, spec.point([1, 0]), 1, 0)


def test_check_points():
    spec = builtin_action("so2-r2-punctured")
    assert check_points(spec, [[1, 0], [0, 2]]).shape == (2, 2)
    with pytest.raises(DomainError):
        check_points(spec, [[1, 0], [0, 0]])
    with pytest.raises(UsageError):
        check_points(spec, [[1, 0, 0]])
