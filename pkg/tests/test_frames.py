import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lieact import groups
from lieact.actions import act, builtin_action
from lieact.errors import ChartDomainError, ConstructionError
from lieact.frames import (
    build_cross_section,
    decompose_check,
    flat_chart,
    induced_act,
    invariant_coords,
    moving_frame,
    to_handle,
    write_chart_table,
)
from lieact.groups import rotation2

FREE = ["so2-r2-punctured", "scaling2-r2-punctured", "translations1-r1",
        "translations2-r2", "translations3-r3", "translations2-self", "affine-self",
        "scaling1-self"]
seeds = st.integers(0, 2**32 - 1)


def chart_for(name, method="auto"):
    spec = builtin_action(name)
    return spec, flat_chart(spec, x0=spec.point(spec.default_point), method=method)


def test_so2_section():
    spec = builtin_action("so2-r2-punctured")
    sec = build_cross_section(spec, spec.point([1, 0]))
    np.testing.assert_allclose(sec.normal, [[1.0], [0.0]], atol=1e-12)
    np.testing.assert_allclose(sec.embed_coords([0.5]), [1.5, 0.0], atol=1e-12)
    assert sec.transversality_rank([0.5]) == 2
    assert not sec.valid([-1.5])


def test_translation_section_is_a_point():
    spec = builtin_action("translations2-r2")
    sec = build_cross_section(spec, spec.point([0, 0]))
    assert sec.param_dim == 0
    np.testing.assert_array_equal(sec.embed_coords([]), [0, 0])


def test_scaling_section_normal():
    spec = builtin_action("scaling2-r2-punctured")
    sec = build_cross_section(spec, spec.point([1, 0]))
    np.testing.assert_allclose(sec.normal, [[0.0], [1.0]], atol=1e-12)


def test_section_needs_local_freeness():
    spec = builtin_action("se2-r2")
    with pytest.raises(ConstructionError):
        build_cross_section(spec, spec.point([1, 0]))
    spec = builtin_action("so2-r2")
    with pytest.raises(ConstructionError):
        build_cross_section(spec, spec.point([0, 0]))


def test_flat_chart_needs_free_action():
    spec = builtin_action("so2-r2")
    with pytest.raises(ConstructionError):
        flat_chart(spec, x0=spec.point([1, 0]))
    with pytest.raises(ConstructionError):
        flat_chart(spec)


def test_polar_example():
    spec, chart = chart_for("so2-r2-punctured")
    h, z = chart.to_flat(spec.point([0, 2]))
    np.testing.assert_allclose(h.matrix, rotation2(math.pi / 2).matrix, atol=1e-15)
    np.testing.assert_allclose(z, [1.0], atol=1e-15)
    np.testing.assert_allclose(moving_frame(chart, spec.point([0, 2])).matrix,
                               rotation2(-math.pi / 2).matrix, atol=1e-15)
    np.testing.assert_allclose(invariant_coords(chart, spec.point([0, 2])), [1.0])


def test_chart_domain():
    spec, chart = chart_for("scaling2-r2-punctured")
    assert chart.chart_domain(spec.point([1, 1]))
    assert not chart.chart_domain(spec.point([-1, 1]))
    with pytest.raises(ChartDomainError):
        chart.to_flat(spec.point([-1, 0]))


@pytest.mark.parametrize("name", FREE)
@pytest.mark.parametrize("method", ["auto", "newton"])
def test_section_points_have_identity_frame(name, method):
    spec, chart = chart_for(name, method)
    d = chart.cross_section.param_dim
    for z in ([0.0] * d, [0.2] * d):
        h, zz = chart.to_flat(chart.cross_section.embed(z))
        assert groups.distance(h, spec.group.identity()) < 1e-9
        np.testing.assert_allclose(zz, z, atol=1e-9)


@pytest.mark.parametrize("name", FREE)
@pytest.mark.parametrize("method", ["auto", "newton"])
@given(seed=seeds)
def test_flat_chart_properties(name, method, seed):
    spec, chart = chart_for(name, method)
    tol = 1e-9 if method == "auto" else 1e-6
    r = np.random.default_rng(seed)
    d = chart.cross_section.param_dim
    e = spec.group.identity()
    rdim = spec.group.group_dim
    # Newton is local: keep points and their translates near the section
    near = 0.4 if method == "newton" else 1.5
    h0 = groups.chart_point(r.uniform(-near / 2, near / 2, size=rdim), e)
    x = chart.from_flat(h0, r.uniform(-0.3, 0.3, size=d))
    g = groups.chart_point(r.uniform(-near / 2, near / 2, size=rdim), e)
    h, z = chart.to_flat(x)
    np.testing.assert_allclose(chart.from_flat(h, z).coords, x.coords, atol=tol, rtol=tol)
    hg, zg = chart.to_flat(act(spec, g, x))
    assert groups.distance(hg, g @ h) < tol * 10
    np.testing.assert_allclose(zg, z, atol=tol)
    rho = moving_frame(chart, x)
    assert chart.cross_section.distance(act(spec, rho, x)) < tol
    assert groups.distance(moving_frame(chart, act(spec, g, x)), rho @ g.inv) < tol * 10


def test_newton_agrees_with_closed_form(rng):
    spec, a = chart_for("so2-r2-punctured")
    _, n = chart_for("so2-r2-punctured", "newton")
    for _ in range(20):
        x = a.from_flat(rotation2(rng.uniform(-1, 1)), [rng.uniform(-0.5, 0.5)])
        ha, za = a.to_flat(x)
        hn, zn = n.to_flat(x)
        assert groups.distance(ha, hn) < 1e-8
        np.testing.assert_allclose(za, zn, atol=1e-8)


def test_orbit_separation():
    spec, chart = chart_for("so2-r2-punctured")
    z1 = invariant_coords(chart, spec.point([0.5, 0.5]))
    z2 = invariant_coords(chart, spec.point([1.0, 1.0]))
    assert abs(z1[0] - z2[0]) > 1e-3


def test_transitive_quotient_is_empty():
    spec, chart = chart_for("translations2-r2")
    assert invariant_coords(chart, spec.point([3, 4])).shape == (0,)


def test_induced_action():
    spec = builtin_action("so2-r2-punctured")
    f = to_handle(spec, spec.point([1, 0]))
    assert induced_act(spec.group.identity(), f).base is not None
    np.testing.assert_allclose(induced_act(spec.group.identity(), f).base.coords, [1, 0])
    g = rotation2(math.pi / 2)
    np.testing.assert_allclose(induced_act(g, f)(spec.group.identity()).coords, [0, 1],
                               atol=1e-15)
    h = rotation2(0.3)
    np.testing.assert_allclose(induced_act(g, f)(h).coords,
                               act(spec, h, act(spec, g, f.base)).coords, atol=1e-15)


@pytest.mark.parametrize("name", FREE)
def test_decomposition(name, rng):
    spec, chart = chart_for(name)
    d = chart.cross_section.param_dim
    samples = [(groups.random_element(spec.group, rng, 0.5),
                groups.random_element(spec.group, rng, 0.5),
                rng.uniform(-0.3, 0.3, size=d)) for _ in range(30)]
    rep = decompose_check(spec, chart, chart, samples)
    assert rep.samples == 30 and rep.eq14_equivariance < 1e-8
    if d:
        assert rep.eq15_invariance < 1e-8 and rep.identity_slice < 1e-8
    else:
        assert rep.eq15_invariance is None


def test_chart_table(tmp_path):
    spec, chart = chart_for("so2-r2-punctured")
    path = tmp_path / "t.csv"
    write_chart_table(chart, [spec.point([0, 2])], path)
    header, row = path.read_text().splitlines()
    assert header == "coord_0,coord_1,h_chart_0,z_0"
    vals = [float(v) for v in row.split(",")]
    np.testing.assert_allclose(vals, [0, 2, math.pi / 2, 1], atol=1e-15)
