from __future__ import annotations

import math

import numpy as np
import pytest

from tir import body

from conftest import mesh_of
from tir.topology import analyse


def test_cylinder_girth_and_radius():
    c = body.cylinder("t", 100.0, 0.0, 40.0)
    assert float(c.girth_at(20.0)) == pytest.approx(100.0)
    r = 100.0 / (2.0 * math.pi)
    a, b = c.semi_axes_at(20.0)
    assert float(a[0]) == pytest.approx(r)
    assert float(b[0]) == pytest.approx(r)
    assert c.radius_at(20.0, 1.234).item() == pytest.approx(r)


def test_cylinder_bands_quarter_the_span():
    c = body.cylinder("t", 100.0, 0.0, 40.0)
    assert c.bands == (
        ("hip", 0.0, 10.0),
        ("waist", 10.0, 20.0),
        ("bust", 20.0, 30.0),
        ("neck", 30.0, 40.0),
    )
    assert c.band_of(5.0) == "hip"
    assert c.band_of(39.0) == "neck"
    assert c.band_of(45.0) is None
    assert c.band_girth("waist") == pytest.approx(100.0)
    with pytest.raises(KeyError):
        c.band_girth("ankle")


def test_chart_body_sections_span_torso():
    b = body.from_chart("M")
    zs = [s[0] for s in b.sections]
    assert zs == sorted(zs)
    assert b.z_min == pytest.approx(zs[0])
    assert b.z_max == pytest.approx(zs[-1])
    assert b.band_of(0.55 * 164.0) == "hip"
    assert b.band_girth("hip") >= b.band_girth("waist")


def test_girth_interpolates_linearly_between_sections():
    b = body.BodyModel(
        size_label="x",
        sections=((0.0, 80.0), (10.0, 100.0)),
        aspect=1.0,
        bands=(("hip", 0.0, 10.0),),
    )
    assert float(b.girth_at(5.0)) == pytest.approx(90.0)
    assert float(b.girth_at(-5.0)) == pytest.approx(80.0)
    assert float(b.girth_at(99.0)) == pytest.approx(100.0)


def test_ellipse_sections_preserve_girth():
    c = body.cylinder("t", 100.0, 0.0, 40.0, aspect=0.7)
    a, b = c.semi_axes_at(20.0)
    a, b = float(a[0]), float(b[0])
    assert b == pytest.approx(0.7 * a)
    # Perimeter of the ellipse must reproduce the measured girth.
    th = np.linspace(0.0, 2.0 * math.pi, 20001)
    pts = np.column_stack([a * np.cos(th), b * np.sin(th)])
    per = float(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum())
    assert per == pytest.approx(100.0, rel=1e-4)


def test_mesh_is_watertight_sphere_topology():
    c = body.cylinder("t", 100.0, 0.0, 40.0)
    verts, faces = c.mesh()
    shell = analyse(mesh_of(faces))
    assert shell.manifold
    assert shell.orientable
    assert shell.boundary_loops == 0
    assert shell.euler_characteristic == 2
    assert len(verts) - shell.n_edges + len(faces) == 2


def test_unknown_size_raises():
    with pytest.raises(body.UnknownSize):
        body.from_chart("XXXS")


def test_bad_measurements_rejected():
    with pytest.raises(ValueError):
        body.from_measurements("x", bust=0.0, waist=70.0, hip=95.0, height=165.0)
    with pytest.raises(ValueError):
        body.BodyModel(
            size_label="x",
            sections=((0.0, 80.0),),
            aspect=1.0,
            bands=(),
        )
    with pytest.raises(ValueError):
        body.BodyModel(
            size_label="x",
            sections=((10.0, 80.0), (0.0, 90.0)),
            aspect=1.0,
            bands=(),
        )


def test_from_spec_accepts_label_model_and_dict():
    assert body.from_spec("M").size_label == "M"
    c = body.cylinder("t", 100.0, 0.0, 40.0)
    assert body.from_spec(c) is c
    d = body.from_spec(
        {"size_label": "d", "sections": [(0.0, 100.0), (40.0, 100.0)]}
    )
    assert d.band_of(5.0) == "hip"
    m = body.from_spec(
        {"bust": 92.0, "waist": 74.0, "hip": 98.0, "height": 166.0}
    )
    assert m.size_label == "custom"
    with pytest.raises(TypeError):
        body.from_spec(42)
