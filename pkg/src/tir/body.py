"""Parametric body for fit checks.

A body is a loft of horizontal elliptical sections: each control point
is (height z in cm, girth in cm); girth interpolates linearly between
controls. The loft gives both a watertight triangle mesh for export and
a fast analytic radius query the cloth solver collides against.

Sections use a fixed depth-to-width aspect, and the ellipse is sized so
its perimeter equals the tape girth, because a tape measure reads the
perimeter the garment must share, whatever the cross-section shape.
"""

from __future__ import annotations

import json
import math
import importlib.resources
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# Band layout as fractions of total body height, bottom to top.
BAND_FRACTIONS = (
    ("hip", 0.46, 0.57),
    ("waist", 0.57, 0.67),
    ("bust", 0.67, 0.77),
    ("neck", 0.77, 0.84),
)

BAND_ORDER = ("hip", "waist", "bust", "neck")


class UnknownSize(KeyError):
    pass


@lru_cache(maxsize=1)
def size_chart() -> dict:
    path = importlib.resources.files("tir.data") / "sizes.json"
    return json.loads(path.read_text(encoding="utf-8"))


def _ellipse_semi_axes(girth: float, aspect: float) -> tuple[float, float]:
    """Semi-axes (a, b) with b = aspect * a whose perimeter is girth.

    Uses Ramanujan's perimeter approximation, solved by bisection; the
    approximation error is far below a millimetre at body scale.
    """
    def perimeter(a: float) -> float:
        b = aspect * a
        h = ((a - b) / (a + b)) ** 2
        return math.pi * (a + b) * (1 + 3 * h / (10 + math.sqrt(4 - 3 * h)))

    lo, hi = 1e-6, girth  # perimeter(girth) >> girth
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if perimeter(mid) < girth:
            lo = mid
        else:
            hi = mid
    a = 0.5 * (lo + hi)
    return a, aspect * a


@dataclass(frozen=True)
class BodyModel:
    """Loft of elliptical sections; z increases upward."""

    size_label: str
    sections: tuple[tuple[float, float], ...]  # (z_cm, girth_cm), z ascending
    aspect: float = 0.7
    bands: tuple[tuple[str, float, float], ...] = ()
    measurements: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        if len(self.sections) < 2:
            raise ValueError("a body needs at least two sections")
        zs = [z for z, _ in self.sections]
        if any(b <= a for a, b in zip(zs, zs[1:])):
            raise ValueError("section heights must strictly increase")
        if any(g <= 0 for _, g in self.sections):
            raise ValueError("section girths must be > 0")
        if not 0 < self.aspect <= 1.0:
            raise ValueError("aspect must lie in (0, 1]")

    @property
    def z_min(self) -> float:
        return self.sections[0][0]

    @property
    def z_max(self) -> float:
        return self.sections[-1][0]

    def girth_at(self, z) -> np.ndarray:
        """Linear interpolation of girth over height, clamped at the ends."""
        zs = np.array([s[0] for s in self.sections])
        gs = np.array([s[1] for s in self.sections])
        return np.interp(np.asarray(z, dtype=float), zs, gs)

    def semi_axes_at(self, z) -> tuple[np.ndarray, np.ndarray]:
        girth = np.atleast_1d(self.girth_at(z))
        a = np.array([_ellipse_semi_axes(g, self.aspect)[0] for g in girth])
        return a, self.aspect * a

    def radius_at(self, z, theta) -> np.ndarray:
        """Measured-surface radius along direction theta at height z."""
        a, b = self.semi_axes_at(z)
        th = np.asarray(theta, dtype=float)
        return (a * b) / np.sqrt((b * np.cos(th)) ** 2 + (a * np.sin(th)) ** 2)

    def band_of(self, z) -> str | None:
        for name, lo, hi in self.bands:
            if lo <= z < hi:
                return name
        return None

    def band_girth(self, name: str) -> float:
        """Representative (maximum) girth within a band."""
        for band, lo, hi in self.bands:
            if band == name:
                zs = np.linspace(lo, hi, 16)
                return float(self.girth_at(zs).max())
        raise KeyError(name)

    def mesh(self, n_theta: int = 48, dz: float = 2.0):
        """Watertight triangle mesh (vertices (n,3), faces (m,3) int).

        Rings of n_theta vertices per sampled height plus capped ends;
        every edge borders exactly two triangles.
        """
        z_lo, z_hi = self.z_min, self.z_max
        n_rings = max(2, int(math.ceil((z_hi - z_lo) / dz)) + 1)
        zs = np.linspace(z_lo, z_hi, n_rings)
        thetas = np.linspace(0.0, 2 * math.pi, n_theta, endpoint=False)
        verts = []
        for z in zs:
            r = self.radius_at(z, thetas)
            verts.append(
                np.column_stack(
                    [r * np.cos(thetas), r * np.sin(thetas), np.full(n_theta, z)]
                )
            )
        vertices = np.vstack(verts)
        faces = []
        for ring in range(n_rings - 1):
            base0 = ring * n_theta
            base1 = (ring + 1) * n_theta
            for k in range(n_theta):
                k1 = (k + 1) % n_theta
                faces.append((base0 + k, base0 + k1, base1 + k))
                faces.append((base0 + k1, base1 + k1, base1 + k))
        bottom_center = len(vertices)
        top_center = len(vertices) + 1
        vertices = np.vstack(
            [vertices, [[0.0, 0.0, z_lo]], [[0.0, 0.0, z_hi]]]
        )
        for k in range(n_theta):
            k1 = (k + 1) % n_theta
            faces.append((k1, k, bottom_center))
            top_base = (n_rings - 1) * n_theta
            faces.append((top_base + k, top_base + k1, top_center))
        return vertices, np.array(faces, dtype=np.int64)


def from_measurements(
    size_label: str,
    bust: float,
    waist: float,
    hip: float,
    height: float,
    aspect: float = 0.7,
) -> BodyModel:
    """Torso loft from tape measurements.

    Landmark heights follow common proportions of total height; the
    loft spans upper thigh to neck base.
    """
    for name, v in (("bust", bust), ("waist", waist), ("hip", hip),
                    ("height", height)):
        if v <= 0:
            raise ValueError(f"{name} must be > 0")
    h = height
    neck = 0.42 * bust
    sections = (
        (0.42 * h, 0.97 * hip),
        (0.52 * h, hip),
        (0.62 * h, waist),
        (0.72 * h, bust),
        (0.80 * h, 0.80 * bust),
        (0.84 * h, neck),
    )
    bands = tuple(
        (name, lo * h, hi * h) for name, lo, hi in BAND_FRACTIONS
    )
    return BodyModel(
        size_label=size_label,
        sections=sections,
        aspect=aspect,
        bands=bands,
        measurements=(
            ("bust", bust), ("waist", waist), ("hip", hip), ("height", height)
        ),
    )


def from_chart(size_label: str, aspect: float = 0.7) -> BodyModel:
    chart = size_chart()
    if size_label not in chart:
        raise UnknownSize(size_label)
    m = chart[size_label]
    return from_measurements(
        size_label, m["bust"], m["waist"], m["hip"], m["height"], aspect=aspect
    )


def cylinder(
    size_label: str,
    girth: float,
    z_lo: float,
    z_hi: float,
    aspect: float = 1.0,
) -> BodyModel:
    """Constant-girth test body; bands split the span in four."""
    quarters = np.linspace(z_lo, z_hi, 5)
    bands = tuple(
        (BAND_ORDER[k], float(quarters[k]), float(quarters[k + 1]))
        for k in range(4)
    )
    return BodyModel(
        size_label=size_label,
        sections=((z_lo, girth), (z_hi, girth)),
        aspect=aspect,
        bands=bands,
        measurements=(("girth", girth),),
    )


def from_spec(spec) -> BodyModel:
    """Accepts a chart label or an inline measurement mapping."""
    if isinstance(spec, str):
        return from_chart(spec)
    if isinstance(spec, BodyModel):
        return spec
    if isinstance(spec, dict):
        label = spec.get("size_label", "custom")
        if "sections" in spec:
            sections = tuple((float(z), float(g)) for z, g in spec["sections"])
            body = BodyModel(
                size_label=label,
                sections=sections,
                aspect=float(spec.get("aspect", 0.7)),
                bands=tuple(
                    (str(n), float(lo), float(hi))
                    for n, lo, hi in spec.get("bands", ())
                ),
            )
            if not body.bands:
                quarters = np.linspace(body.z_min, body.z_max, 5)
                body = BodyModel(
                    size_label=label,
                    sections=sections,
                    aspect=body.aspect,
                    bands=tuple(
                        (BAND_ORDER[k], float(quarters[k]), float(quarters[k + 1]))
                        for k in range(4)
                    ),
                )
            return body
        return from_measurements(
            label,
            bust=float(spec["bust"]),
            waist=float(spec["waist"]),
            hip=float(spec["hip"]),
            height=float(spec["height"]),
            aspect=float(spec.get("aspect", 0.7)),
        )
    raise TypeError(f"cannot build a body from {type(spec)!r}")
