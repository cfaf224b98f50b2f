from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from tir import body as body_mod
from tir import drape, ir, materials, topology

COTTON = "cotton_organic_TX-2847"

FIXTURES = Path(__file__).parent / "fixtures"


def rect_piece(pid: str, w: float, h: float, allowance: float = 0.0) -> ir.PatternPiece:
    alw = (allowance,) * 4 if allowance else ()
    return ir.PatternPiece(
        id=pid,
        boundary=((0.0, 0.0), (w, 0.0), (w, h), (0.0, h)),
        allowance_cm=alw,
    )


def tube_graph(width: float, height: float = 40.0, material: str = COTTON) -> ir.GarmentGraph:
    """One rectangle seamed into a cylinder (edge 1 onto edge 3)."""
    piece = rect_piece("body", width, height)
    seam = ir.SeamEdge(
        id="side", side_a=ir.SeamSide("body", 1), side_b=ir.SeamSide("body", 3)
    )
    region = ir.MaterialRegion(id="all", piece_ids=("body",), material_id=material)
    return ir.build_graph("tube_test", [piece], seams=[seam], regions=[region])


def square_graph(side: float = 30.0, material: str = COTTON) -> ir.GarmentGraph:
    piece = rect_piece("sq", side, side)
    region = ir.MaterialRegion(id="all", piece_ids=("sq",), material_id=material)
    return ir.build_graph("swatch", [piece], regions=[region])


def mesh_of(faces) -> topology.MergedMesh:
    """MergedMesh for a raw triangle soup; edge identity = vertex pair."""
    faces = np.asarray(faces, dtype=np.int64)
    n = int(faces.max()) + 1
    pairs = np.stack(
        [faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]], axis=1
    ).reshape(-1, 2)
    enc = pairs.min(axis=1) * np.int64(n) + pairs.max(axis=1)
    uniq, inv = np.unique(enc, return_inverse=True)
    return topology.MergedMesh(
        pieces={},
        n_vertices=n,
        faces=faces,
        face_edge_class=inv.reshape(faces.shape),
        n_edge_classes=len(uniq),
    )


def pin_top_corners(sim: drape.SimMesh) -> None:
    xs, zs = sim.vertices[:, 0], sim.vertices[:, 2]
    top = zs >= zs.max() - 1e-9
    for corner_x in (xs.min(), xs.max()):
        sim.pinned[np.flatnonzero(top & (np.abs(xs - corner_x) < 1e-6))] = True


def gather_top_edge(sim: drape.SimMesh, gather: float) -> None:
    """Pin the whole top row onto a line shortened to gather x rest span."""
    xs, zs = sim.vertices[:, 0], sim.vertices[:, 2]
    top = zs >= zs.max() - 1e-9
    cx = 0.5 * (xs.min() + xs.max())
    sim.vertices[top, 0] = cx + gather * (xs[top] - cx)
    sim.pinned[top] = True


def hoop_band_strain(sim: drape.SimMesh, result: drape.DrapeResult,
                     z_lo: float, z_hi: float) -> np.ndarray:
    """Strains of near-horizontal edges whose endpoints sit inside the band."""
    z = result.positions[:, 2]
    e0, e1 = sim.edges[:, 0], sim.edges[:, 1]
    mid = (z[e0] > z_lo) & (z[e0] < z_hi) & (z[e1] > z_lo) & (z[e1] < z_hi)
    d = result.positions[e1] - result.positions[e0]
    horiz = np.abs(d[:, 2]) < 0.3 * np.linalg.norm(d, axis=1)
    return result.edge_strain[mid & horiz]


@pytest.fixture(scope="session")
def db() -> materials.MaterialDB:
    return materials.load_material_db()


@pytest.fixture(scope="session")
def body100() -> body_mod.BodyModel:
    return body_mod.cylinder("test", 100.0, 0.0, 40.0)


@pytest.fixture(scope="session")
def drape95(db, body100):
    return drape.run_drape(tube_graph(95.0), db, body100, drape.DrapeConfig())


@pytest.fixture(scope="session")
def drape85(db, body100):
    return drape.run_drape(tube_graph(85.0), db, body100, drape.DrapeConfig())


@pytest.fixture(scope="session")
def drape120(db, body100):
    return drape.run_drape(tube_graph(120.0), db, body100, drape.DrapeConfig())


@pytest.fixture(scope="session")
def square_hang(db):
    """30 cm square pinned at its two top corners, no body."""
    cfg = drape.DrapeConfig()
    sim = drape.build_sim_mesh(square_graph(), db, cfg)
    pin_top_corners(sim)
    return sim, drape.drape(sim, None, cfg)
