"""Piece triangulation and seam gluing into an assembled shell.

Every piece is triangulated in its own 2D frame over a boundary whose
seam intervals carry an agreed number of sample points; gluing then
identifies sample k on one side with its partner on the other side and
the result is analysed as an abstract triangle complex: manifoldness,
orientability, boundary loops, Euler characteristic and genus.

Correspondence convention: seam sides are matched antiparallel in
arclength (side a at fraction s meets side b at 1 - s), which is what
sewing two counter-clockwise pieces face to face produces; a seam with
flip set matches parallel instead. Darts are closed before gluing by
detouring the boundary through the apex and gluing the two legs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import Delaunay, QhullError
from shapely import contains_xy
from shapely.geometry import Polygon

from . import geometry, ir

SEAM_SAMPLE_STEP_CM = 0.5
SEAM_SAMPLE_MIN = 32


class GlueMismatch(ValueError):
    """Seam or dart sides that cannot be identified sample-to-sample."""


class MeshQuality(ValueError):
    """Triangulation below the minimum quality bar."""


def shell_sample_count(length_cm: float) -> int:
    return max(SEAM_SAMPLE_MIN, int(math.ceil(length_cm / SEAM_SAMPLE_STEP_CM)))


@dataclass
class PieceMesh:
    piece_id: str
    points: np.ndarray          # (n, 2) rest positions, piece frame
    triangles: np.ndarray       # (m, 3) local indices
    global_ids: np.ndarray      # (n,) indices into the merged complex
    boundary_count: int         # first boundary_count points trace the rim


@dataclass
class MergedMesh:
    """Glued union of piece triangulations sharing one global index space.

    Edges are entities, not vertex pairs: two triangles share an edge
    only when they share a planar triangulation edge of one piece or a
    seam/dart explicitly glues their rims. Two congruent pieces sewn
    around their whole rim otherwise alias chords between merged rim
    vertices and corrupt the Euler count.
    """

    pieces: dict[str, PieceMesh]
    n_vertices: int
    faces: np.ndarray            # (M, 3) global indices, degenerates removed
    face_edge_class: np.ndarray  # (M, 3); column k = class of edge k->k+1
    n_edge_classes: int
    side_chains: dict[tuple[str, str], list[int]] = field(default_factory=dict)

    def piece_of_global(self) -> list[list[tuple[str, int]]]:
        origins: list[list[tuple[str, int]]] = [[] for _ in range(self.n_vertices)]
        for pid, pm in self.pieces.items():
            for local, g in enumerate(pm.global_ids):
                origins[g].append((pid, local))
        return origins


@dataclass(frozen=True)
class ComponentTopology:
    n_vertices: int
    n_edges: int
    n_faces: int
    boundary_loops: int
    orientable: bool
    euler_characteristic: int
    genus: int | None


@dataclass(frozen=True)
class AssembledShell:
    n_vertices: int
    n_edges: int
    n_faces: int
    boundary_loops: int
    orientable: bool
    manifold: bool
    euler_characteristic: int
    genus: int | None
    components: tuple[ComponentTopology, ...]
    mesh: MergedMesh
    loop_vertices: tuple[tuple[int, ...], ...] = ()


# -- dart closing ------------------------------------------------------


@dataclass
class _ClosedPiece:
    boundary: list[tuple[float, float]]
    # original edge index -> list of (new_edge, lo, hi) segments covering
    # the surviving parts of that edge, in increasing original param
    edge_map: dict[int, list[tuple[int, float, float]]]
    glue_pairs: list[tuple[int, int]]  # pairs of new edge indices to glue


def _close_darts(piece: ir.PatternPiece, darts: list[ir.Dart]) -> _ClosedPiece:
    """Rewrite the boundary so each dart wedge is cut out through the
    apex; the two cut edges are returned as glue pairs.

    Both legs of a dart must sit on the same original edge with the
    intake between them; anything else cannot be closed flat here.
    """
    n = len(piece.boundary)
    by_edge: dict[int, list[ir.Dart]] = {}
    for d in darts:
        (e0, t0), (e1, t1) = d.legs
        if e0 != e1:
            raise GlueMismatch(
                f"dart '{d.id}' legs span edges {e0} and {e1}; legs must "
                "share an edge"
            )
        if t0 > t1:
            t0, t1 = t1, t0
        if not (0.0 < t0 < t1 < 1.0):
            raise GlueMismatch(
                f"dart '{d.id}' legs must sit strictly inside their edge"
            )
        by_edge.setdefault(e0, []).append(
            ir.Dart(d.id, d.piece_id, d.apex, ((e0, t0), (e1, t1)))
        )
    for edge, group in by_edge.items():
        group.sort(key=lambda d: d.legs[0][1])
        for a, b in zip(group, group[1:]):
            if b.legs[0][1] < a.legs[1][1]:
                raise GlueMismatch(
                    f"darts '{a.id}' and '{b.id}' overlap on edge {edge}"
                )

    boundary: list[tuple[float, float]] = []
    edge_map: dict[int, list[tuple[int, float, float]]] = {}
    glue_pairs: list[tuple[int, int]] = []

    def current_edge_index() -> int:
        return len(boundary) - 1  # edge that starts at the last pushed point

    for e in range(n):
        start = piece.boundary[e]
        boundary.append(start)
        segments: list[tuple[int, float, float]] = []
        seg_lo = 0.0
        for d in by_edge.get(e, ()):  # ordered by intake start
            (_, ta), (_, tb) = d.legs
            if ta > seg_lo:
                segments.append((current_edge_index(), seg_lo, ta))
                boundary.append(geometry.point_on_edge(piece.boundary, e, ta))
            leg_in = current_edge_index()
            boundary.append(d.apex)
            leg_out = current_edge_index()
            boundary.append(geometry.point_on_edge(piece.boundary, e, tb))
            glue_pairs.append((leg_in, leg_out))
            seg_lo = tb
        segments.append((current_edge_index(), seg_lo, 1.0))
        edge_map[e] = segments
    # Last synthetic edge closes back to vertex 0; indices above relied on
    # edges being "start at pushed point", which holds cyclically.
    return _ClosedPiece(boundary=boundary, edge_map=edge_map, glue_pairs=glue_pairs)


def _remap_interval(
    closed: _ClosedPiece, edge: int, t0: float, t1: float
) -> tuple[int, float, float]:
    for new_edge, lo, hi in closed.edge_map[edge]:
        if t0 >= lo - 1e-12 and t1 <= hi + 1e-12:
            width = hi - lo
            return (new_edge, (t0 - lo) / width, (t1 - lo) / width)
    raise GlueMismatch(
        f"seam interval [{t0}:{t1}] on edge {edge} crosses a dart intake"
    )


# -- per-piece triangulation ------------------------------------------


def _triangulate(
    piece_id: str,
    boundary: list[tuple[float, float]],
    required: dict[int, list[float]],
    boundary_spacing: float | None,
    interior_spacing: float | None,
    min_angle_deg: float,
) -> tuple[np.ndarray, np.ndarray, dict[tuple[int, float], int], int]:
    """Triangulate one polygon.

    required[edge] lists edge params that must become vertices (seam and
    dart samples); the returned param index maps (edge, param) to a row
    of the point array. Points start with the boundary chain in order.
    """
    poly = np.asarray(boundary, dtype=float)
    n = len(poly)
    lengths = geometry.edge_lengths(poly)

    pts: list[tuple[float, float]] = []
    param_index: dict[tuple[int, float], int] = {}
    for e in range(n):
        params = {0.0}
        params.update(required.get(e, ()))
        params.discard(1.0)
        if boundary_spacing and lengths[e] > boundary_spacing:
            base = sorted(params | {1.0})
            extra = []
            for lo, hi in zip(base, base[1:]):
                span = (hi - lo) * lengths[e]
                n_sub = max(1, round(span / boundary_spacing))
                extra.extend(lo + (hi - lo) * j / n_sub for j in range(1, n_sub))
            params.update(extra)
        ordered = sorted(params)
        merged: list[float] = []
        for p in ordered:
            if merged and (p - merged[-1]) * lengths[e] < 1e-9:
                param_index[(e, p)] = len(pts) + len(merged) - 1
                continue
            merged.append(p)
        a, b = poly[e], poly[(e + 1) % n]
        for p in merged:
            param_index[(e, p)] = len(pts)
            q = a + p * (b - a)
            pts.append((float(q[0]), float(q[1])))
    boundary_count = len(pts)
    for e in range(n):
        param_index[(e, 1.0)] = param_index[((e + 1) % n, 0.0)]

    shape = Polygon(boundary)
    if not shape.is_valid or shape.area <= 0:
        raise MeshQuality(
            f"piece '{piece_id}' boundary is degenerate after dart closing"
        )
    if interior_spacing:
        min_x, min_y, max_x, max_y = geometry.bounding_box(poly)
        clearance = 0.55 * interior_spacing
        rows = int((max_y - min_y) / (interior_spacing * math.sqrt(3) / 2)) + 1
        cols = int((max_x - min_x) / interior_spacing) + 2
        cand = []
        for r in range(1, rows):
            y = min_y + r * interior_spacing * math.sqrt(3) / 2
            x0 = min_x + (interior_spacing / 2 if r % 2 else interior_spacing)
            for c in range(cols):
                cand.append((x0 + c * interior_spacing, y))
        if cand:
            cand_arr = np.array(cand)
            inner = shape.buffer(-clearance)
            if not inner.is_empty:
                keep = contains_xy(inner, cand_arr[:, 0], cand_arr[:, 1])
                pts.extend(map(tuple, cand_arr[keep]))

    points = np.array(pts, dtype=float)
    if len(points) < 3:
        raise MeshQuality(f"piece '{piece_id}' produced fewer than 3 mesh points")
    try:
        tri = Delaunay(points)
    except QhullError as exc:
        raise MeshQuality(f"piece '{piece_id}' triangulation failed: {exc}") from None
    cents = points[tri.simplices].mean(axis=1)
    inside = contains_xy(shape, cents[:, 0], cents[:, 1])
    triangles = tri.simplices[inside]
    if len(triangles) == 0:
        raise MeshQuality(f"piece '{piece_id}' has no interior triangles")

    # Fix winding to CCW so face orientations agree within a piece.
    a, b, c = (points[triangles[:, k]] for k in range(3))
    cross = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (
        b[:, 1] - a[:, 1]
    ) * (c[:, 0] - a[:, 0])
    flip = cross < 0
    triangles[flip] = triangles[flip][:, ::-1]

    _check_boundary_edges(piece_id, triangles, boundary_count)
    if min_angle_deg > 0:
        ang = _min_angle_deg(points, triangles)
        if ang < min_angle_deg:
            raise MeshQuality(
                f"piece '{piece_id}' min triangle angle {ang:.2f} deg "
                f"below {min_angle_deg} deg"
            )
    return points, triangles, param_index, boundary_count


def _check_boundary_edges(piece_id, triangles, boundary_count) -> None:
    m = np.int64(triangles.max()) + 1 if len(triangles) else np.int64(1)
    pairs = np.concatenate(
        [triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]]
    ).astype(np.int64)
    have = np.unique(pairs.min(axis=1) * m + pairs.max(axis=1))
    want_u = np.arange(boundary_count, dtype=np.int64)
    want_v = (want_u + 1) % boundary_count
    want = np.minimum(want_u, want_v) * m + np.maximum(want_u, want_v)
    missing = np.setdiff1d(want, have)
    if missing.size:
        u = int(missing[0] // m)
        v = int(missing[0] % m)
        raise GlueMismatch(
            f"piece '{piece_id}' boundary segment {u}-{v} missing from "
            "triangulation; boundary too coarse or polygon too thin"
        )


def _min_angle_deg(points: np.ndarray, triangles: np.ndarray) -> float:
    p = points[triangles]
    best = 180.0
    for k in range(3):
        a = p[:, k] - p[:, (k + 2) % 3]
        b = p[:, (k + 1) % 3] - p[:, (k + 2) % 3]
        na = np.linalg.norm(a, axis=1)
        nb = np.linalg.norm(b, axis=1)
        cosv = np.clip((a * b).sum(axis=1) / np.maximum(na * nb, 1e-30), -1, 1)
        best = min(best, float(np.degrees(np.arccos(cosv)).min()))
    return best


# -- gluing ------------------------------------------------------------


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _side_params(t0: float, t1: float, count: int) -> list[float]:
    return [t0 + (t1 - t0) * k / (count - 1) for k in range(count)]


def glue_graph(
    graph: ir.GarmentGraph,
    sample_count=shell_sample_count,
    boundary_spacing: float | None = None,
    interior_spacing: float | None = None,
    min_angle_deg: float = 0.0,
) -> MergedMesh:
    """Triangulate every piece and identify seam and dart samples.

    sample_count maps a side length in cm to the number of shared
    samples; both sides of a seam always use the count of the longer
    side so identification is one-to-one.
    """
    darts_by_piece: dict[str, list[ir.Dart]] = {}
    for d in graph.darts:
        darts_by_piece.setdefault(d.piece_id, []).append(d)

    closed: dict[str, _ClosedPiece] = {}
    for p in graph.pieces:
        closed[p.id] = _close_darts(p, darts_by_piece.get(p.id, []))

    def piece_spacing(p: ir.PatternPiece) -> float:
        # Interior structure must be fine enough that no triangle spans
        # between two glued edges, or gluing collapses it. Cap the grid
        # at a few thousand points per piece.
        area = abs(ir.piece_area(p))
        return max(2.0, math.sqrt(area / 4000.0))

    # Decide sample counts and collect required params per piece edge.
    required: dict[str, dict[int, list[float]]] = {p.id: {} for p in graph.pieces}
    seam_plan = []
    for s in graph.seams:
        len_a = ir.seam_side_length(graph, s.side_a)
        len_b = ir.seam_side_length(graph, s.side_b)
        if min(len_a, len_b) <= 0:
            raise GlueMismatch(f"seam '{s.id}' has a zero-length side")
        count = max(2, sample_count(max(len_a, len_b)))
        sides = []
        for side in (s.side_a, s.side_b):
            e, t0, t1 = _remap_interval(
                closed[side.piece_id], side.edge_index, side.t0, side.t1
            )
            params = _side_params(t0, t1, count)
            required[side.piece_id].setdefault(e, []).extend(params)
            sides.append((side.piece_id, e, params))
        seam_plan.append((s, count, sides))

    dart_plan = []
    for pid, cp in closed.items():
        for leg_in, leg_out in cp.glue_pairs:
            poly = np.asarray(cp.boundary)
            li = float(np.linalg.norm(poly[(leg_in + 1) % len(poly)] - poly[leg_in]))
            count = max(2, sample_count(max(li, 1e-6)))
            pa = _side_params(0.0, 1.0, count)
            required[pid].setdefault(leg_in, []).extend(pa)
            required[pid].setdefault(leg_out, []).extend(pa)
            dart_plan.append((pid, leg_in, leg_out, pa))

    pieces: dict[str, PieceMesh] = {}
    param_maps: dict[str, dict[tuple[int, float], int]] = {}
    offset = 0
    for p in graph.pieces:
        cp = closed[p.id]
        default = piece_spacing(p)
        points, triangles, param_index, boundary_count = _triangulate(
            p.id,
            cp.boundary,
            required[p.id],
            boundary_spacing if boundary_spacing is not None else default,
            interior_spacing if interior_spacing is not None else default,
            min_angle_deg,
        )
        pieces[p.id] = PieceMesh(
            piece_id=p.id,
            points=points,
            triangles=triangles,
            global_ids=np.arange(offset, offset + len(points)),
            boundary_count=boundary_count,
        )
        param_maps[p.id] = param_index
        offset += len(points)

    uf = _UnionFind(offset)
    side_chains: dict[tuple[str, str], list[int]] = {}

    def chain(pid: str, edge: int, params: list[float]) -> list[int]:
        pm, pmap = pieces[pid], param_maps[pid]
        return [int(pm.global_ids[pmap[(edge, t)]]) for t in params]

    for s, count, sides in seam_plan:
        (pid_a, ea, pa), (pid_b, eb, pb) = sides
        chain_a = chain(pid_a, ea, pa)
        chain_b = chain(pid_b, eb, pb)
        partner = chain_b if s.flip else chain_b[::-1]
        for u, v in zip(chain_a, partner):
            uf.union(u, v)
        side_chains[(s.id, "a")] = chain_a
        side_chains[(s.id, "b")] = chain_b

    dart_chains = []
    for pid, leg_in, leg_out, pa in dart_plan:
        chain_in = chain(pid, leg_in, pa)
        chain_out = chain(pid, leg_out, pa)
        for u, v in zip(chain_in, chain_out[::-1]):
            uf.union(u, v)
        dart_chains.append((chain_in, chain_out))

    # Edge entities. Pre-compaction ids are disjoint across pieces, so a
    # (lo, hi) pair names one planar edge of one piece.
    raw_faces = np.vstack([pm.global_ids[pm.triangles] for pm in pieces.values()])
    pair_rows = np.stack(
        [raw_faces[:, [0, 1]], raw_faces[:, [1, 2]], raw_faces[:, [2, 0]]],
        axis=1,
    ).reshape(-1, 2)
    enc = pair_rows.min(axis=1) * np.int64(offset) + pair_rows.max(axis=1)
    enc_uniq, inv = np.unique(enc, return_inverse=True)
    face_edge = inv.reshape(raw_faces.shape).astype(np.int64)
    edge_index = {
        (int(e // offset), int(e % offset)): i for i, e in enumerate(enc_uniq)
    }

    def edge_id(u: int, v: int) -> int:
        return edge_index[(u, v) if u < v else (v, u)]

    euf = _UnionFind(len(edge_index))

    def union_chain_edges(ca: list[int], cb: list[int]) -> None:
        for i in range(len(ca) - 1):
            euf.union(edge_id(ca[i], ca[i + 1]), edge_id(cb[i], cb[i + 1]))

    for s, count, sides in seam_plan:
        chain_a = side_chains[(s.id, "a")]
        chain_b = side_chains[(s.id, "b")]
        union_chain_edges(chain_a, chain_b if s.flip else chain_b[::-1])
    for chain_in, chain_out in dart_chains:
        union_chain_edges(chain_in, chain_out[::-1])

    # Compact the merged index spaces.
    root_of = np.fromiter((uf.find(i) for i in range(offset)), dtype=np.int64)
    uniq, compact = np.unique(root_of, return_inverse=True)
    eroot = np.fromiter(
        (euf.find(i) for i in range(len(edge_index))), dtype=np.int64
    )
    euniq, ecompact = np.unique(eroot, return_inverse=True)

    for pm in pieces.values():
        pm.global_ids = compact[pm.global_ids]
    faces = np.vstack([pm.global_ids[pm.triangles] for pm in pieces.values()])
    face_edge_class = ecompact[face_edge]
    ok = (
        (faces[:, 0] != faces[:, 1])
        & (faces[:, 1] != faces[:, 2])
        & (faces[:, 2] != faces[:, 0])
    )
    return MergedMesh(
        pieces=pieces,
        n_vertices=len(uniq),
        faces=faces[ok],
        face_edge_class=face_edge_class[ok],
        n_edge_classes=len(euniq),
        side_chains={
            key: [int(compact[g]) for g in ch] for key, ch in side_chains.items()
        },
    )


# -- shell analysis ----------------------------------------------------


def analyse(mesh: MergedMesh) -> AssembledShell:
    """Topology descriptors of the glued complex.

    Orientation propagation treats two faces as compatible when they
    traverse their shared edge in opposite directions; a parity
    contradiction on any cycle marks the component non-orientable.
    """
    faces = mesh.faces
    fec = mesh.face_edge_class
    n_faces = len(faces)

    used = np.zeros(mesh.n_vertices, dtype=bool)
    if n_faces:
        used[faces.ravel()] = True
    n_vertices = int(used.sum())

    # Incidence per edge class, with the traversal each face makes.
    # Stable sort by class keeps records in face-major order.
    ec_flat = fec.ravel().astype(np.int64)
    f_flat = np.repeat(np.arange(n_faces, dtype=np.int64), 3)
    u_flat = faces.ravel().astype(np.int64) if n_faces else ec_flat
    v_flat = faces[:, [1, 2, 0]].ravel().astype(np.int64) if n_faces else ec_flat
    order = np.argsort(ec_flat, kind="stable")
    ec_s = ec_flat[order]
    f_s, u_s, v_s = f_flat[order], u_flat[order], v_flat[order]
    if len(ec_s):
        starts = np.flatnonzero(np.r_[True, ec_s[1:] != ec_s[:-1]])
        counts = np.diff(np.r_[starts, len(ec_s)])
    else:
        starts = np.zeros(0, dtype=np.int64)
        counts = np.zeros(0, dtype=np.int64)
    n_edges = len(starts)

    # One-incidence classes are boundary; anything else is non-manifold,
    # as is a class whose merged endpoints disagree or coincide.
    degenerate = u_s[starts] == v_s[starts]
    manifold = not bool((counts > 2).any() or degenerate.any())

    s1 = starts[(counts == 1) & ~degenerate]
    boundary_recs: list[tuple[int, int, int]] = list(
        zip(u_s[s1].tolist(), v_s[s1].tolist(), f_s[s1].tolist())
    )

    # Face adjacency with parity: 0 if opposite traversal, 1 if same.
    s2 = starts[(counts == 2) & ~degenerate]
    f1v, u1v, v1v = f_s[s2], u_s[s2], v_s[s2]
    f2v, u2v, v2v = f_s[s2 + 1], u_s[s2 + 1], v_s[s2 + 1]
    opposite = (u2v == v1v) & (v2v == u1v)
    same = (u2v == u1v) & (v2v == v1v)
    clean = opposite | same
    if not bool(clean.all()):
        manifold = False
    pf1, pf2 = f1v[clean], f2v[clean]
    parity_pair = np.where(opposite[clean], 0, 1).astype(np.int8)

    src = np.concatenate([pf1, pf2])
    dst = np.concatenate([pf2, pf1])
    par = np.concatenate([parity_pair, parity_pair])
    aorder = np.argsort(src, kind="stable")
    dst_s, par_s = dst[aorder], par[aorder]
    indptr = np.zeros(n_faces + 1, dtype=np.int64)
    if len(src):
        np.cumsum(np.bincount(src, minlength=n_faces), out=indptr[1:])

    color = np.full(n_faces, -1, dtype=np.int8)
    comp_of_face = np.full(n_faces, -1, dtype=np.int64)
    orientable_comp: list[bool] = []
    for start in range(n_faces):
        if color[start] >= 0:
            continue
        comp = len(orientable_comp)
        orientable = True
        color[start] = 0
        comp_of_face[start] = comp
        stack = [start]
        while stack:
            f = stack.pop()
            for k in range(indptr[f], indptr[f + 1]):
                g = int(dst_s[k])
                want = color[f] ^ par_s[k]
                if color[g] < 0:
                    color[g] = want
                    comp_of_face[g] = comp
                    stack.append(g)
                elif color[g] != want:
                    orientable = False
        orientable_comp.append(orientable)
    n_components = len(orientable_comp)

    # Boundary loops: one-incidence records walked into cycles through
    # shared endpoints. Each clean boundary vertex joins exactly two.
    boundary_at: dict[int, list[int]] = {}
    for i, (u, v, _f) in enumerate(boundary_recs):
        boundary_at.setdefault(u, []).append(i)
        boundary_at.setdefault(v, []).append(i)
    pinch = any(len(lst) != 2 for lst in boundary_at.values())
    loops_per_comp = [0] * n_components
    loop_vertices: list[tuple[int, ...]] = []
    visited = [False] * len(boundary_recs)
    for i0 in range(len(boundary_recs)):
        if visited[i0]:
            continue
        u0, v0, f0 = boundary_recs[i0]
        loops_per_comp[int(comp_of_face[f0])] += 1
        visited[i0] = True
        walk = [u0, v0]
        cur_vertex, cur_rec = v0, i0
        while True:
            nxt = None
            for j in boundary_at.get(cur_vertex, ()):
                if j != cur_rec and not visited[j]:
                    nxt = j
                    break
            if nxt is None:
                break
            visited[nxt] = True
            uj, vj, _fj = boundary_recs[nxt]
            cur_vertex = vj if uj == cur_vertex else uj
            cur_rec = nxt
            walk.append(cur_vertex)
        if walk[-1] == walk[0]:
            walk.pop()
        loop_vertices.append(tuple(walk))

    # Vertex and edge ownership per component, via any incident face.
    comp_faces = np.bincount(comp_of_face, minlength=n_components)
    if n_faces:
        vert_comp_pairs = np.unique(
            comp_of_face.repeat(3) * np.int64(mesh.n_vertices) + faces.ravel()
        )
        comp_vcount = np.bincount(
            (vert_comp_pairs // np.int64(mesh.n_vertices)).astype(np.int64),
            minlength=n_components,
        )
        comp_edges = np.bincount(comp_of_face[f_s[starts]], minlength=n_components)
    else:
        comp_vcount = np.zeros(0, dtype=np.int64)
        comp_edges = np.zeros(0, dtype=np.int64)

    components = []
    for c in range(n_components):
        chi = int(comp_vcount[c] - comp_edges[c] + comp_faces[c])
        orientable = orientable_comp[c]
        b = loops_per_comp[c]
        genus = (2 - b - chi) // 2 if orientable else None
        components.append(
            ComponentTopology(
                n_vertices=int(comp_vcount[c]),
                n_edges=int(comp_edges[c]),
                n_faces=int(comp_faces[c]),
                boundary_loops=b,
                orientable=orientable,
                euler_characteristic=chi,
                genus=genus,
            )
        )

    orientable_all = all(c.orientable for c in components) if components else True
    genus_total: int | None
    if orientable_all:
        genus_total = sum(c.genus or 0 for c in components)
    else:
        genus_total = None
    return AssembledShell(
        n_vertices=n_vertices,
        n_edges=n_edges,
        n_faces=n_faces,
        boundary_loops=sum(loops_per_comp),
        orientable=orientable_all,
        manifold=manifold and not pinch,
        euler_characteristic=n_vertices - n_edges + n_faces,
        genus=genus_total,
        components=tuple(components),
        mesh=mesh,
        loop_vertices=tuple(loop_vertices),
    )


def assemble_shell(graph: ir.GarmentGraph) -> AssembledShell:
    """Glue at verification resolution and analyse."""
    return analyse(glue_graph(graph))
