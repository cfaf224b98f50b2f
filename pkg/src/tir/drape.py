"""Gravity drape, verification layer 4.

Position-based relaxation: distance constraints on mesh edges, hinge
bending via dihedral-angle constraints with a flat rest angle, hard
strain limiting, and one-way projection against an analytic body
surface. Constraint order inside a sweep is bend, stretch, strain
limit, collision; collision runs last so a garment smaller than the
body ends exactly on the measured surface.

Units: cm, grams, seconds. Energies are g cm^2/s^2.
"""

from __future__ import annotations

import json
import math
import importlib.resources
from dataclasses import dataclass, field, replace

import numpy as np

from . import body as body_mod
from . import ir, materials, mechanics, topology
from .verify_geom import LayerDiagnostic


def _solver_params() -> dict:
    path = importlib.resources.files("tir.data") / "solver.json"
    return json.loads(path.read_text(encoding="utf-8"))


@dataclass(frozen=True)
class DrapeConfig:
    gravity_cm_s2: float = 981.0
    dt_s: float = 1.0 / 60.0
    max_iters: int = 2000
    residual_tol_cm: float = 1e-3
    strain_limit: float = 1.10
    spacing_cm: float = 1.5          # target edge length of the sim mesh
    min_angle_deg: float = 10.0
    substeps: int = 10               # substeps per dt_s; stiffness scales with them
    projection_sweeps: int = 2       # constraint sweeps per substep
    polish_sweeps: int = 4000        # cap on gravity-free polish sweeps
    collision_offset_cm: float = 0.2
    drape_target_B: float = 0.08
    default_material_id: str = "cotton_organic_TX-2847"
    wear_top_z: float | None = None  # garment top height; body top if None
    seed: int = 0                    # seeds the symmetry-breaking jitter
    jitter_rel: float = 2e-2         # jitter amplitude as a spacing fraction

    def refined(self) -> "DrapeConfig":
        return replace(self, spacing_cm=self.spacing_cm / 2.0)


@dataclass
class SimMesh:
    """Drape-ready garment mesh in one merged index space."""

    vertices: np.ndarray        # (n, 3) cm
    triangles: np.ndarray       # (m, 3) int
    mass_g: np.ndarray          # (n,)
    edges: np.ndarray           # (E, 2) int, unique vertex pairs
    rest_length: np.ndarray     # (E,) cm, from pattern-space geometry
    stretch_k: np.ndarray       # (E,) in [0, 1]
    hinges: np.ndarray          # (H, 4) int: edge u, v then opposite w1, w2
    hinge_rest: np.ndarray      # (H,) rest dihedral angle, radians
    bend_k: np.ndarray          # (H,) in [0, 1]
    pinned: np.ndarray          # (n,) bool
    merged: topology.MergedMesh
    material_by_piece: dict[str, materials.MaterialSpec]
    # Conflict-free edge batches: no two pairs in a group share a vertex,
    # so exact Gauss-Seidel projection vectorizes per group.
    edge_groups: tuple[np.ndarray, ...] = ()

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def diagonal(self) -> float:
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        return float(np.linalg.norm(hi - lo))


@dataclass
class DrapeResult:
    converged: bool
    iterations: int
    residual_cm: float           # max vertex displacement at exit
    exploded: bool
    positions: np.ndarray        # (n, 3) final state
    edge_strain: np.ndarray      # (E,) engineering strain per edge
    vertex_strain: np.ndarray    # (n,) signed, largest-magnitude incident
    energy_trace: np.ndarray     # (steps, 3): kinetic, potential, elastic

    @property
    def potential_trace(self) -> np.ndarray:
        return self.energy_trace[:, 1] if len(self.energy_trace) else np.zeros(0)


# -- mesh construction -------------------------------------------------


def _material_of(
    graph: ir.GarmentGraph,
    piece_id: str,
    db: materials.MaterialDB,
    config: DrapeConfig,
) -> materials.MaterialSpec:
    mid = graph.material_for_piece(piece_id) or config.default_material_id
    return db.get(mid)


def build_sim_mesh(
    graph: ir.GarmentGraph,
    db: materials.MaterialDB,
    config: DrapeConfig | None = None,
    solver_overrides: dict | None = None,
) -> SimMesh:
    """Glue, then derive masses and constraint stiffnesses per material."""
    config = config or DrapeConfig()
    params = {**_solver_params(), **(solver_overrides or {})}
    # Seams sampled at sim spacing: finer seam chains than the grid make
    # weak short-edge columns the averaged solver tightens too slowly.
    spacing = config.spacing_cm

    def sim_samples(length_cm: float) -> int:
        return max(2, int(math.ceil(length_cm / spacing)) + 1)

    merged = topology.glue_graph(
        graph,
        sample_count=sim_samples,
        boundary_spacing=spacing,
        interior_spacing=spacing,
        min_angle_deg=config.min_angle_deg,
    )
    mats = {
        p.id: _material_of(graph, p.id, db, config) for p in graph.pieces
    }
    mech = {pid: mechanics.mechanics_for(m) for pid, m in mats.items()}

    n = merged.n_vertices
    mass = np.zeros(n)
    # Stretch rest lengths come from pattern space; a glued pair keeps the
    # mean of its piece copies.
    pair_rest: dict[tuple[int, int], list[float]] = {}
    pair_stiff: dict[tuple[int, int], list[float]] = {}
    soft = params["stretch_softening_N_m"]

    for pid, pm in merged.pieces.items():
        if mats[pid].areal_density_g_m2 <= 0.0:
            raise ValueError(
                f"material '{mats[pid].id}' has non-positive areal "
                "density; vertex masses must be positive"
            )
        density_g_cm2 = mats[pid].areal_density_g_m2 / 1e4
        k_stretch = mech[pid].stretch_N_m / (mech[pid].stretch_N_m + soft)
        pts = pm.points
        for tri in pm.triangles:
            a, b, c = pts[tri[0]], pts[tri[1]], pts[tri[2]]
            area = 0.5 * abs(
                (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])
            )
            share = area * density_g_cm2 / 3.0
            for k in range(3):
                mass[pm.global_ids[tri[k]]] += share
            for k in range(3):
                li, lj = tri[k], tri[(k + 1) % 3]
                u, v = int(pm.global_ids[li]), int(pm.global_ids[lj])
                if u == v:
                    continue
                key = (u, v) if u < v else (v, u)
                rest = float(np.linalg.norm(pts[lj] - pts[li]))
                pair_rest.setdefault(key, []).append(rest)
                pair_stiff.setdefault(key, []).append(k_stretch)

    edges = np.array(sorted(pair_rest), dtype=np.int64)
    rest = np.array([float(np.mean(pair_rest[tuple(e)])) for e in edges])
    stretch_k = np.array([float(np.mean(pair_stiff[tuple(e)])) for e in edges])

    hinges, hinge_rest, bend_k = _build_hinges(merged, mats, mech, params)

    # Isolated merged vertices keep unit mass so inverse masses stay finite.
    mass[mass == 0.0] = 1.0

    positions = np.zeros((n, 3))
    counts = np.zeros(n)
    for pm in merged.pieces.values():
        np.add.at(positions, pm.global_ids, np.column_stack(
            [pm.points[:, 0], np.zeros(len(pm.points)), pm.points[:, 1]]
        ))
        np.add.at(counts, pm.global_ids, 1.0)
    positions /= counts[:, None]

    return SimMesh(
        vertices=positions,
        triangles=merged.faces.copy(),
        mass_g=mass,
        edges=edges,
        rest_length=rest,
        stretch_k=stretch_k,
        hinges=hinges,
        hinge_rest=hinge_rest,
        bend_k=bend_k,
        pinned=np.zeros(n, dtype=bool),
        merged=merged,
        material_by_piece=mats,
        edge_groups=_color_groups(edges),
    )


def _color_groups(rows: np.ndarray) -> tuple[np.ndarray, ...]:
    """Greedy constraint coloring: partition rows of vertex indices into
    groups where no vertex repeats, enabling exact simultaneous projection."""
    if len(rows) == 0:
        return ()
    color_of = np.empty(len(rows), dtype=np.int64)
    used_at: dict[int, int] = {}  # vertex -> bitmask of colors in use
    max_color = 0
    for i, row in enumerate(rows):
        mask = 0
        for u in row:
            mask |= used_at.get(int(u), 0)
        c = 0
        while mask >> c & 1:
            c += 1
        color_of[i] = c
        bit = 1 << c
        for u in row:
            used_at[int(u)] = used_at.get(int(u), 0) | bit
        max_color = max(max_color, c)
    return tuple(
        np.flatnonzero(color_of == c) for c in range(max_color + 1)
    )


def _build_hinges(merged, mats, mech, params):
    """One hinge per interior edge entity: a dihedral-angle constraint over
    the shared edge and the two opposite vertices. Rest angle is flat (pi)
    everywhere; panels are cut flat and seams count as pressed open."""
    bend_c = params["bend_scale_per_gfcm"]
    face_piece: list[tuple[str, int]] = []
    for pid, pm in merged.pieces.items():
        face_piece.extend((pid, i) for i in range(len(pm.triangles)))

    fec = merged.face_edge_class
    incidence: dict[int, list[tuple[int, int]]] = {}
    for f in range(len(fec)):
        for k in range(3):
            incidence.setdefault(int(fec[f, k]), []).append((f, k))

    hinges = []
    ks = []
    for recs in incidence.values():
        if len(recs) != 2:
            continue
        (f1, k1), (f2, k2) = recs
        side1 = _hinge_side(merged, face_piece, f1, k1)
        side2 = _hinge_side(merged, face_piece, f2, k2)
        if side1 is None or side2 is None:
            continue
        (u1, v1, w1) = side1
        (u2, v2, w2) = side2
        if u1 == v1 or w1 == w2:
            continue
        if (u2, v2) not in ((u1, v1), (v1, u1)):
            continue
        b_mean = 0.5 * (
            mech[face_piece[f1][0]].bending_B_gfcm2_cm
            + mech[face_piece[f2][0]].bending_B_gfcm2_cm
        )
        hinges.append((u1, v1, w1, w2))
        ks.append(min(1.0, max(0.0, bend_c * b_mean)))

    if not hinges:
        return (
            np.zeros((0, 4), dtype=np.int64),
            np.zeros(0),
            np.zeros(0),
        )
    rests = np.full(len(hinges), math.pi)
    return np.array(hinges, dtype=np.int64), rests, np.array(ks)


def _hinge_side(merged, face_piece, f, k):
    """Merged edge endpoints as traversed by face f plus the opposite
    merged vertex."""
    pid, local_f = face_piece[f]
    pm = merged.pieces[pid]
    tri = pm.triangles[local_f]
    li, lj, lw = int(tri[k]), int(tri[(k + 1) % 3]), int(tri[(k + 2) % 3])
    e_len = float(np.linalg.norm(pm.points[lj] - pm.points[li]))
    if e_len <= 0:
        return None
    return (
        int(pm.global_ids[li]),
        int(pm.global_ids[lj]),
        int(pm.global_ids[lw]),
    )


# -- placement ---------------------------------------------------------


class _BodyTable:
    """Precomputed semi-axis profile for fast radial queries.

    The solid body sits offset_cm inside the measured-girth surface (a
    tape measure wraps outside the flesh), and cloth rests offset_cm
    outside the solid, so projection lands exactly on the measured
    surface and the analytic hoop-strain oracle holds."""

    def __init__(self, body: body_mod.BodyModel, offset_cm: float):
        self.z_lo = body.z_min
        self.z_hi = body.z_max
        zs = np.linspace(self.z_lo, self.z_hi, 257)
        a, b = body.semi_axes_at(zs)
        self.zs, self.a, self.b = zs, a, b
        self.offset = offset_cm

    def radius(self, z: np.ndarray, theta: np.ndarray) -> np.ndarray:
        a = np.interp(z, self.zs, self.a)
        b = np.interp(z, self.zs, self.b)
        return (a * b) / np.sqrt(
            (b * np.cos(theta)) ** 2 + (a * np.sin(theta)) ** 2
        )

    def active(self, z: np.ndarray) -> np.ndarray:
        return (z >= self.z_lo - 1e-9) & (z <= self.z_hi + 1e-9)


def wrap_on_body(
    sim: SimMesh,
    body: body_mod.BodyModel | None,
    config: DrapeConfig | None = None,
) -> None:
    """Initial embedding: pieces side by side around a vertical cylinder
    whose circumference is the summed pattern width, pushed out to the
    body surface wherever that cylinder would start inside it. Piece tops
    align at the wear height. Without a body the pattern stands in a
    vertical plane (x, 0, y)."""
    config = config or DrapeConfig()
    if body is None:
        return  # build_sim_mesh already placed pattern space vertically
    widths = []
    for pm in sim.merged.pieces.values():
        xs = pm.points[:, 0]
        widths.append(float(xs.max() - xs.min()))
    total = sum(widths)
    radius_cloth = max(total / (2.0 * math.pi), 1e-6)
    z_top = config.wear_top_z if config.wear_top_z is not None else body.z_max
    table = _BodyTable(body, config.collision_offset_cm)

    positions = np.zeros((sim.n_vertices, 3))
    counts = np.zeros(sim.n_vertices)
    theta0 = 0.0
    for pm, width in zip(sim.merged.pieces.values(), widths):
        xs, ys = pm.points[:, 0], pm.points[:, 1]
        theta = theta0 + (xs - xs.min()) / radius_cloth
        z = z_top - (ys.max() - ys)
        r = np.full_like(theta, radius_cloth)
        inside = table.active(z)
        r_body = np.where(inside, table.radius(z, theta), 0.0)
        r = np.maximum(r, r_body)
        np.add.at(
            positions,
            pm.global_ids,
            np.column_stack([r * np.cos(theta), r * np.sin(theta), z]),
        )
        np.add.at(counts, pm.global_ids, 1.0)
        theta0 += width / radius_cloth
    sim.vertices = positions / counts[:, None]


def pin_highest_loop(sim: SimMesh) -> tuple[int, ...]:
    """Pin the boundary loop with the greatest mean height: the garment
    hangs from its wear opening."""
    shell = topology.analyse(sim.merged)
    best: tuple[int, ...] = ()
    best_z = -math.inf
    for loop in shell.loop_vertices:
        z = float(np.mean(sim.vertices[list(loop), 2]))
        if z > best_z:
            best_z, best = z, loop
    sim.pinned[list(best)] = True
    return best


# -- solver ------------------------------------------------------------




def drape(
    sim: SimMesh,
    body: body_mod.BodyModel | None = None,
    config: DrapeConfig | None = None,
) -> DrapeResult:
    config = config or DrapeConfig()
    params = _solver_params()
    damping = params["damping"]

    n = sim.n_vertices
    x = sim.vertices.copy()
    v = np.zeros_like(x)
    inv_m = np.where(sim.pinned, 0.0, 1.0 / sim.mass_g)
    g_vec = np.array([0.0, 0.0, -config.gravity_cm_s2])
    dt = config.dt_s
    diag = max(sim.diagonal(), 1.0)
    center = x.mean(axis=0)
    friction = params.get("contact_friction", 0.0)

    e0, e1 = sim.edges[:, 0], sim.edges[:, 1]
    table = _BodyTable(body, config.collision_offset_cm) if body else None

    # Seeded jitter along vertex normals so buckling can start: a mesh
    # posed in a plane with in-plane loads would otherwise stay planar,
    # and exact projections jam where folding is the real answer. The
    # normal direction keeps the length change second order. Unloaded
    # runs skip it; with no driver the rest state must stay exact.
    if (
        config.jitter_rel > 0.0
        and config.gravity_cm_s2 > 0.0
        and len(sim.triangles)
        and not sim.pinned.all()
    ):
        f0, f1, f2 = (sim.triangles[:, i] for i in range(3))
        face_n = np.cross(x[f1] - x[f0], x[f2] - x[f0])
        vert_n = np.zeros_like(x)
        for col in (f0, f1, f2):
            np.add.at(vert_n, col, face_n)
        vert_n /= np.maximum(
            np.linalg.norm(vert_n, axis=1), 1e-12
        )[:, None]
        rng = np.random.default_rng(config.seed)
        amp = config.jitter_rel * config.spacing_cm
        bump = amp * rng.uniform(-1.0, 1.0, size=n)
        bump[sim.pinned] = 0.0
        x += vert_n * bump[:, None]

    def project_groups(p, pairs, groups, rest, k, hard_limit=None):
        for g in groups:
            i0, i1 = pairs[g, 0], pairs[g, 1]
            d = p[i1] - p[i0]
            length = np.linalg.norm(d, axis=1)
            np.maximum(length, 1e-12, out=length)
            rest_g = rest[g]
            if hard_limit is None:
                c_val = length - rest_g
                k_g = k[g] if isinstance(k, np.ndarray) else k
            else:
                target = rest_g * hard_limit
                c_val = np.maximum(length - target, 0.0)
                k_g = 1.0
            w0, w1 = inv_m[i0], inv_m[i1]
            w_sum = np.maximum(w0 + w1, 1e-12)
            step_v = (k_g * c_val / (length * w_sum))[:, None] * d
            p[i0] += w0[:, None] * step_v
            p[i1] -= w1[:, None] * step_v

    hi1 = sim.hinges[:, 0] if len(sim.hinges) else None
    hi2 = sim.hinges[:, 1] if len(sim.hinges) else None
    hi3 = sim.hinges[:, 2] if len(sim.hinges) else None
    hi4 = sim.hinges[:, 3] if len(sim.hinges) else None

    def project_bend(p):
        # Dihedral-angle projection (gradients on all four vertices).
        # The distance-between-opposite-vertices surrogate has a gradient
        # that vanishes quadratically near flat, far too weak to express
        # realistic bending rigidity at this mesh resolution. Corrections
        # are small (calibrated k is well below 1), so a single fused
        # Jacobi pass is stable and much cheaper than colored batches.
        o = p[hi1]
        p2 = p[hi2] - o
        p3 = p[hi3] - o
        p4 = p[hi4] - o
        c23 = np.cross(p2, p3)
        c24 = np.cross(p2, p4)
        l23 = np.linalg.norm(c23, axis=1)
        l24 = np.linalg.norm(c24, axis=1)
        ok = (l23 > 1e-9) & (l24 > 1e-9)
        l23 = np.maximum(l23, 1e-12)[:, None]
        l24 = np.maximum(l24, 1e-12)[:, None]
        n1 = c23 / l23
        n2 = c24 / l24
        d = np.clip(np.sum(n1 * n2, axis=1), -1.0, 1.0)
        c_val = np.arccos(d) - sim.hinge_rest
        dcol = d[:, None]
        q3 = (np.cross(p2, n2) + np.cross(n1, p2) * dcol) / l23
        q4 = (np.cross(p2, n1) + np.cross(n2, p2) * dcol) / l24
        q2 = (
            -(np.cross(p3, n2) + np.cross(n1, p3) * dcol) / l23
            - (np.cross(p4, n1) + np.cross(n2, p4) * dcol) / l24
        )
        q1 = -q2 - q3 - q4
        w1v, w2v = inv_m[hi1], inv_m[hi2]
        w3v, w4v = inv_m[hi3], inv_m[hi4]
        denom = (
            w1v * np.sum(q1 * q1, axis=1)
            + w2v * np.sum(q2 * q2, axis=1)
            + w3v * np.sum(q3 * q3, axis=1)
            + w4v * np.sum(q4 * q4, axis=1)
        )
        sin_t = np.sqrt(np.maximum(1.0 - d * d, 0.0))
        # q vectors above are -grad(d); negate so C is driven to zero.
        scale = np.where(
            ok & (denom > 1e-12),
            -sim.bend_k * sin_t * c_val / np.maximum(denom, 1e-12),
            0.0,
        )[:, None]
        np.add.at(p, hi1, w1v[:, None] * scale * q1)
        np.add.at(p, hi2, w2v[:, None] * scale * q2)
        np.add.at(p, hi3, w3v[:, None] * scale * q3)
        np.add.at(p, hi4, w4v[:, None] * scale * q4)

    def collide(p, x_prev):
        if table is None:
            return
        z = p[:, 2]
        active = table.active(z) & ~sim.pinned
        if not active.any():
            return
        xa, ya = p[active, 0], p[active, 1]
        r_now = np.hypot(xa, ya)
        theta = np.arctan2(ya, xa)
        r_surface = table.radius(z[active], theta)
        push = r_now < r_surface
        if not push.any():
            return
        idx = np.flatnonzero(active)[push]
        scale = r_surface[push] / np.maximum(r_now[push], 1e-9)
        p[idx, 0] *= scale
        p[idx, 1] *= scale
        if friction > 0.0 and x_prev is not None:
            # Contact friction: bleed off tangential sliding relative to
            # the start of the substep, or the cloth creeps forever.
            disp = p[idx] - x_prev[idx]
            nrm = p[idx].copy()
            nrm[:, 2] = 0.0
            nrm /= np.maximum(
                np.linalg.norm(nrm, axis=1), 1e-12
            )[:, None]
            d_n = np.sum(disp * nrm, axis=1)[:, None] * nrm
            p[idx] = x_prev[idx] + d_n + (1.0 - friction) * (disp - d_n)

    def sweep_once(p, x_prev, with_bend=True, exact_stretch=False):
        # Bend first, stretch after: bend corrections perturb edge
        # lengths, so ending a sweep on stretch (then the hard limit and
        # contact) keeps the exit state honest about strain.
        if with_bend and len(sim.hinges):
            project_bend(p)
        k_stretch = 1.0 if exact_stretch else sim.stretch_k
        project_groups(
            p, sim.edges, sim.edge_groups, sim.rest_length, k_stretch
        )
        project_groups(
            p, sim.edges, sim.edge_groups, sim.rest_length, 1.0,
            hard_limit=config.strain_limit,
        )
        collide(p, x_prev)

    energy = []
    residual = math.inf
    exploded = False
    iters = config.max_iters
    sub = max(1, config.substeps)
    dts = dt / sub
    damp_sub = damping ** (1.0 / sub)
    ke_prev = 0.0
    ke_rising = False
    pot_prev = float(np.sum(sim.mass_g * x[:, 2]))
    for step in range(config.max_iters):
        x_start = x
        for _ in range(sub):
            v += g_vec * dts
            v *= damp_sub
            v[sim.pinned] = 0.0
            p = x + v * dts
            for _ in range(config.projection_sweeps):
                sweep_once(p, x)
            p[sim.pinned] = x[sim.pinned]
            v = (p - x) / dts
            x = p
            # Dynamic relaxation: drop all velocity at each kinetic
            # energy peak, and whenever the aggregate gravity potential
            # rises (coasting uphill), so statics settle without ringing.
            ke = 0.5 * float(np.sum(sim.mass_g * np.sum(v * v, axis=1)))
            if ke > ke_prev:
                ke_rising = True
            elif ke_rising:
                v[:] = 0.0
                ke_rising = False
                ke = 0.0
            ke_prev = ke
            pot_now = float(np.sum(sim.mass_g * x[:, 2]))
            if pot_now > pot_prev:
                v[:] = 0.0
                ke_prev = 0.0
                ke_rising = False
            pot_prev = pot_now
        step_disp = np.linalg.norm(x - x_start, axis=1)
        residual = float(step_disp.max()) if n else 0.0
        if not np.isfinite(x).all() or (
            np.linalg.norm(x - center, axis=1).max() > 10.0 * diag
        ):
            exploded = True
            iters = step + 1
            break

        lengths = np.linalg.norm(x[e1] - x[e0], axis=1)
        elastic = 0.5 * np.sum(
            sim.stretch_k * (lengths - sim.rest_length) ** 2
        )
        kinetic = 0.5 * np.sum(sim.mass_g * np.sum(v * v, axis=1))
        potential = config.gravity_cm_s2 * np.sum(sim.mass_g * x[:, 2])
        energy.append((kinetic, potential, elastic))

        if residual < config.residual_tol_cm:
            iters = step + 1
            break
    else:
        iters = config.max_iters

    if not exploded and len(sim.edges):
        # Gravity-free polish: PBD statics leave a residual stretch that
        # balances the per-substep gravity flux, concentrated near pins.
        # Pure projection sweeps relax it toward the elastic answer,
        # which for apparel-scale loads is effectively zero strain.
        # Collision still runs last in each sweep, so contact-driven
        # stretch (garment smaller than the body) survives the polish.
        # Bend stays out: its positional step size would fake membrane
        # strain far above the true bending/stretch energy balance, and
        # folds are isometric, so stretch relaxation preserves them.
        # Exact projection: material softness already played out in the
        # dynamics; the polish is purely geometric.
        # Stop rule: quit early once the worst over-rest strain either
        # drops below a margin well under the fit thresholds or stops
        # improving (contact-driven stretch never relaxes, so garments
        # tighter than the body plateau within a few hundred sweeps).
        prev_over = math.inf
        for sweep in range(config.polish_sweeps):
            sweep_once(x, None, with_bend=False, exact_stretch=True)
            if (sweep + 1) % 100 == 0:
                lengths = np.linalg.norm(x[e1] - x[e0], axis=1)
                over = float(np.max(lengths / sim.rest_length - 1.0))
                if over < 2e-3 or over > 0.99 * prev_over:
                    break
                prev_over = over

    lengths = np.linalg.norm(x[e1] - x[e0], axis=1)
    edge_strain = (lengths - sim.rest_length) / sim.rest_length
    vertex_strain = _vertex_strain(n, sim.edges, edge_strain)
    return DrapeResult(
        converged=(not exploded) and residual < config.residual_tol_cm,
        iterations=iters,
        residual_cm=residual,
        exploded=exploded,
        positions=x,
        edge_strain=edge_strain,
        vertex_strain=vertex_strain,
        energy_trace=np.array(energy).reshape(-1, 3),
    )


def _vertex_strain(n, edges, edge_strain) -> np.ndarray:
    hi = np.full(n, -np.inf)
    lo = np.full(n, np.inf)
    for side in (0, 1):
        np.maximum.at(hi, edges[:, side], edge_strain)
        np.minimum.at(lo, edges[:, side], edge_strain)
    hi[~np.isfinite(hi)] = 0.0
    lo[~np.isfinite(lo)] = 0.0
    return np.where(np.abs(hi) >= np.abs(lo), hi, lo)


def run_drape(
    graph: ir.GarmentGraph,
    db: materials.MaterialDB,
    body: body_mod.BodyModel | None,
    config: DrapeConfig | None = None,
) -> tuple[SimMesh, DrapeResult, list[LayerDiagnostic]]:
    """Layer 4 entry: build, place, pin the wear opening, relax, report."""
    config = config or DrapeConfig()
    sim = build_sim_mesh(graph, db, config)
    wrap_on_body(sim, body, config)
    pin_highest_loop(sim)
    result = drape(sim, body, config)
    return sim, result, diagnose_drape(sim, result, config)


def diagnose_drape(
    sim: SimMesh, result: DrapeResult, config: DrapeConfig | None = None
) -> list[LayerDiagnostic]:
    config = config or DrapeConfig()
    if result.exploded:
        return [
            LayerDiagnostic(
                layer="4",
                code="E-DRAPE-EXPLODE",
                severity="fail",
                message=(
                    f"simulation diverged after {result.iterations} steps "
                    f"(residual {result.residual_cm:.3g} cm)"
                ),
            )
        ]
    diags: list[LayerDiagnostic] = []
    if not result.converged:
        diags.append(
            LayerDiagnostic(
                layer="4",
                code="E-DRAPE-NOCONV",
                severity="fail",
                message=(
                    f"no static state within {result.iterations} steps; "
                    f"residual {result.residual_cm:.3g} cm"
                ),
                metrics=(("residual_cm", result.residual_cm),),
            )
        )
    flagged: set[str] = set()
    for pid, mat in sim.material_by_piece.items():
        b_val = mechanics.mechanics_for(mat).bending_B_gfcm2_cm
        if b_val > config.drape_target_B and mat.id not in flagged:
            flagged.add(mat.id)
            diags.append(
                LayerDiagnostic(
                    layer="4",
                    code="E-DRAPE-STIFF",
                    severity="warn",
                    message=(
                        f"material '{mat.id}' bending rigidity "
                        f"{b_val:g} gf cm2/cm exceeds drape target "
                        f"{config.drape_target_B:g}"
                    ),
                    subject=mat.id,
                    metrics=(
                        ("B", b_val),
                        ("target", config.drape_target_B),
                    ),
                )
            )
    return diags


# -- analysis helpers ---------------------------------------------------


def fold_wavelength(
    sim: SimMesh,
    result: DrapeResult,
    z_band: tuple[float, float],
) -> float:
    """Characteristic fold wavelength in a height band: arc span divided
    by half the sign changes of the detrended out-of-plane deviation."""
    pos = result.positions
    sel = (pos[:, 2] >= z_band[0]) & (pos[:, 2] <= z_band[1])
    if sel.sum() < 4:
        return 0.0
    pts = pos[sel]
    order = np.argsort(pts[:, 0])
    xs = pts[order, 0]
    ys = pts[order, 1] - np.mean(pts[:, 1])
    # Collapse duplicates from multiple mesh rows in the band.
    xu, inverse = np.unique(np.round(xs, 3), return_inverse=True)
    yu = np.zeros(len(xu))
    cnt = np.zeros(len(xu))
    np.add.at(yu, inverse, ys)
    np.add.at(cnt, inverse, 1.0)
    yu /= cnt
    yu -= yu.mean()
    signs = np.sign(yu)
    signs = signs[signs != 0]
    crossings = int(np.count_nonzero(np.diff(signs) != 0))
    span = float(xu[-1] - xu[0])
    if crossings == 0:
        return span
    return 2.0 * span / crossings
