"""Core garment graph: pattern pieces, seams, darts, notches, regions.

The graph is the single source of truth every downstream check consumes.
Instances are immutable; edits produce new graphs so cached verification
results keyed on content stay sound.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, replace

from . import geometry

VALID_STITCH_CLASSES = ("plain", "french", "flat_fell", "overlock", "bound")


class GraphError(ValueError):
    """Structural violation found while building or validating a graph."""

    code = "E-GRAPH"

    def __init__(self, message: str, locus: str = ""):
        super().__init__(message)
        self.locus = locus


class DuplicateId(GraphError):
    code = "E-REF-002"


class UnknownReference(GraphError):
    code = "E-REF-001"


class BadGeometry(GraphError):
    code = "E-VAL-001"


class BadValue(GraphError):
    code = "E-VAL-002"


class OverlappingSeamIntervals(GraphError):
    code = "E-VAL-003"


@dataclass(frozen=True)
class SeamSide:
    """One side of a seam: an arclength interval on a piece edge."""

    piece_id: str
    edge_index: int
    t0: float = 0.0
    t1: float = 1.0

    def interval(self) -> tuple[float, float]:
        return (self.t0, self.t1)


@dataclass(frozen=True)
class PatternPiece:
    """A 2D pattern piece bounded by a closed CCW polyline.

    boundary: vertices in cm, edge i from vertex i to i+1 mod n.
    grainline_deg: grain direction in the piece frame, degrees from +x.
    allowance_cm: seam allowance width per edge, same length as boundary.
    """

    id: str
    boundary: tuple[tuple[float, float], ...]
    grainline_deg: float = 0.0
    allowance_cm: tuple[float, ...] = ()
    label: str = ""

    def edge_count(self) -> int:
        return len(self.boundary)


@dataclass(frozen=True)
class SeamEdge:
    """Joins two boundary intervals. flip reverses the default
    antiparallel arclength correspondence between the sides.

    sew_after lists seams that must be closed before this one.
    """

    id: str
    side_a: SeamSide
    side_b: SeamSide
    ease_ratio: float = 1.0
    stitch_class: str = "plain"
    flip: bool = False
    sew_after: tuple[str, ...] = ()


@dataclass(frozen=True)
class Dart:
    """A stitched wedge: apex strictly inside the piece, two legs on the
    boundary given as (edge_index, arclength fraction)."""

    id: str
    piece_id: str
    apex: tuple[float, float]
    legs: tuple[tuple[int, float], tuple[int, float]]


@dataclass(frozen=True)
class Notch:
    """Alignment mark on a piece edge; paired notches must meet when the
    seam is closed."""

    id: str
    piece_id: str
    edge_index: int
    t: float
    pair_id: str = ""


@dataclass(frozen=True)
class MaterialRegion:
    """Assigns one material to a set of pieces."""

    id: str
    piece_ids: tuple[str, ...]
    material_id: str


@dataclass(frozen=True)
class GarmentGraph:
    garment_class: str
    pieces: tuple[PatternPiece, ...]
    seams: tuple[SeamEdge, ...] = ()
    darts: tuple[Dart, ...] = ()
    notches: tuple[Notch, ...] = ()
    regions: tuple[MaterialRegion, ...] = ()
    openings_override: int | None = None

    def piece(self, piece_id: str) -> PatternPiece:
        for p in self.pieces:
            if p.id == piece_id:
                return p
        raise UnknownReference(f"unknown piece '{piece_id}'", locus=piece_id)

    def seam(self, seam_id: str) -> SeamEdge:
        for s in self.seams:
            if s.id == seam_id:
                return s
        raise UnknownReference(f"unknown seam '{seam_id}'", locus=seam_id)

    def material_for_piece(self, piece_id: str) -> str | None:
        for r in self.regions:
            if piece_id in r.piece_ids:
                return r.material_id
        return None

    def content_key(self) -> str:
        """SHA-256 over a canonical structural encoding.

        Used as the cache key for verification layers, so it must be
        stable across processes and independent of construction order.
        """
        return _content_key(self)


def piece_area(piece: PatternPiece) -> float:
    """Shoelace area of the piece boundary in cm^2.

    Darts are stitched folds, not cut-outs, so they do not reduce the
    cut area.
    """
    return geometry.polygon_area(piece.boundary)


def edge_length(
    piece: PatternPiece, edge_index: int, sub_range: tuple[float, float] | None = None
) -> float:
    """Length in cm of an edge, or of an arclength sub-range of it."""
    n = piece.edge_count()
    if not 0 <= edge_index < n:
        raise UnknownReference(
            f"piece '{piece.id}' has no edge {edge_index}", locus=piece.id
        )
    full = float(geometry.edge_lengths(piece.boundary)[edge_index])
    if sub_range is None:
        return full
    t0, t1 = sub_range
    if not (0.0 <= t0 < t1 <= 1.0):
        raise BadValue(f"bad sub-range [{t0}:{t1}] on piece '{piece.id}'")
    return full * (t1 - t0)


def seam_side_length(graph: GarmentGraph, side: SeamSide) -> float:
    return edge_length(graph.piece(side.piece_id), side.edge_index, side.interval())


def build_graph(
    garment_class: str,
    pieces,
    seams=(),
    darts=(),
    notches=(),
    regions=(),
    openings_override: int | None = None,
) -> GarmentGraph:
    """Assemble and validate a garment graph.

    Raises a GraphError subclass naming the offending element when any
    structural invariant fails; on success every id is unique, every
    reference resolves, boundaries are simple CCW polygons and seam
    intervals on any one edge never overlap.
    """
    # Dependency order is a set relation; store it sorted so equal
    # graphs have equal encodings.
    seams = tuple(
        replace(s, sew_after=tuple(sorted(s.sew_after))) for s in seams
    )
    graph = GarmentGraph(
        garment_class=garment_class,
        pieces=tuple(pieces),
        seams=tuple(seams),
        darts=tuple(darts),
        notches=tuple(notches),
        regions=tuple(regions),
        openings_override=openings_override,
    )
    validate_graph(graph)
    return graph


def validate_graph(graph: GarmentGraph) -> None:
    if not graph.garment_class:
        raise BadValue("garment_class must be non-empty")
    if not graph.pieces:
        raise BadValue("a garment needs at least one piece")

    _check_unique_ids(graph)
    piece_by_id = {p.id: p for p in graph.pieces}

    for p in graph.pieces:
        _validate_piece(p)

    _validate_seams(graph, piece_by_id)

    for d in graph.darts:
        _validate_dart(d, piece_by_id)

    notch_ids = {n.id for n in graph.notches}
    for n in graph.notches:
        _validate_notch(n, piece_by_id, notch_ids)

    seen_in_region: dict[str, str] = {}
    for r in graph.regions:
        if not r.piece_ids:
            raise BadValue(f"region '{r.id}' covers no pieces", locus=r.id)
        if not r.material_id:
            raise BadValue(f"region '{r.id}' has no material", locus=r.id)
        for pid in r.piece_ids:
            if pid not in piece_by_id:
                raise UnknownReference(
                    f"region '{r.id}' references unknown piece '{pid}'", locus=r.id
                )
            if pid in seen_in_region:
                raise BadValue(
                    f"piece '{pid}' assigned to regions "
                    f"'{seen_in_region[pid]}' and '{r.id}'",
                    locus=r.id,
                )
            seen_in_region[pid] = r.id
    for p in graph.pieces:
        if p.id not in seen_in_region:
            raise BadValue(
                f"piece '{p.id}' is not covered by any material region",
                locus=p.id,
            )

    if graph.openings_override is not None and graph.openings_override < 0:
        raise BadValue("openings override must be >= 0")


def _check_unique_ids(graph: GarmentGraph) -> None:
    for kind, items in (
        ("piece", graph.pieces),
        ("seam", graph.seams),
        ("dart", graph.darts),
        ("notch", graph.notches),
        ("region", graph.regions),
    ):
        seen = set()
        for item in items:
            if not item.id:
                raise BadValue(f"{kind} with empty id")
            if item.id in seen:
                raise DuplicateId(f"duplicate {kind} id '{item.id}'", locus=item.id)
            seen.add(item.id)


def _validate_piece(p: PatternPiece) -> None:
    if len(p.boundary) < 3:
        raise BadGeometry(f"piece '{p.id}' needs >= 3 vertices", locus=p.id)
    values = [c for pt in p.boundary for c in pt]
    values.append(p.grainline_deg)
    values.extend(p.allowance_cm)
    if not all(math.isfinite(v) for v in values):
        raise BadValue(f"piece '{p.id}' contains a non-finite number", locus=p.id)
    if not geometry.is_simple_polygon(p.boundary):
        raise BadGeometry(f"piece '{p.id}' boundary self-intersects", locus=p.id)
    if not geometry.is_ccw(p.boundary):
        raise BadGeometry(
            f"piece '{p.id}' boundary must be counter-clockwise", locus=p.id
        )
    if p.allowance_cm:
        if len(p.allowance_cm) != len(p.boundary):
            raise BadValue(
                f"piece '{p.id}' has {len(p.allowance_cm)} allowance values "
                f"for {len(p.boundary)} edges",
                locus=p.id,
            )
        if any(a < 0 for a in p.allowance_cm):
            raise BadValue(f"piece '{p.id}' allowance must be >= 0", locus=p.id)


def _validate_seams(graph: GarmentGraph, piece_by_id) -> None:
    seam_ids = {s.id for s in graph.seams}
    intervals: dict[tuple[str, int], list[tuple[float, float, str]]] = {}
    for s in graph.seams:
        if not math.isfinite(s.ease_ratio) or s.ease_ratio <= 0:
            raise BadValue(f"seam '{s.id}' ease_ratio must be > 0", locus=s.id)
        if s.stitch_class not in VALID_STITCH_CLASSES:
            raise BadValue(
                f"seam '{s.id}' unknown stitch class '{s.stitch_class}'", locus=s.id
            )
        for dep in s.sew_after:
            if dep not in seam_ids:
                raise UnknownReference(
                    f"seam '{s.id}' sew_after references unknown seam '{dep}'",
                    locus=s.id,
                )
        for side in (s.side_a, s.side_b):
            piece = piece_by_id.get(side.piece_id)
            if piece is None:
                raise UnknownReference(
                    f"seam '{s.id}' references unknown piece '{side.piece_id}'",
                    locus=s.id,
                )
            if not 0 <= side.edge_index < piece.edge_count():
                raise UnknownReference(
                    f"seam '{s.id}' references edge {side.edge_index} "
                    f"of piece '{side.piece_id}' which has "
                    f"{piece.edge_count()} edges",
                    locus=s.id,
                )
            if not (0.0 <= side.t0 < side.t1 <= 1.0):
                raise BadValue(
                    f"seam '{s.id}' sub-range [{side.t0}:{side.t1}] "
                    "must satisfy 0 <= t0 < t1 <= 1",
                    locus=s.id,
                )
            intervals.setdefault((side.piece_id, side.edge_index), []).append(
                (side.t0, side.t1, s.id)
            )
    for (pid, edge), spans in intervals.items():
        spans.sort()
        for (a0, a1, sid_a), (b0, b1, sid_b) in zip(spans, spans[1:]):
            if b0 < a1 - 1e-12:
                raise OverlappingSeamIntervals(
                    f"seams '{sid_a}' and '{sid_b}' overlap on "
                    f"piece '{pid}' edge {edge}",
                    locus=sid_b,
                )


def _validate_dart(d: Dart, piece_by_id) -> None:
    piece = piece_by_id.get(d.piece_id)
    if piece is None:
        raise UnknownReference(
            f"dart '{d.id}' references unknown piece '{d.piece_id}'", locus=d.id
        )
    n = piece.edge_count()
    for edge, t in d.legs:
        if not 0 <= edge < n:
            raise UnknownReference(
                f"dart '{d.id}' leg references edge {edge}", locus=d.id
            )
        if not 0.0 <= t <= 1.0:
            raise BadValue(f"dart '{d.id}' leg fraction out of [0,1]", locus=d.id)
    if d.legs[0] == d.legs[1]:
        raise BadGeometry(f"dart '{d.id}' legs coincide", locus=d.id)
    if not _point_strictly_inside(piece.boundary, d.apex):
        raise BadGeometry(
            f"dart '{d.id}' apex must lie strictly inside piece "
            f"'{d.piece_id}'",
            locus=d.id,
        )


def _validate_notch(n: Notch, piece_by_id, notch_ids) -> None:
    piece = piece_by_id.get(n.piece_id)
    if piece is None:
        raise UnknownReference(
            f"notch '{n.id}' references unknown piece '{n.piece_id}'", locus=n.id
        )
    if not 0 <= n.edge_index < piece.edge_count():
        raise UnknownReference(
            f"notch '{n.id}' references edge {n.edge_index}", locus=n.id
        )
    if not 0.0 <= n.t <= 1.0:
        raise BadValue(f"notch '{n.id}' fraction out of [0,1]", locus=n.id)
    if n.pair_id and n.pair_id not in notch_ids:
        raise UnknownReference(
            f"notch '{n.id}' pairs with unknown notch '{n.pair_id}'", locus=n.id
        )


def _point_strictly_inside(boundary, point) -> bool:
    # Ray cast; boundary points count as outside for dart apex purposes.
    x, y = point
    inside = False
    pts = list(boundary)
    n = len(pts)
    for i in range(n):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % n]
        if abs((x1 - x0) * (y - y0) - (y1 - y0) * (x - x0)) < 1e-12 and (
            min(x0, x1) - 1e-12 <= x <= max(x0, x1) + 1e-12
            and min(y0, y1) - 1e-12 <= y <= max(y0, y1) + 1e-12
        ):
            return False
        if (y0 > y) != (y1 > y):
            xi = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
            if xi > x:
                inside = not inside
    return inside


def _encode(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (str, int, bool)) or value is None:
        return repr(value)
    if isinstance(value, tuple):
        return "(" + ",".join(_encode(v) for v in value) + ")"
    raise TypeError(f"unencodable field type {type(value)!r}")


def _content_key(graph: GarmentGraph) -> str:
    parts = [repr(graph.garment_class), repr(graph.openings_override)]
    for group in (graph.pieces, graph.seams, graph.darts, graph.notches, graph.regions):
        for item in sorted(group, key=lambda it: it.id):
            if isinstance(item, SeamEdge):
                fields = (
                    item.id,
                    (item.side_a.piece_id, item.side_a.edge_index,
                     item.side_a.t0, item.side_a.t1),
                    (item.side_b.piece_id, item.side_b.edge_index,
                     item.side_b.t0, item.side_b.t1),
                    item.ease_ratio,
                    item.stitch_class,
                    item.flip,
                    tuple(sorted(item.sew_after)),
                )
            elif isinstance(item, PatternPiece):
                fields = (
                    item.id, item.boundary, item.grainline_deg,
                    item.allowance_cm, item.label,
                )
            elif isinstance(item, Dart):
                fields = (item.id, item.piece_id, item.apex, item.legs)
            elif isinstance(item, Notch):
                fields = (item.id, item.piece_id, item.edge_index, item.t, item.pair_id)
            else:
                fields = (item.id, item.piece_ids, item.material_id)
            parts.append(_encode(fields))
    digest = hashlib.sha256("\n".join(parts).encode("utf-8")).hexdigest()
    return digest


def with_replaced_piece(graph: GarmentGraph, piece: PatternPiece) -> GarmentGraph:
    """New graph with one piece swapped by id; validation re-run."""
    if all(p.id != piece.id for p in graph.pieces):
        raise UnknownReference(
            f"no piece '{piece.id}' to replace", locus=piece.id
        )
    pieces = tuple(piece if p.id == piece.id else p for p in graph.pieces)
    new = replace(graph, pieces=pieces)
    validate_graph(new)
    return new


def with_material_substitution(
    graph: GarmentGraph, material_from: str, material_to: str
) -> GarmentGraph:
    """New graph with every region using material_from switched over."""
    hit = False
    regions = []
    for r in graph.regions:
        if r.material_id == material_from:
            regions.append(replace(r, material_id=material_to))
            hit = True
        else:
            regions.append(r)
    if not hit:
        raise UnknownReference(
            f"no region uses material '{material_from}'", locus=material_from
        )
    new = replace(graph, regions=tuple(regions))
    validate_graph(new)
    return new
