"""Seam compatibility (layer 2) and shell topology checks (layer 3).

Both layers emit LayerDiagnostic records rather than raising, so a run
can report every problem it found; gating is the ladder engine's job.
"""

from __future__ import annotations

import json
import importlib.resources
from dataclasses import dataclass, field
from functools import lru_cache

from . import ir, topology


@dataclass(frozen=True)
class Tolerances:
    """Layer 2 comparison tolerances, all overridable per run."""

    seam_rel_tol: float = 0.005       # relative length mismatch allowed
    seam_abs_tol_cm: float = 0.2      # absolute slack for short seams
    allowance_tol_cm: float = 0.1     # allowance width mismatch allowed
    notch_tol: float = 0.02           # notch offset as fraction of seam length


@dataclass(frozen=True)
class LayerDiagnostic:
    layer: str               # "1".."7" plus "6a"/"6b"
    code: str                # stable machine code, e.g. E-SEAM-LEN
    severity: str            # "fail" | "warn" | "info"
    message: str
    subject: str = ""        # id of the seam/piece/region concerned
    metrics: tuple[tuple[str, float], ...] = ()

    def metric(self, name: str) -> float | None:
        for key, value in self.metrics:
            if key == name:
                return value
        return None


@lru_cache(maxsize=1)
def openings_table() -> dict[str, int]:
    path = importlib.resources.files("tir.data") / "openings.json"
    return json.loads(path.read_text(encoding="utf-8"))


def required_openings(graph: ir.GarmentGraph) -> int | None:
    if graph.openings_override is not None:
        return graph.openings_override
    return openings_table().get(graph.garment_class)


# -- layer 2 -----------------------------------------------------------


def check_seams(
    graph: ir.GarmentGraph, tol: Tolerances | None = None
) -> list[LayerDiagnostic]:
    """Compare joined seam sides: length against ease, allowance widths,
    and paired notch alignment along the seam."""
    tol = tol or Tolerances()
    diags: list[LayerDiagnostic] = []
    for seam in graph.seams:
        len_a = ir.seam_side_length(graph, seam.side_a)
        len_b = ir.seam_side_length(graph, seam.side_b)
        longer = max(len_a, len_b)
        shorter = max(min(len_a, len_b), 1e-9)
        # ease_ratio caps how much longer one side may run; within the
        # cap no mismatch is counted. Symmetric in the two sides.
        ratio = longer / shorter
        beyond = max(longer - shorter * seam.ease_ratio, 0.0)
        if (
            ratio > seam.ease_ratio * (1.0 + tol.seam_rel_tol)
            or beyond > tol.seam_abs_tol_cm
        ):
            diags.append(
                LayerDiagnostic(
                    layer="2",
                    code="E-SEAM-LEN",
                    severity="fail",
                    message=(
                        f"seam '{seam.id}' joins {len_a:.2f} cm to "
                        f"{len_b:.2f} cm with ease {seam.ease_ratio:g}; "
                        f"length ratio {ratio:.3f}, "
                        f"{beyond:.2f} cm past the eased length"
                    ),
                    subject=seam.id,
                    metrics=(
                        ("ratio", ratio),
                        ("length_a_cm", len_a),
                        ("length_b_cm", len_b),
                        ("ease_ratio", seam.ease_ratio),
                        ("beyond_ease_cm", beyond),
                    ),
                )
            )
        allow_a = _allowance_at(graph, seam.side_a)
        allow_b = _allowance_at(graph, seam.side_b)
        if allow_a is not None and allow_b is not None:
            gap = abs(allow_a - allow_b)
            if gap > tol.allowance_tol_cm:
                diags.append(
                    LayerDiagnostic(
                        layer="2",
                        code="E-SEAM-ALLOW",
                        severity="fail",
                        message=(
                            f"seam '{seam.id}' allowance widths differ by "
                            f"{gap:.2f} cm ({allow_a:g} vs {allow_b:g})"
                        ),
                        subject=seam.id,
                        metrics=(
                            ("allowance_a_cm", allow_a),
                            ("allowance_b_cm", allow_b),
                        ),
                    )
                )
        diags.extend(_check_notches(graph, seam, len_a, len_b, tol))
    return diags


def _allowance_at(graph: ir.GarmentGraph, side: ir.SeamSide) -> float | None:
    piece = graph.piece(side.piece_id)
    if not piece.allowance_cm:
        return None
    return piece.allowance_cm[side.edge_index]


def _position_on_seam(side: ir.SeamSide, notch: ir.Notch) -> float | None:
    """Notch position as a fraction of the seam side, 0 at side start."""
    if notch.piece_id != side.piece_id or notch.edge_index != side.edge_index:
        return None
    if not side.t0 - 1e-9 <= notch.t <= side.t1 + 1e-9:
        return None
    return (notch.t - side.t0) / (side.t1 - side.t0)


def _check_notches(graph, seam, len_a, len_b, tol) -> list[LayerDiagnostic]:
    notch_by_id = {n.id: n for n in graph.notches}
    out = []
    for n in graph.notches:
        if not n.pair_id or n.id > n.pair_id:
            continue  # handle each pair once, from the lower id
        partner = notch_by_id.get(n.pair_id)
        if partner is None:
            continue
        pos_a = _position_on_seam(seam.side_a, n)
        pos_b = _position_on_seam(seam.side_b, partner)
        if pos_a is None or pos_b is None:
            pos_a = _position_on_seam(seam.side_a, partner)
            pos_b = _position_on_seam(seam.side_b, n)
        if pos_a is None or pos_b is None:
            continue  # pair does not sit on this seam
        # Sides meet antiparallel unless flipped.
        expected_b = pos_b if seam.flip else 1.0 - pos_b
        offset = abs(pos_a - expected_b)
        if offset > tol.notch_tol:
            seam_len = max(len_a, len_b)
            out.append(
                LayerDiagnostic(
                    layer="2",
                    code="E-SEAM-NOTCH",
                    severity="warn",
                    message=(
                        f"notches '{n.id}'/'{n.pair_id}' meet "
                        f"{offset * seam_len:.2f} cm apart along seam "
                        f"'{seam.id}' ({offset:.1%} of its length)"
                    ),
                    subject=seam.id,
                    metrics=(("offset_fraction", offset),),
                )
            )
    return out


# -- layer 3 -----------------------------------------------------------


def check_manifold(
    shell: topology.AssembledShell, graph: ir.GarmentGraph
) -> list[LayerDiagnostic]:
    """Manifoldness, orientability and boundary loop count against the
    garment class's required openings."""
    diags: list[LayerDiagnostic] = []
    if not shell.manifold:
        diags.append(
            LayerDiagnostic(
                layer="3",
                code="E-TOPO-NONMANIFOLD",
                severity="fail",
                message="assembled shell has a non-manifold edge or vertex",
            )
        )
    if not shell.orientable:
        diags.append(
            LayerDiagnostic(
                layer="3",
                code="E-TOPO-NONORIENT",
                severity="fail",
                message=(
                    "assembled shell is non-orientable; a seam joins a "
                    "piece to itself with a half twist"
                ),
            )
        )
    required = required_openings(graph)
    if required is not None:
        if shell.boundary_loops == 0 and required > 0:
            diags.append(
                LayerDiagnostic(
                    layer="3",
                    code="E-TOPO-CLOSED",
                    severity="fail",
                    message=(
                        f"shell is closed but class '{graph.garment_class}' "
                        f"requires {required} openings"
                    ),
                    metrics=(("required_openings", float(required)),),
                )
            )
        elif shell.boundary_loops != required:
            diags.append(
                LayerDiagnostic(
                    layer="3",
                    code="E-TOPO-OPENINGS",
                    severity="fail",
                    message=(
                        f"shell has {shell.boundary_loops} openings; class "
                        f"'{graph.garment_class}' requires {required}"
                    ),
                    metrics=(
                        ("boundary_loops", float(shell.boundary_loops)),
                        ("required_openings", float(required)),
                    ),
                )
            )
    if shell.orientable and (shell.genus or 0) > 0:
        diags.append(
            LayerDiagnostic(
                layer="3",
                code="E-TOPO-GENUS",
                severity="warn",
                message=f"shell has genus {shell.genus}; unexpected handles",
                metrics=(("genus", float(shell.genus or 0)),),
            )
        )
    return diags


def verify_topology(
    graph: ir.GarmentGraph,
) -> tuple[topology.AssembledShell | None, list[LayerDiagnostic]]:
    """Assemble and check; assembly failures become diagnostics."""
    try:
        shell = topology.assemble_shell(graph)
    except (topology.GlueMismatch, topology.MeshQuality) as exc:
        return None, [
            LayerDiagnostic(
                layer="3",
                code="E-TOPO-GLUE",
                severity="fail",
                message=str(exc),
            )
        ]
    return shell, check_manifold(shell, graph)
