#!/usr/bin/env python3
"""Regenerate the bundled .tir fixtures from their programmatic builders.

Output is the canonical printer form, so regeneration is byte-stable.

Usage: python tools/make_fixtures.py [out_dir]
"""

from __future__ import annotations

import sys
from pathlib import Path

from tir import ir, textfmt

COTTON = "cotton_organic_TX-2847"


def rect(piece_id: str, w: float, h: float, x0: float = 0.0) -> ir.PatternPiece:
    return ir.PatternPiece(
        id=piece_id,
        boundary=((x0, 0.0), (x0 + w, 0.0), (x0 + w, h), (x0, h)),
    )


def tube(width: float) -> ir.GarmentGraph:
    """Rectangle closed side-to-side: a sleeve-like tube of girth `width`."""
    return ir.build_graph(
        "tube_test",
        pieces=[rect("body", width, 40.0)],
        seams=[
            ir.SeamEdge(
                id="side",
                side_a=ir.SeamSide("body", 1),
                side_b=ir.SeamSide("body", 3),
            )
        ],
        regions=[
            ir.MaterialRegion(id="all", piece_ids=("body",), material_id=COTTON)
        ],
    )


def seam_mismatch() -> ir.GarmentGraph:
    """Two panels whose joined edges differ 10 cm vs 12 cm."""
    return ir.build_graph(
        "tube_test",
        pieces=[rect("a", 10.0, 10.0), rect("b", 12.0, 10.0, x0=20.0)],
        seams=[
            ir.SeamEdge(
                id="join",
                side_a=ir.SeamSide("a", 0),
                side_b=ir.SeamSide("b", 0),
            )
        ],
        regions=[
            ir.MaterialRegion(id="all", piece_ids=("a", "b"), material_id=COTTON)
        ],
        openings_override=1,
    )


def shirt20() -> ir.GarmentGraph:
    """Benchmark graph at shirt scale: 20 pieces in two chained panels,
    18 seams, congruent joined edges."""
    pieces = []
    seams = []
    for panel, offset in (("f", 0.0), ("b", 300.0)):
        for i in range(10):
            pieces.append(rect(f"{panel}{i:02d}", 20.0, 30.0, x0=offset + 25.0 * i))
        for i in range(9):
            seams.append(
                ir.SeamEdge(
                    id=f"{panel}s{i:02d}",
                    side_a=ir.SeamSide(f"{panel}{i:02d}", 1),
                    side_b=ir.SeamSide(f"{panel}{i + 1:02d}", 3),
                )
            )
    return ir.build_graph(
        "top",
        pieces=pieces,
        seams=seams,
        regions=[
            ir.MaterialRegion(
                id="all",
                piece_ids=tuple(p.id for p in pieces),
                material_id=COTTON,
            )
        ],
        openings_override=2,
    )


FIXTURES = {
    "tube_ok.tir": lambda: tube(95.0),
    "tube_tight.tir": lambda: tube(85.0),
    "tube_loose.tir": lambda: tube(120.0),
    "seam_mismatch.tir": seam_mismatch,
    "shirt20.tir": shirt20,
}


def main() -> None:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parent.parent / "tests" / "fixtures"
    )
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, build in FIXTURES.items():
        path = out_dir / name
        path.write_text(textfmt.print_canonical(build()), encoding="utf-8")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
