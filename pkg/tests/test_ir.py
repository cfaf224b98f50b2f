from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tir import geometry, ir

from conftest import COTTON, rect_piece, tube_graph


def _one_piece_graph(piece, **kwargs):
    region = ir.MaterialRegion(id="all", piece_ids=(piece.id,), material_id=COTTON)
    return ir.build_graph("swatch", [piece], regions=[region], **kwargs)


def test_minimal_graph_builds():
    g = _one_piece_graph(rect_piece("p", 10.0, 20.0))
    assert len(g.pieces) == 1
    assert g.piece("p").boundary[2] == (10.0, 20.0)
    assert g.material_for_piece("p") == COTTON


def test_piece_area_and_edge_length():
    p = rect_piece("p", 10.0, 20.0)
    assert ir.piece_area(p) == pytest.approx(200.0)
    assert ir.edge_length(p, 0) == pytest.approx(10.0)
    assert ir.edge_length(p, 1) == pytest.approx(20.0)
    assert ir.edge_length(p, 1, (0.25, 0.75)) == pytest.approx(10.0)
    with pytest.raises(ir.UnknownReference):
        ir.edge_length(p, 4)
    with pytest.raises(ir.BadValue):
        ir.edge_length(p, 0, (0.8, 0.2))


def test_seam_side_length_uses_sub_range():
    g = tube_graph(95.0)
    side = ir.SeamSide("body", 1, 0.0, 0.5)
    assert ir.seam_side_length(g, side) == pytest.approx(20.0)


def test_duplicate_ids_rejected():
    p = rect_piece("p", 10.0, 10.0)
    with pytest.raises(ir.DuplicateId):
        _one_piece_graph_dup = ir.build_graph(
            "swatch",
            [p, rect_piece("p", 5.0, 5.0)],
            regions=[ir.MaterialRegion("all", ("p",), COTTON)],
        )


def test_unknown_piece_in_seam_rejected():
    p = rect_piece("p", 10.0, 10.0)
    seam = ir.SeamEdge("s", ir.SeamSide("ghost", 0), ir.SeamSide("p", 0))
    with pytest.raises(ir.UnknownReference):
        ir.build_graph(
            "swatch",
            [p],
            seams=[seam],
            regions=[ir.MaterialRegion("all", ("p",), COTTON)],
        )


def test_edge_index_out_of_range_rejected():
    p = rect_piece("p", 10.0, 10.0)
    seam = ir.SeamEdge("s", ir.SeamSide("p", 9), ir.SeamSide("p", 0))
    with pytest.raises(ir.UnknownReference):
        _one_piece_graph(p, seams=[seam])


def test_overlapping_seam_intervals_rejected():
    p = rect_piece("p", 10.0, 10.0)
    s1 = ir.SeamEdge("s1", ir.SeamSide("p", 0, 0.0, 0.6), ir.SeamSide("p", 2, 0.0, 0.6))
    s2 = ir.SeamEdge("s2", ir.SeamSide("p", 0, 0.5, 1.0), ir.SeamSide("p", 1, 0.0, 0.5))
    with pytest.raises(ir.OverlappingSeamIntervals):
        _one_piece_graph(p, seams=[s1, s2])


def test_adjacent_seam_intervals_allowed():
    p = rect_piece("p", 10.0, 10.0)
    s1 = ir.SeamEdge("s1", ir.SeamSide("p", 0, 0.0, 0.5), ir.SeamSide("p", 2, 0.0, 0.5))
    s2 = ir.SeamEdge("s2", ir.SeamSide("p", 0, 0.5, 1.0), ir.SeamSide("p", 1, 0.0, 0.5))
    g = _one_piece_graph(p, seams=[s1, s2])
    assert len(g.seams) == 2


def test_self_intersecting_boundary_rejected():
    bowtie = ir.PatternPiece(
        id="x", boundary=((0.0, 0.0), (2.0, 2.0), (2.0, 0.0), (0.0, 2.0))
    )
    with pytest.raises(ir.BadGeometry):
        _one_piece_graph(bowtie)


def test_clockwise_boundary_rejected():
    cw = ir.PatternPiece(
        id="x", boundary=((0.0, 0.0), (0.0, 2.0), (2.0, 2.0), (2.0, 0.0))
    )
    with pytest.raises(ir.BadGeometry):
        _one_piece_graph(cw)


def test_non_finite_coordinate_rejected():
    p = ir.PatternPiece(
        id="x", boundary=((0.0, 0.0), (2.0, 0.0), (2.0, math.nan))
    )
    with pytest.raises(ir.BadValue):
        _one_piece_graph(p)


def test_allowance_count_must_match_edges():
    p = ir.PatternPiece(
        id="x",
        boundary=((0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)),
        allowance_cm=(1.0, 1.0),
    )
    with pytest.raises(ir.BadValue):
        _one_piece_graph(p)


def test_bad_ease_and_stitch_class_rejected():
    p = rect_piece("p", 10.0, 10.0)
    bad_ease = ir.SeamEdge(
        "s", ir.SeamSide("p", 0), ir.SeamSide("p", 2), ease_ratio=0.0
    )
    with pytest.raises(ir.BadValue):
        _one_piece_graph(p, seams=[bad_ease])
    bad_stitch = ir.SeamEdge(
        "s", ir.SeamSide("p", 0), ir.SeamSide("p", 2), stitch_class="glue"
    )
    with pytest.raises(ir.BadValue):
        _one_piece_graph(p, seams=[bad_stitch])


def test_every_piece_needs_a_region():
    p1 = rect_piece("a", 10.0, 10.0)
    p2 = rect_piece("b", 10.0, 10.0)
    with pytest.raises(ir.BadValue):
        ir.build_graph(
            "swatch",
            [p1, p2],
            regions=[ir.MaterialRegion("r", ("a",), COTTON)],
        )


def test_piece_in_two_regions_rejected():
    p = rect_piece("a", 10.0, 10.0)
    with pytest.raises(ir.BadValue):
        ir.build_graph(
            "swatch",
            [p],
            regions=[
                ir.MaterialRegion("r1", ("a",), COTTON),
                ir.MaterialRegion("r2", ("a",), "linen_loom_LN-73"),
            ],
        )


def test_dart_validation():
    p = rect_piece("p", 10.0, 10.0)
    ok = ir.Dart("d", "p", apex=(5.0, 5.0), legs=((0, 0.3), (0, 0.7)))
    g = _one_piece_graph(p, darts=[ok])
    assert len(g.darts) == 1

    outside_apex = ir.Dart("d", "p", apex=(15.0, 5.0), legs=((0, 0.3), (0, 0.7)))
    with pytest.raises(ir.BadGeometry):
        _one_piece_graph(p, darts=[outside_apex])

    coincident = ir.Dart("d", "p", apex=(5.0, 5.0), legs=((0, 0.5), (0, 0.5)))
    with pytest.raises(ir.BadGeometry):
        _one_piece_graph(p, darts=[coincident])


def test_notch_pairing_validation():
    p = rect_piece("p", 10.0, 10.0)
    n1 = ir.Notch("n1", "p", 0, 0.5, pair_id="n2")
    with pytest.raises(ir.UnknownReference):
        _one_piece_graph(p, notches=[n1])
    n2 = ir.Notch("n2", "p", 2, 0.5, pair_id="n1")
    g = _one_piece_graph(p, notches=[n1, n2])
    assert len(g.notches) == 2


def test_with_material_substitution():
    g = tube_graph(95.0)
    g2 = ir.with_material_substitution(g, COTTON, "linen_loom_LN-73")
    assert g2.material_for_piece("body") == "linen_loom_LN-73"
    assert g.material_for_piece("body") == COTTON
    with pytest.raises(ir.UnknownReference):
        ir.with_material_substitution(g, "no_such_material", COTTON)


def test_with_replaced_piece():
    g = tube_graph(95.0)
    wider = rect_piece("body", 100.0, 40.0)
    g2 = ir.with_replaced_piece(g, wider)
    assert ir.piece_area(g2.piece("body")) == pytest.approx(4000.0)
    assert ir.piece_area(g.piece("body")) == pytest.approx(3800.0)
    with pytest.raises(ir.UnknownReference):
        ir.with_replaced_piece(g, rect_piece("ghost", 10.0, 10.0))


def test_content_key_stable_across_construction_order():
    p1, p2 = rect_piece("a", 10.0, 10.0), rect_piece("b", 12.0, 10.0)
    r1 = ir.MaterialRegion("r1", ("a",), COTTON)
    r2 = ir.MaterialRegion("r2", ("b",), "linen_loom_LN-73")
    g1 = ir.build_graph("swatch", [p1, p2], regions=[r1, r2])
    g2 = ir.build_graph("swatch", [p2, p1], regions=[r2, r1])
    assert g1.content_key() == g2.content_key()
    g3 = ir.build_graph("swatch", [p1, rect_piece("b", 12.5, 10.0)], regions=[r1, r2])
    assert g1.content_key() != g3.content_key()


def test_sew_after_normalized_sorted():
    p = rect_piece("p", 10.0, 10.0)
    s1 = ir.SeamEdge("s1", ir.SeamSide("p", 0, 0.0, 0.4), ir.SeamSide("p", 2, 0.0, 0.4))
    s2 = ir.SeamEdge("s2", ir.SeamSide("p", 1), ir.SeamSide("p", 3))
    s3 = ir.SeamEdge(
        "s3",
        ir.SeamSide("p", 0, 0.5, 1.0),
        ir.SeamSide("p", 2, 0.5, 1.0),
        sew_after=("s2", "s1"),
    )
    g = _one_piece_graph(p, seams=[s1, s2, s3])
    assert g.seam("s3").sew_after == ("s1", "s2")


@given(
    st.floats(-100.0, 100.0),
    st.floats(-100.0, 100.0),
    st.floats(0.0, 360.0),
)
def test_piece_area_rigid_motion_invariant(dx, dy, deg):
    base = rect_piece("p", 14.0, 6.0)
    moved = geometry.translate(geometry.rotate(base.boundary, deg), dx, dy)
    p2 = ir.PatternPiece(id="p", boundary=tuple(map(tuple, moved)))
    assert ir.piece_area(p2) == pytest.approx(84.0, rel=1e-9)
