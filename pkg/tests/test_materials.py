from __future__ import annotations

from pathlib import Path

import pytest

from tir import materials

from conftest import COTTON


def _rows():
    text = materials.bundled_db_path().read_text(encoding="utf-8")
    lines = text.splitlines()
    return lines[0], lines[1:]


def _write_db(tmp_path: Path, header: str, rows: list[str]) -> Path:
    p = tmp_path / "mat.tsv"
    p.write_text("\n".join([header, *rows]) + "\n", encoding="utf-8")
    return p


def test_bundled_db_reference_values(db):
    cotton = db.get(COTTON)
    assert cotton.bending_B_gfcm2_cm == pytest.approx(0.12)
    assert cotton.carbon_kgco2e_per_kg == pytest.approx(8.2)
    assert cotton.water_L_per_kg == pytest.approx(2100.0)
    assert cotton.completeness == pytest.approx(0.78)
    assert cotton.fabric_family == "woven_cotton"


def test_leather_entries_convert_per_m2_to_per_kg(db):
    animal = db.get("leather_animal_LA-1")
    pu = db.get("leather_pu_LP-2")
    cactus = db.get("leather_cactus_LC-3")
    for spec, per_m2 in ((animal, 110.0), (pu, 15.8), (cactus, 1.4)):
        assert spec.impact_basis == "per_m2"
        src = dict(spec.source_values)
        assert src["carbon_kgco2e_per_m2"] == pytest.approx(per_m2)
        expect = per_m2 / (spec.areal_density_g_m2 / 1000.0)
        assert spec.carbon_kgco2e_per_kg == pytest.approx(expect)
    assert animal.carbon_kgco2e_per_kg == pytest.approx(100.0)


def test_unknown_material_raises(db):
    with pytest.raises(materials.UnknownMaterial):
        db.get("polyester_fantasy_PF-0")
    assert COTTON in db
    assert "polyester_fantasy_PF-0" not in db


def test_ids_sorted_and_listing_consistent(db):
    ids = db.ids()
    assert ids == sorted(ids)
    assert [m.id for m in db.listing()] == ids


def test_missing_column_rejected(tmp_path):
    header, rows = _rows()
    cols = header.split("\t")
    drop = cols.index("poisson")
    bad_header = "\t".join(c for i, c in enumerate(cols) if i != drop)
    bad_rows = [
        "\t".join(c for i, c in enumerate(r.split("\t")) if i != drop) for r in rows
    ]
    with pytest.raises(materials.MissingColumn):
        materials.load_material_db(_write_db(tmp_path, bad_header, bad_rows))


def test_bad_number_rejected_with_row(tmp_path):
    header, rows = _rows()
    cols = header.split("\t")
    i = cols.index("thickness_mm")
    fields = rows[2].split("\t")
    fields[i] = "thick"
    rows[2] = "\t".join(fields)
    with pytest.raises(materials.BadRow) as err:
        materials.load_material_db(_write_db(tmp_path, header, rows))
    assert err.value.row == 4


def test_composition_must_sum_to_one(tmp_path):
    header, rows = _rows()
    cols = header.split("\t")
    i = cols.index("composition")
    fields = rows[0].split("\t")
    fields[i] = "cotton:0.6;hemp:0.3"
    with pytest.raises(materials.BadRow):
        materials.load_material_db(_write_db(tmp_path, header, ["\t".join(fields)]))


def test_duplicate_id_rejected(tmp_path):
    header, rows = _rows()
    with pytest.raises(materials.BadRow):
        materials.load_material_db(_write_db(tmp_path, header, [rows[0], rows[0]]))


def test_negative_density_rejected(tmp_path):
    header, rows = _rows()
    cols = header.split("\t")
    i = cols.index("areal_density_g_m2")
    fields = rows[0].split("\t")
    fields[i] = "-10"
    with pytest.raises(materials.BadRow):
        materials.load_material_db(_write_db(tmp_path, header, ["\t".join(fields)]))


def test_content_hash_tracks_content(tmp_path, db):
    header, rows = _rows()
    same = materials.load_material_db(_write_db(tmp_path, header, rows))
    assert same.content_hash == db.content_hash
    changed = materials.load_material_db(_write_db(tmp_path, header, rows[:-1]))
    assert changed.content_hash != db.content_hash


def test_env_var_overrides_default(tmp_path, monkeypatch):
    header, rows = _rows()
    p = _write_db(tmp_path, header, rows[:3])
    monkeypatch.setenv("TIR_MATERIAL_DB", str(p))
    db = materials.load_material_db()
    assert len(db.materials) == 3
