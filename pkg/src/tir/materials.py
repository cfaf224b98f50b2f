"""Material database: mechanics and impact factors per fabric.

The on-disk format is a UTF-8 TSV with a header row. Impact factors may
be stated per kilogram (the native unit downstream) or per square metre;
per-m2 rows are converted at load time using the areal density and the
conversion is recorded on the material so exported documents can trace
the original figure.
"""

from __future__ import annotations

import hashlib
import importlib.resources
import os
from dataclasses import dataclass, replace
from pathlib import Path

REQUIRED_COLUMNS = (
    "id",
    "fabric_family",
    "composition",
    "areal_density_g_m2",
    "thickness_mm",
    "bending_B_gfcm2_cm",
    "stretch_N_m",
    "shear_N_m",
    "poisson",
    "carbon_kgco2e_per_kg",
    "carbon_rel_sigma",
    "water_L_per_kg",
    "water_rel_sigma",
    "mech_rel_sigma",
    "supplier_id",
    "completeness",
)
OPTIONAL_COLUMNS = ("impact_basis",)
VALID_BASES = ("per_kg", "per_m2")


class MaterialDbError(ValueError):
    def __init__(self, message: str, row: int | None = None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class MissingColumn(MaterialDbError):
    pass


class BadRow(MaterialDbError):
    pass


class UnknownMaterial(KeyError):
    pass


@dataclass(frozen=True)
class MaterialSpec:
    id: str
    fabric_family: str
    composition: tuple[tuple[str, float], ...]
    areal_density_g_m2: float
    thickness_mm: float
    bending_B_gfcm2_cm: float
    stretch_N_m: float
    shear_N_m: float
    poisson: float
    carbon_kgco2e_per_kg: float
    carbon_rel_sigma: float
    water_L_per_kg: float
    water_rel_sigma: float
    mech_rel_sigma: float
    supplier_id: str
    completeness: float
    impact_basis: str = "per_kg"
    # Original per-m2 figures and the conversion note, kept for trace
    # output; empty for natively per-kg rows.
    basis_note: str = ""
    source_values: tuple[tuple[str, float], ...] = ()
    extras: tuple[tuple[str, str], ...] = ()

    def kg_per_m2(self) -> float:
        return self.areal_density_g_m2 / 1000.0


@dataclass
class MaterialDB:
    materials: dict[str, MaterialSpec]
    source_path: str
    content_hash: str

    def get(self, material_id: str) -> MaterialSpec:
        try:
            return self.materials[material_id]
        except KeyError:
            raise UnknownMaterial(material_id) from None

    def __contains__(self, material_id: str) -> bool:
        return material_id in self.materials

    def ids(self) -> list[str]:
        return sorted(self.materials)

    def listing(self) -> list[MaterialSpec]:
        return [self.materials[k] for k in self.ids()]


def bundled_db_path() -> Path:
    return Path(importlib.resources.files("tir.data") / "materials.tsv")


def load_material_db(path: str | Path | None = None) -> MaterialDB:
    """Load a TSV material database; None loads TIR_MATERIAL_DB if set,
    else the bundled default.

    Raises MissingColumn / BadRow with the offending row number; a
    database that loads is fully usable downstream with no per-field
    checks needed again.
    """
    if path is None:
        path = os.environ.get("TIR_MATERIAL_DB") or None
    db_path = Path(path) if path is not None else bundled_db_path()
    raw = db_path.read_bytes()
    text = raw.decode("utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise MissingColumn("empty material database")
    header = lines[0].split("\t")
    for col in REQUIRED_COLUMNS:
        if col not in header:
            raise MissingColumn(f"missing column '{col}'")
    idx = {name: i for i, name in enumerate(header)}
    known = set(REQUIRED_COLUMNS) | set(OPTIONAL_COLUMNS)
    extra_cols = [c for c in header if c not in known]

    materials: dict[str, MaterialSpec] = {}
    for row_no, line in enumerate(lines[1:], start=2):
        cells = line.split("\t")
        if len(cells) != len(header):
            raise BadRow(
                f"expected {len(header)} cells, found {len(cells)}", row=row_no
            )

        def cell(name: str) -> str:
            return cells[idx[name]].strip()

        def num(name: str) -> float:
            try:
                return float(cell(name))
            except ValueError:
                raise BadRow(f"column '{name}' is not a number", row=row_no) from None

        mid = cell("id")
        if not mid:
            raise BadRow("empty material id", row=row_no)
        if mid in materials:
            raise BadRow(f"duplicate material id '{mid}'", row=row_no)

        basis = cell("impact_basis") if "impact_basis" in idx else "per_kg"
        basis = basis or "per_kg"
        if basis not in VALID_BASES:
            raise BadRow(f"unknown impact_basis '{basis}'", row=row_no)

        spec = MaterialSpec(
            id=mid,
            fabric_family=cell("fabric_family"),
            composition=_parse_composition(cell("composition"), row_no),
            areal_density_g_m2=num("areal_density_g_m2"),
            thickness_mm=num("thickness_mm"),
            bending_B_gfcm2_cm=num("bending_B_gfcm2_cm"),
            stretch_N_m=num("stretch_N_m"),
            shear_N_m=num("shear_N_m"),
            poisson=num("poisson"),
            carbon_kgco2e_per_kg=num("carbon_kgco2e_per_kg"),
            carbon_rel_sigma=num("carbon_rel_sigma"),
            water_L_per_kg=num("water_L_per_kg"),
            water_rel_sigma=num("water_rel_sigma"),
            mech_rel_sigma=num("mech_rel_sigma"),
            supplier_id=cell("supplier_id"),
            completeness=num("completeness"),
            impact_basis=basis,
            extras=tuple((c, cells[idx[c]].strip()) for c in extra_cols),
        )
        _check_ranges(spec, row_no)
        if basis == "per_m2":
            spec = _convert_per_m2(spec)
        materials[mid] = spec

    return MaterialDB(
        materials=materials,
        source_path=str(db_path),
        content_hash=hashlib.sha256(raw).hexdigest(),
    )


def _parse_composition(text: str, row_no: int) -> tuple[tuple[str, float], ...]:
    if not text:
        raise BadRow("empty composition", row=row_no)
    parts = []
    for chunk in text.split(";"):
        if ":" not in chunk:
            raise BadRow(f"composition entry '{chunk}' is not fibre:fraction",
                         row=row_no)
        fibre, frac_text = chunk.split(":", 1)
        try:
            frac = float(frac_text)
        except ValueError:
            raise BadRow(f"composition fraction '{frac_text}' is not a number",
                         row=row_no) from None
        if not 0.0 < frac <= 1.0:
            raise BadRow(f"composition fraction {frac} out of (0, 1]", row=row_no)
        parts.append((fibre.strip(), frac))
    total = sum(f for _, f in parts)
    if abs(total - 1.0) > 1e-6:
        raise BadRow(f"composition fractions sum to {total}, expected 1", row=row_no)
    return tuple(parts)


def _check_ranges(spec: MaterialSpec, row_no: int) -> None:
    positive = (
        ("areal_density_g_m2", spec.areal_density_g_m2),
        ("thickness_mm", spec.thickness_mm),
        ("bending_B_gfcm2_cm", spec.bending_B_gfcm2_cm),
        ("stretch_N_m", spec.stretch_N_m),
        ("shear_N_m", spec.shear_N_m),
    )
    for name, value in positive:
        if value <= 0:
            raise BadRow(f"column '{name}' must be > 0", row=row_no)
    non_negative = (
        ("carbon_kgco2e_per_kg", spec.carbon_kgco2e_per_kg),
        ("carbon_rel_sigma", spec.carbon_rel_sigma),
        ("water_L_per_kg", spec.water_L_per_kg),
        ("water_rel_sigma", spec.water_rel_sigma),
        ("mech_rel_sigma", spec.mech_rel_sigma),
    )
    for name, value in non_negative:
        if value < 0:
            raise BadRow(f"column '{name}' must be >= 0", row=row_no)
    if not 0.0 <= spec.poisson < 0.5:
        raise BadRow("poisson must lie in [0, 0.5)", row=row_no)
    if not 0.0 <= spec.completeness <= 1.0:
        raise BadRow("completeness must lie in [0, 1]", row=row_no)


def _convert_per_m2(spec: MaterialSpec) -> MaterialSpec:
    kg_per_m2 = spec.kg_per_m2()
    carbon = spec.carbon_kgco2e_per_kg / kg_per_m2
    water = spec.water_L_per_kg / kg_per_m2
    note = (
        f"impact factors converted from per_m2 using areal density "
        f"{spec.areal_density_g_m2:g} g/m2 ({kg_per_m2:g} kg/m2)"
    )
    return replace(
        spec,
        carbon_kgco2e_per_kg=carbon,
        water_L_per_kg=water,
        basis_note=note,
        source_values=(
            ("carbon_kgco2e_per_m2", spec.carbon_kgco2e_per_kg),
            ("water_L_per_m2", spec.water_L_per_kg),
        ),
    )
