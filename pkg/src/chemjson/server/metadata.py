"""Searchable summary of a stored document, and format auto-detection."""

from __future__ import annotations

from dataclasses import dataclass, field

from .. import _jsonio
from ..cjson import VERSION_KEY, CjsonDocument
from ..cjson import from_json as cjson_from_json
from ..elements import by_number
from ..errors import SchemaViolation
from ..extchem import ExtChemDocument, first_dipole_total
from ..extchem import from_json as extchem_from_json
from ..ops import hill_formula

FORMATS = ("cjson", "extchem")


@dataclass(frozen=True)
class Metadata:
    formula: str
    atom_count: int
    element_set: list[str] = field(default_factory=list)
    has_vibrations: bool = False
    calculation_types: list[str] = field(default_factory=list)
    dipole_total: float | None = None

    def to_json(self) -> dict:
        out = {
            "formula": self.formula,
            "atomCount": self.atom_count,
            "elementSet": list(self.element_set),
            "hasVibrations": self.has_vibrations,
            "calculationTypes": list(self.calculation_types),
        }
        if self.dipole_total is not None:
            out["dipoleTotal"] = self.dipole_total
        return out

    @classmethod
    def from_json(cls, raw: dict) -> "Metadata":
        return cls(
            formula=raw["formula"],
            atom_count=raw["atomCount"],
            element_set=list(raw["elementSet"]),
            has_vibrations=raw["hasVibrations"],
            calculation_types=list(raw["calculationTypes"]),
            dipole_total=raw.get("dipoleTotal"),
        )


def _element_set(numbers) -> list[str]:
    return sorted({by_number(z).symbol for z in numbers})


def extract_metadata(doc: CjsonDocument | ExtChemDocument) -> Metadata:
    """Formula, counts and headline properties. ExtendedChem documents are
    summarised by their last molecule, the one shown by default."""
    if isinstance(doc, CjsonDocument):
        numbers = doc.atoms.element_numbers
        return Metadata(
            formula=hill_formula(numbers),
            atom_count=len(numbers),
            element_set=_element_set(numbers),
            has_vibrations=bool(doc.vibrations and doc.vibrations.mode_count),
        )
    numbers = doc.molecules[-1].element_numbers if doc.molecules else []
    types: list[str] = []
    for c in doc.calculations:
        if c.calculation_type not in types:
            types.append(c.calculation_type)
    return Metadata(
        formula=hill_formula(numbers),
        atom_count=len(numbers),
        element_set=_element_set(numbers),
        has_vibrations=any(
            c.calculation_results is not None and c.calculation_results.vibrational_frequencies
            for c in doc.calculations
        ),
        calculation_types=types,
        dipole_total=first_dipole_total(doc),
    )


def detect_format(raw: dict) -> str:
    """``cjson`` for a ``"chemical json"`` key, ``extchem`` for the envelope keys."""
    if not isinstance(raw, dict):
        raise SchemaViolation("document must be a JSON object")
    is_cjson = VERSION_KEY in raw
    is_extchem = any(k in raw for k in ("molecules", "calculations", "molecule", "calculationSetup"))
    if is_cjson and is_extchem:
        raise SchemaViolation("document carries both Chemical JSON and ExtendedChem keys")
    if is_cjson:
        return "cjson"
    if is_extchem:
        return "extchem"
    raise SchemaViolation("cannot tell the document format from its top-level keys")


def load_document(text: str | bytes, declared: str | None = None):
    """Parse text in the declared (or detected) format; returns ``(format, doc)``."""
    raw = _jsonio.loads(text)
    fmt = declared or detect_format(raw)
    if fmt == "cjson":
        return fmt, cjson_from_json(raw)
    if fmt == "extchem":
        return fmt, extchem_from_json(raw)
    raise SchemaViolation(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")
