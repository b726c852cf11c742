"""Chemical JSON and ExtendedChem JSON: formats, conversion, log parsing, data service."""

from .cjson import (
    AtomArrays,
    BondArrays,
    CjsonDocument,
    Vibrations,
    atom_position,
    displaced_coordinates,
    parse_cjson,
    serialize_cjson,
    validate_cjson,
)
from .errors import ChemDataError, Violation
from .extchem import (
    ExtChemDocument,
    Quantity,
    build_id_index,
    convert_quantity,
    parse_extchem,
    resolve_reference,
    serialize_extchem,
    validate_extchem,
    validate_references,
)
from .nwparse import parse_log
from .ops import cjson_to_extchem, extchem_to_cjson, hill_formula, perceive_bonds

__version__ = "0.1.0"

__all__ = [
    "AtomArrays",
    "BondArrays",
    "CjsonDocument",
    "Vibrations",
    "atom_position",
    "displaced_coordinates",
    "parse_cjson",
    "serialize_cjson",
    "validate_cjson",
    "ChemDataError",
    "Violation",
    "ExtChemDocument",
    "Quantity",
    "build_id_index",
    "convert_quantity",
    "parse_extchem",
    "resolve_reference",
    "serialize_extchem",
    "validate_extchem",
    "validate_references",
    "parse_log",
    "cjson_to_extchem",
    "extchem_to_cjson",
    "hill_formula",
    "perceive_bonds",
]
