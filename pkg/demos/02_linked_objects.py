"""
ExtendedChem JSON: objects that point at each other
===================================================

Every atom, molecule, setup and basis set carries an id, and other objects
refer to them by that id. This demo follows a few references through the id
index of a two-step water calculation before breaking one on purpose.
"""

import json
from pathlib import Path

from chemjson import build_id_index, parse_extchem, resolve_reference, validate_extchem, validate_references

DOCS = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "documents"
text = (DOCS / "water_full.json").read_text()
doc = parse_extchem(text)

# Ids in the order they are first defined, with where each one lives.
index = build_id_index(doc)
for ident, entry in index.items():
    print(f"{ident:<20} {entry.path}")

# The shielding value of the second calculation hangs off an atom by reference.
record = doc.calculations[1].calculation_results.molecular_properties[1]
atom = resolve_reference(index, record.atom)
print(f"\n{record.atom} -> {atom.element_symbol} at {atom.cartesian_coordinates.value}")
print("shielding:", record.properties["diamagneticShielding"])

# The basis set is defined once, inside the first setup, and reused later.
print("BasisSet.1 ->", resolve_reference(index, "BasisSet.1"))
print("violations:", validate_extchem(doc))

# Point the second setup at a molecule that does not exist.
raw = json.loads(text)
raw["calculations"][1]["calculationSetup"]["molecule"] = "Molecule.7"
for problem in validate_references(parse_extchem(json.dumps(raw))):
    print("broken:", problem)
