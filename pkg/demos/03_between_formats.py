"""
Converting between the two formats
==================================

ExtendedChem stores coordinates with units and no bonds; Chemical JSON
stores bare angstrom arrays with explicit bonds. Converting one way turns
bohr into angstrom and perceives bonds from covalent radii; the other way
generates ids.
"""

from pathlib import Path

import numpy as np

from chemjson import (
    Quantity,
    cjson_to_extchem,
    convert_quantity,
    extchem_to_cjson,
    hill_formula,
    parse_extchem,
    perceive_bonds,
    serialize_extchem,
)
from chemjson.elements import covalent_radius

DOCS = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "documents"

# One coordinate by hand first.
z_bohr = Quantity(0.21063604, "bohr")
print(z_bohr, "->", convert_quantity(z_bohr, "angstrom"))

# The whole molecule.
doc = parse_extchem((DOCS / "water_molecule.json").read_text())
water = extchem_to_cjson(doc)
xyz = np.reshape(water.atoms.coords3d, (-1, 3))
print("angstrom coordinates:\n", xyz)
print("perceived bonds:", water.bonds.pairs, "formula:", hill_formula(water.atoms.element_numbers))

# Why those bonds: each distance against 1.25 times the summed radii.
for i, j in [(0, 1), (0, 2), (1, 2)]:
    d = np.linalg.norm(xyz[i] - xyz[j])
    limit = 1.25 * (covalent_radius(water.atoms.element_numbers[i]) + covalent_radius(water.atoms.element_numbers[j]))
    print(f"  {i}-{j}: {d:.4f} A vs {limit:.4f} A -> {'bond' if d <= limit else 'no bond'}")

# A tighter tolerance drops the O-H bonds of this stretched geometry.
print("tolerance 1.0:", perceive_bonds(water.atoms.element_numbers, water.atoms.coords3d, 1.0).pairs)

# And back again, with generated ids.
print(serialize_extchem(cjson_to_extchem(water)))
