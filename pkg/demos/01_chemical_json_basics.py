"""
Chemical JSON: arrays in, arrays out
====================================

Read the water molecule into numpy arrays and displace its atoms along a
vibrational normal mode.
"""

from pathlib import Path

import numpy as np

from chemjson import displaced_coordinates, parse_cjson, serialize_cjson, validate_cjson

DOCS = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "documents"

# The document keeps coordinates as one flat list of x, y, z triples.
water = parse_cjson((DOCS / "water.cjson").read_text())
xyz = np.reshape(water.atoms.coords3d, (-1, 3))
print("elements:", water.atoms.element_numbers)
print("coordinates (angstrom):\n", xyz)
print("bonds:", water.bonds.pairs, "orders:", water.bonds.orders)

# Bond lengths straight from the arrays.
for i, j in water.bonds.pairs:
    print(f"  |r{i} - r{j}| = {np.linalg.norm(xyz[i] - xyz[j]):.4f} A")

# Validation returns a list of problems; an empty list means the invariants hold.
print("violations:", validate_cjson(water))

# The canonical writer is stable, so text -> document -> text is a fixed point.
text = serialize_cjson(water)
assert serialize_cjson(parse_cjson(text)) == text

# A document with normal modes: move the atoms half a unit along mode 2.
vib = parse_cjson((DOCS / "water_vibrations.cjson").read_text())
print("frequencies (cm-1):", vib.vibrations.frequencies)
moved = np.reshape(displaced_coordinates(vib, 2, 0.5), (-1, 3))
print("displacement of each atom:\n", moved - np.reshape(vib.atoms.coords3d, (-1, 3)))
