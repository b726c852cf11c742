"""Mapping between Chemical JSON and ExtendedChem JSON.

ExtendedChem carries no connectivity, so going to Chemical JSON perceives
bonds from interatomic distances; going the other way drops bonds and
generates ids in the ``Atom.{k}.Mol.{n}`` pattern.
"""

from __future__ import annotations

from collections import Counter

import numpy as np
from scipy.spatial import cKDTree

from .cjson import AtomArrays, BondArrays, CjsonDocument, Vibrations, validate_cjson
from .elements import by_number, covalent_radius
from .errors import DanglingReference, InvariantViolation
from .extchem import (
    AtomObject,
    ExtChemDocument,
    Molecule,
    Quantity,
    build_id_index,
    convert_quantity,
    resolve_reference,
)

BOND_TOLERANCE = 1.25


def hill_formula(element_numbers) -> str:
    """Molecular formula in Hill order.

    With carbon present: C, then H, then the rest alphabetically. Without
    carbon every element, hydrogen included, is alphabetical. A count of one
    is not written.
    """
    counts = Counter(by_number(z).symbol for z in element_numbers)
    if "C" in counts:
        order = ["C"] + (["H"] if "H" in counts else [])
        order += sorted(s for s in counts if s not in ("C", "H"))
    else:
        order = sorted(counts)
    return "".join(s if counts[s] == 1 else f"{s}{counts[s]}" for s in order)


def perceive_bonds(element_numbers, coords3d, tolerance: float = BOND_TOLERANCE) -> BondArrays:
    """Single bonds between atoms closer than ``tolerance`` times their summed radii.

    Pairs come out with ``i < j`` in lexicographic order.
    """
    n = len(element_numbers)
    if len(coords3d) != 3 * n:
        raise InvariantViolation(f"{len(coords3d)} coordinates for {n} atoms", "coords3d")
    if n < 2:
        return BondArrays()
    radii = np.array([covalent_radius(z) for z in element_numbers])
    xyz = np.asarray(coords3d, dtype=float).reshape(n, 3)
    # widened slightly so pairs sitting exactly on the threshold survive the tree search
    cutoff = tolerance * 2.0 * radii.max() * (1.0 + 1e-9)
    pairs = cKDTree(xyz).query_pairs(cutoff, output_type="ndarray")
    if len(pairs) == 0:
        return BondArrays()
    i, j = pairs[:, 0], pairs[:, 1]
    dist = np.linalg.norm(xyz[i] - xyz[j], axis=1)
    keep = dist <= tolerance * (radii[i] + radii[j])
    lo, hi = np.minimum(i, j)[keep], np.maximum(i, j)[keep]
    order = np.lexsort((hi, lo))
    flat = np.column_stack((lo[order], hi[order])).ravel()
    return BondArrays(connection_indices=tuple(flat.tolist()), orders=(1,) * int(keep.sum()))


def _select_molecule(doc: ExtChemDocument, molecule_id: str | None) -> Molecule | None:
    if molecule_id is None:
        return doc.molecules[-1] if doc.molecules else None
    target = resolve_reference(build_id_index(doc), molecule_id)
    if not isinstance(target, Molecule):
        raise DanglingReference(f"{molecule_id!r} does not name a molecule")
    return target


def _frequencies_for(doc: ExtChemDocument, molecule: Molecule) -> tuple[float, ...] | None:
    index = build_id_index(doc)
    found = None
    for calc in doc.calculations:
        results = calc.calculation_results
        if results is None or not results.vibrational_frequencies:
            continue
        setup = calc.calculation_setup
        if isinstance(setup, str):
            entry = index.get(setup)
            setup = entry.obj if entry else None
        if setup is not None and getattr(setup, "molecule", None) == molecule.id:
            found = tuple(convert_quantity(q, "cm-1").value for q in results.vibrational_frequencies)
    return found


def extchem_to_cjson(
    doc: ExtChemDocument, molecule_id: str | None = None, tolerance: float = BOND_TOLERANCE
) -> CjsonDocument:
    """Chemical JSON view of one molecule (default: the last one defined).

    Coordinates are converted to angstrom, bonds are perceived, and
    vibrational frequencies computed for that molecule are carried over.
    """
    molecule = _select_molecule(doc, molecule_id)
    if molecule is None or not molecule.atoms:
        return CjsonDocument(atoms=AtomArrays(), bonds=BondArrays())
    numbers = tuple(a.element_number for a in molecule.atoms)
    coords: list[float] = []
    for atom in molecule.atoms:
        coords.extend(convert_quantity(atom.cartesian_coordinates, "angstrom").value)
    freqs = _frequencies_for(doc, molecule)
    out = CjsonDocument(
        atoms=AtomArrays(coords3d=tuple(coords), element_numbers=numbers),
        bonds=perceive_bonds(numbers, coords, tolerance),
        vibrations=Vibrations(frequencies=freqs) if freqs else None,
    )
    problems = validate_cjson(out)
    if problems:
        raise InvariantViolation(str(problems[0]), problems[0].path, problems)
    return out


def cjson_to_extchem(doc: CjsonDocument) -> ExtChemDocument:
    problems = validate_cjson(doc)
    if problems:
        raise InvariantViolation(str(problems[0]), problems[0].path, problems)
    return ExtChemDocument(molecules=(molecule_from_arrays(doc.atoms.element_numbers, doc.atoms.coords3d, 1),))


def molecule_from_arrays(element_numbers, coords3d, mol_number: int, units: str = "angstrom",
                         labels=None) -> Molecule:
    """Molecule ``Molecule.{mol_number}`` with atoms ``Atom.{k}.Mol.{mol_number}``."""
    atoms = []
    for k, z in enumerate(element_numbers):
        element = by_number(z)
        atoms.append(AtomObject(
            id=f"Atom.{k + 1}.Mol.{mol_number}",
            element_label=labels[k] if labels else element.symbol.lower(),
            element_symbol=element.symbol,
            element_number=z,
            element_name=element.name,
            cartesian_coordinates=Quantity(tuple(coords3d[3 * k:3 * k + 3]), units),
        ))
    return Molecule(id=f"Molecule.{mol_number}", atoms=tuple(atoms))
