"""Array-oriented Chemical JSON: parse, validate, serialize.

A molecule is a set of parallel flat arrays. Atom ``n`` owns coordinate
slots ``3n .. 3n+2`` of ``atoms.coords.3d`` (angstrom) and slot ``n`` of
``atoms.elements.number``; bonds are flat index pairs with one order each.
Keys this module does not model are carried in ``extra`` dicts and written
back unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _jsonio
from .elements import MAX_ATOMIC_NUMBER
from .errors import (
    InvariantViolation,
    ModeOutOfRange,
    NoVibrations,
    SchemaViolation,
    Violation,
)

VERSION_KEY = "chemical json"
FORMAT_VERSION = 0


@dataclass(frozen=True)
class AtomArrays:
    coords3d: tuple[float, ...] = ()
    element_numbers: tuple[int, ...] = ()
    extra: dict = field(default_factory=dict)
    coords_extra: dict = field(default_factory=dict)
    elements_extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class BondArrays:
    connection_indices: tuple[int, ...] = ()
    orders: tuple[int, ...] = ()
    extra: dict = field(default_factory=dict)
    connections_extra: dict = field(default_factory=dict)

    @property
    def pairs(self) -> list[tuple[int, int]]:
        idx = self.connection_indices
        return [(idx[i], idx[i + 1]) for i in range(0, len(idx) - 1, 2)]


@dataclass(frozen=True)
class Vibrations:
    frequencies: tuple[float, ...] = ()
    intensities: tuple[float, ...] | None = None
    eigen_vectors: tuple[tuple[float, ...], ...] | None = None
    extra: dict = field(default_factory=dict)

    @property
    def mode_count(self) -> int:
        return len(self.frequencies)


@dataclass(frozen=True)
class CjsonDocument:
    atoms: AtomArrays = field(default_factory=AtomArrays)
    bonds: BondArrays | None = None
    name: str | None = None
    vibrations: Vibrations | None = None
    version: int = FORMAT_VERSION
    extra: dict = field(default_factory=dict)

    @property
    def atom_count(self) -> int:
        return len(self.atoms.element_numbers)

    @property
    def bond_count(self) -> int:
        return len(self.bonds.orders) if self.bonds else 0


def atom_position(doc: CjsonDocument, n: int) -> tuple[float, float, float]:
    c = doc.atoms.coords3d
    return c[3 * n], c[3 * n + 1], c[3 * n + 2]


# -- reading ---------------------------------------------------------------


def _obj(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise SchemaViolation("expected an object", path)
    return value


def _split(d: dict, known: tuple[str, ...]) -> dict:
    return {k: v for k, v in d.items() if k not in known}


def _floats(value, path: str) -> tuple[float, ...]:
    if not isinstance(value, list):
        raise SchemaViolation("expected an array of numbers", path)
    if all(type(v) is float for v in value):
        return tuple(value)
    for i, v in enumerate(value):
        if not _jsonio.is_number(v):
            raise SchemaViolation(f"expected a number, got {v!r}", f"{path}[{i}]")
    return tuple(float(v) for v in value)


def _ints(value, path: str) -> tuple[int, ...]:
    if not isinstance(value, list):
        raise SchemaViolation("expected an array of integers", path)
    if not all(type(v) is int for v in value):
        bad = next(i for i, v in enumerate(value) if type(v) is not int)
        raise SchemaViolation(f"expected an integer, got {value[bad]!r}", f"{path}[{bad}]")
    return tuple(value)


def _read_atoms(raw) -> AtomArrays:
    atoms = _obj(raw, "atoms")
    coords = _obj(atoms.get("coords", {"3d": []}), "atoms.coords")
    elements = _obj(atoms.get("elements", {"number": []}), "atoms.elements")
    if "3d" not in coords:
        raise SchemaViolation("missing key '3d'", "atoms.coords")
    if "number" not in elements:
        raise SchemaViolation("missing key 'number'", "atoms.elements")
    return AtomArrays(
        coords3d=_floats(coords["3d"], "atoms.coords.3d"),
        element_numbers=_ints(elements["number"], "atoms.elements.number"),
        extra=_split(atoms, ("coords", "elements")),
        coords_extra=_split(coords, ("3d",)),
        elements_extra=_split(elements, ("number",)),
    )


def _read_bonds(raw) -> BondArrays:
    bonds = _obj(raw, "bonds")
    conn = _obj(bonds.get("connections", {"index": []}), "bonds.connections")
    if "index" not in conn:
        raise SchemaViolation("missing key 'index'", "bonds.connections")
    return BondArrays(
        connection_indices=_ints(conn["index"], "bonds.connections.index"),
        orders=_ints(bonds.get("order", []), "bonds.order"),
        extra=_split(bonds, ("connections", "order")),
        connections_extra=_split(conn, ("index",)),
    )


def _read_vibrations(raw) -> Vibrations:
    vib = _obj(raw, "vibrations")
    vectors = None
    if "eigenVectors" in vib:
        if not isinstance(vib["eigenVectors"], list):
            raise SchemaViolation("expected an array of arrays", "vibrations.eigenVectors")
        vectors = tuple(
            _floats(v, f"vibrations.eigenVectors[{i}]") for i, v in enumerate(vib["eigenVectors"])
        )
    return Vibrations(
        frequencies=_floats(vib.get("frequencies", []), "vibrations.frequencies"),
        intensities=_floats(vib["intensities"], "vibrations.intensities") if "intensities" in vib else None,
        eigen_vectors=vectors,
        extra=_split(vib, ("frequencies", "intensities", "eigenVectors")),
    )


def from_json(raw) -> CjsonDocument:
    """Build a document from already-decoded JSON; raises like :func:`parse_cjson`."""
    raw = _obj(raw, "")
    if VERSION_KEY not in raw:
        raise SchemaViolation(f"missing key {VERSION_KEY!r}", VERSION_KEY)
    version = raw[VERSION_KEY]
    if type(version) is not int:
        raise SchemaViolation("format version must be an integer", VERSION_KEY)
    if "atoms" not in raw:
        raise SchemaViolation("missing key 'atoms'", "atoms")
    name = raw.get("name")
    if name is not None and not isinstance(name, str):
        raise SchemaViolation("expected a string", "name")
    doc = CjsonDocument(
        atoms=_read_atoms(raw["atoms"]),
        bonds=_read_bonds(raw["bonds"]) if "bonds" in raw else None,
        name=name,
        vibrations=_read_vibrations(raw["vibrations"]) if "vibrations" in raw else None,
        version=version,
        extra=_split(raw, (VERSION_KEY, "atoms", "bonds", "name", "vibrations")),
    )
    problems = validate_cjson(doc)
    if problems:
        raise InvariantViolation(str(problems[0]), problems[0].path, problems)
    return doc


def parse_cjson(text: str | bytes) -> CjsonDocument:
    """Parse Chemical JSON text.

    Raises ``MalformedJson`` for unparseable text, ``SchemaViolation`` for
    missing blocks or wrongly typed values, and ``InvariantViolation`` (with
    the full violation list attached) when the arrays disagree in length or
    reference atoms that do not exist.
    """
    return from_json(_jsonio.loads(text))


# -- validation ------------------------------------------------------------


def validate_cjson(doc: CjsonDocument) -> list[Violation]:
    out: list[Violation] = []
    atoms = doc.atoms
    n = len(atoms.element_numbers)
    if len(atoms.coords3d) != 3 * n:
        out.append(Violation("atoms.coords.3d", "length-mismatch",
                             f"{len(atoms.coords3d)} values for {n} atoms, expected {3 * n}"))
    if n:
        lo, hi = min(atoms.element_numbers), max(atoms.element_numbers)
        if lo < 1 or hi > MAX_ATOMIC_NUMBER:
            bad = next(i for i, z in enumerate(atoms.element_numbers) if not 1 <= z <= MAX_ATOMIC_NUMBER)
            out.append(Violation(f"atoms.elements.number[{bad}]", "element-out-of-range",
                                 f"{atoms.element_numbers[bad]} not in 1..{MAX_ATOMIC_NUMBER}"))
    if not np.all(np.isfinite(np.asarray(atoms.coords3d, dtype=float))):
        out.append(Violation("atoms.coords.3d", "non-finite"))

    if doc.bonds is not None:
        out.extend(_validate_bonds(doc.bonds, n))
    if doc.vibrations is not None:
        out.extend(_validate_vibrations(doc.vibrations, n))
    return out


def _validate_bonds(bonds: BondArrays, n: int) -> list[Violation]:
    out = []
    idx, orders = bonds.connection_indices, bonds.orders
    if len(idx) != 2 * len(orders):
        out.append(Violation("bonds.order", "length-mismatch",
                             f"{len(idx)} indices need {len(idx) // 2} orders, got {len(orders)}"))
    if len(idx) % 2:
        out.append(Violation("bonds.connections.index", "odd-length"))
    for i, v in enumerate(idx):
        if not 0 <= v < n:
            out.append(Violation(f"bonds.connections.index[{i}]", "out-of-range",
                                 f"atom index {v} with {n} atoms"))
    seen = set()
    for k, (a, b) in enumerate(bonds.pairs):
        if a == b:
            out.append(Violation(f"bonds.connections.index[{2 * k}]", "self-bond"))
        key = (a, b) if a < b else (b, a)
        if key in seen:
            out.append(Violation(f"bonds.connections.index[{2 * k}]", "duplicate-bond", f"{key}"))
        seen.add(key)
    for i, o in enumerate(orders):
        if o < 1:
            out.append(Violation(f"bonds.order[{i}]", "order-below-one"))
    return out


def _validate_vibrations(vib: Vibrations, n: int) -> list[Violation]:
    out = []
    modes = len(vib.frequencies)
    if vib.intensities is not None and len(vib.intensities) != modes:
        out.append(Violation("vibrations.intensities", "mode-count-mismatch",
                             f"{len(vib.intensities)} intensities for {modes} modes"))
    if vib.eigen_vectors is not None:
        if len(vib.eigen_vectors) != modes:
            out.append(Violation("vibrations.eigenVectors", "mode-count-mismatch",
                                 f"{len(vib.eigen_vectors)} vectors for {modes} modes"))
        for i, v in enumerate(vib.eigen_vectors):
            if len(v) != 3 * n:
                out.append(Violation(f"vibrations.eigenVectors[{i}]", "length-not-3N",
                                     f"length {len(v)}, expected {3 * n}"))
    return out


# -- writing ---------------------------------------------------------------


def to_json(doc: CjsonDocument) -> dict:
    out: dict = {VERSION_KEY: doc.version}
    a = doc.atoms
    out["atoms"] = {
        "coords": {"3d": list(a.coords3d), **a.coords_extra},
        "elements": {"number": list(a.element_numbers), **a.elements_extra},
        **a.extra,
    }
    if doc.bonds is not None:
        b = doc.bonds
        out["bonds"] = {
            "connections": {"index": list(b.connection_indices), **b.connections_extra},
            "order": list(b.orders),
            **b.extra,
        }
    if doc.name is not None:
        out["name"] = doc.name
    if doc.vibrations is not None:
        v = doc.vibrations
        block: dict = {"frequencies": list(v.frequencies)}
        if v.intensities is not None:
            block["intensities"] = list(v.intensities)
        if v.eigen_vectors is not None:
            block["eigenVectors"] = [list(e) for e in v.eigen_vectors]
        block.update(v.extra)
        out["vibrations"] = block
    out.update(doc.extra)
    return out


def serialize_cjson(doc: CjsonDocument) -> str:
    problems = validate_cjson(doc)
    if problems:
        raise InvariantViolation(str(problems[0]), problems[0].path, problems)
    return _jsonio.dumps(to_json(doc))


# -- vibrations ------------------------------------------------------------


def displaced_coordinates(doc: CjsonDocument, mode_index: int, scale: float) -> list[float]:
    """Coordinates pushed ``scale`` units along normal mode ``mode_index``."""
    vib = doc.vibrations
    if vib is None or not vib.eigen_vectors:
        raise NoVibrations("document carries no vibrational eigenvectors")
    if not 0 <= mode_index < len(vib.eigen_vectors):
        raise ModeOutOfRange(f"mode {mode_index} not in 0..{len(vib.eigen_vectors) - 1}")
    coords = np.asarray(doc.atoms.coords3d, dtype=float)
    disp = np.asarray(vib.eigen_vectors[mode_index], dtype=float)
    return (coords + scale * disp).tolist()
