"""Object-oriented ExtendedChem JSON.

Every entity is an object with a string ``id``. Later objects point back at
earlier ones by quoting that id (``"molecule": "Molecule.2"``); a reference
resolves to the first object defining the id in document order. All numeric
data is wrapped in a ``Quantity`` carrying an explicit ``units`` label.

The top-level envelope is ``{"molecules": [...], "calculations": [...]}``.
Two fragment shapes are also accepted on input and normalised into the
envelope: ``{"molecule": {...}}`` and a bare calculation object.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union

from . import _jsonio
from .elements import by_number
from .errors import (
    DanglingReference,
    DuplicateId,
    InvariantViolation,
    SchemaViolation,
    UnknownElement,
    Violation,
)
from .units import check_units, conversion_factor


@dataclass(frozen=True)
class Quantity:
    value: float | tuple[float, ...]
    units: str

    @property
    def is_vector(self) -> bool:
        return isinstance(self.value, tuple)


@dataclass(frozen=True)
class AtomObject:
    id: str
    element_symbol: str
    element_number: int
    cartesian_coordinates: Quantity
    element_label: str | None = None
    element_name: str | None = None
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Molecule:
    id: str
    atoms: tuple[AtomObject, ...] = ()
    extra: dict = field(default_factory=dict)

    @property
    def element_numbers(self) -> list[int]:
        return [a.element_number for a in self.atoms]


@dataclass(frozen=True)
class CalculationSetup:
    id: str
    molecule: str
    charge: int
    multiplicity: int
    number_of_electrons: int
    wave_function_type: str | None = None
    wave_function_theory: str | None = None
    # id reference, or an inline opaque object carrying its own "id"
    basis_set: str | dict | None = None
    input_vectors: str | None = None
    output_vectors: str | None = None
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class PropertyRecord:
    """One entry of ``molecularProperties``.

    ``properties`` maps a property name either to a ``Quantity`` (atom-scoped
    values such as ``diamagneticShielding``) or to a dict of named
    ``Quantity`` components (``dipoleMoment``, ``quadrupoleMoment``).
    """

    molecule: str | None = None
    atom: str | None = None
    properties: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CalculationResults:
    molecular_properties: tuple[PropertyRecord, ...] = ()
    vibrational_frequencies: tuple[Quantity, ...] = ()
    total_energy: Quantity | None = None
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Calculation:
    calculation_type: str
    id: str
    calculation_setup: Union[CalculationSetup, str]
    molecular_formula: str | None = None
    calculation_results: CalculationResults | None = None
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ExtChemDocument:
    molecules: tuple[Molecule, ...] = ()
    calculations: tuple[Calculation, ...] = ()
    extra: dict = field(default_factory=dict)


# -- reading ---------------------------------------------------------------


def _obj(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise SchemaViolation("expected an object", path)
    return value


def _arr(value, path: str) -> list:
    if not isinstance(value, list):
        raise SchemaViolation("expected an array", path)
    return value


def _req(d: dict, key: str, path: str):
    if key not in d:
        raise SchemaViolation(f"missing key {key!r}", path)
    return d[key]


def _text(value, path: str, optional: bool = False) -> str | None:
    if value is None and optional:
        return None
    if not isinstance(value, str):
        raise SchemaViolation(f"expected a string, got {value!r}", path)
    return value


def _id(d: dict, path: str) -> str:
    value = _text(_req(d, "id", path), f"{path}.id")
    if not value:
        raise SchemaViolation("id must be non-empty", f"{path}.id")
    return value


def _int(value, path: str) -> int:
    if type(value) is not int:
        raise SchemaViolation(f"expected an integer, got {value!r}", path)
    return value


def _rest(d: dict, known: tuple[str, ...]) -> dict:
    return {k: v for k, v in d.items() if k not in known}


def is_quantity(value) -> bool:
    return isinstance(value, dict) and "value" in value and "units" in value


def _number(v, path: str) -> float:
    if not _jsonio.is_finite_number(v):
        raise SchemaViolation(f"expected a finite number, got {v!r}", path)
    return float(v)


def read_quantity(raw, path: str) -> Quantity:
    q = _obj(raw, path)
    if not is_quantity(q):
        raise SchemaViolation("quantity needs 'value' and 'units'", path)
    unexpected = set(q) - {"value", "units"}
    if unexpected:
        raise SchemaViolation(f"unexpected quantity keys {sorted(unexpected)}", path)
    units = check_units(_text(q["units"], f"{path}.units"), f"{path}.units")
    value = q["value"]
    if isinstance(value, list):
        value = tuple(_number(v, f"{path}.value[{i}]") for i, v in enumerate(value))
    else:
        value = _number(value, f"{path}.value")
    return Quantity(value, units)


_ATOM_KEYS = ("id", "elementLabel", "elementSymbol", "elementNumber", "elementName", "cartesianCoordinates")


def _read_atom(raw, path: str) -> AtomObject:
    a = _obj(raw, path)
    number = _int(_req(a, "elementNumber", path), f"{path}.elementNumber")
    symbol = _text(_req(a, "elementSymbol", path), f"{path}.elementSymbol")
    coords = read_quantity(_req(a, "cartesianCoordinates", path), f"{path}.cartesianCoordinates")
    atom = AtomObject(
        id=_id(a, path),
        element_symbol=symbol,
        element_number=number,
        cartesian_coordinates=coords,
        element_label=_text(a.get("elementLabel"), f"{path}.elementLabel", optional=True),
        element_name=_text(a.get("elementName"), f"{path}.elementName", optional=True),
        extra=_rest(a, _ATOM_KEYS),
    )
    problems = _atom_violations(atom, path)
    if problems:
        raise SchemaViolation(problems[0].message, problems[0].path, problems)
    return atom


def _read_molecule(raw, path: str) -> Molecule:
    m = _obj(raw, path)
    atoms = _arr(m.get("atoms", []), f"{path}.atoms")
    return Molecule(
        id=_id(m, path),
        atoms=tuple(_read_atom(a, f"{path}.atoms[{i}]") for i, a in enumerate(atoms)),
        extra=_rest(m, ("id", "atoms")),
    )


_SETUP_KEYS = {
    "id": "id",
    "molecule": "molecule",
    "charge": "charge",
    "molecularSpinMultiplicity": "multiplicity",
    "numberOfElectrons": "number_of_electrons",
    "waveFunctionType": "wave_function_type",
    "waveFunctionTheory": "wave_function_theory",
    "basisSet": "basis_set",
    "inputVectors": "input_vectors",
    "outputVectors": "output_vectors",
}


def _read_setup(raw, path: str) -> CalculationSetup | str:
    if isinstance(raw, str):
        return raw
    s = _obj(raw, path)
    basis = s.get("basisSet")
    if isinstance(basis, dict):
        _id(basis, f"{path}.basisSet")
    elif basis is not None and not isinstance(basis, str):
        raise SchemaViolation("expected an id string or an object", f"{path}.basisSet")
    multiplicity = _int(_req(s, "molecularSpinMultiplicity", path), f"{path}.molecularSpinMultiplicity")
    if multiplicity < 1:
        raise SchemaViolation("spin multiplicity must be >= 1", f"{path}.molecularSpinMultiplicity")
    electrons = _int(_req(s, "numberOfElectrons", path), f"{path}.numberOfElectrons")
    if electrons < 0:
        raise SchemaViolation("electron count must be >= 0", f"{path}.numberOfElectrons")
    return CalculationSetup(
        id=_id(s, path),
        molecule=_text(_req(s, "molecule", path), f"{path}.molecule"),
        charge=_int(_req(s, "charge", path), f"{path}.charge"),
        multiplicity=multiplicity,
        number_of_electrons=electrons,
        wave_function_type=_text(s.get("waveFunctionType"), f"{path}.waveFunctionType", optional=True),
        wave_function_theory=_text(s.get("waveFunctionTheory"), f"{path}.waveFunctionTheory", optional=True),
        basis_set=basis,
        input_vectors=_text(s.get("inputVectors"), f"{path}.inputVectors", optional=True),
        output_vectors=_text(s.get("outputVectors"), f"{path}.outputVectors", optional=True),
        extra=_rest(s, tuple(_SETUP_KEYS)),
    )


def _read_property(raw, path: str) -> PropertyRecord:
    p = _obj(raw, path)
    molecule = p.get("Molecule", p.get("molecule"))
    atom = p.get("atom")
    props, extra = {}, {}
    for key, value in p.items():
        if key in ("Molecule", "molecule", "atom"):
            continue
        sub = f"{path}.{key}"
        if is_quantity(value):
            props[key] = read_quantity(value, sub)
        elif isinstance(value, dict):
            props[key] = {name: read_quantity(q, f"{sub}.{name}") for name, q in value.items()}
        elif _jsonio.is_number(value):
            raise SchemaViolation("numeric value without units", sub)
        else:
            extra[key] = value
    return PropertyRecord(
        molecule=_text(molecule, f"{path}.Molecule", optional=True),
        atom=_text(atom, f"{path}.atom", optional=True),
        properties=props,
        extra=extra,
    )


def _read_results(raw, path: str) -> CalculationResults:
    r = _obj(raw, path)
    props = _arr(r.get("molecularProperties", []), f"{path}.molecularProperties")
    freqs = _arr(r.get("vibrationalFrequencies", []), f"{path}.vibrationalFrequencies")
    energy = r.get("totalEnergy")
    return CalculationResults(
        molecular_properties=tuple(
            _read_property(p, f"{path}.molecularProperties[{i}]") for i, p in enumerate(props)
        ),
        vibrational_frequencies=tuple(
            read_quantity(q, f"{path}.vibrationalFrequencies[{i}]") for i, q in enumerate(freqs)
        ),
        total_energy=read_quantity(energy, f"{path}.totalEnergy") if energy is not None else None,
        extra=_rest(r, ("molecularProperties", "vibrationalFrequencies", "totalEnergy")),
    )


_CALC_KEYS = ("calculationType", "molecularFormula", "id", "calculationSetup", "calculationResults")


def _read_calculation(raw, path: str) -> Calculation:
    c = _obj(raw, path)
    results = c.get("calculationResults")
    return Calculation(
        calculation_type=_text(_req(c, "calculationType", path), f"{path}.calculationType"),
        id=_id(c, path),
        calculation_setup=_read_setup(_req(c, "calculationSetup", path), f"{path}.calculationSetup"),
        molecular_formula=_text(c.get("molecularFormula"), f"{path}.molecularFormula", optional=True),
        calculation_results=_read_results(results, f"{path}.calculationResults") if results is not None else None,
        extra=_rest(c, _CALC_KEYS),
    )


def from_json(raw) -> ExtChemDocument:
    raw = _obj(raw, "")
    if "calculationSetup" in raw:
        return ExtChemDocument(calculations=(_read_calculation(raw, "calculation"),))
    if "molecule" in raw and "molecules" not in raw:
        return ExtChemDocument(
            molecules=(_read_molecule(raw["molecule"], "molecule"),),
            extra=_rest(raw, ("molecule",)),
        )
    molecules = _arr(raw.get("molecules", []), "molecules")
    calculations = _arr(raw.get("calculations", []), "calculations")
    return ExtChemDocument(
        molecules=tuple(_read_molecule(m, f"molecules[{i}]") for i, m in enumerate(molecules)),
        calculations=tuple(_read_calculation(c, f"calculations[{i}]") for i, c in enumerate(calculations)),
        extra=_rest(raw, ("molecules", "calculations")),
    )


def parse_extchem(text: str | bytes) -> ExtChemDocument:
    """Parse ExtendedChem JSON text into typed objects.

    References are left as id strings; use :func:`build_id_index` and
    :func:`validate_references` to check them.
    """
    return from_json(_jsonio.loads(text))


# -- writing ---------------------------------------------------------------


def quantity_json(q: Quantity) -> dict:
    return {"value": list(q.value) if q.is_vector else q.value, "units": q.units}


def _atom_json(a: AtomObject) -> dict:
    out: dict = {"id": a.id}
    if a.element_label is not None:
        out["elementLabel"] = a.element_label
    out["elementSymbol"] = a.element_symbol
    out["elementNumber"] = a.element_number
    if a.element_name is not None:
        out["elementName"] = a.element_name
    out["cartesianCoordinates"] = quantity_json(a.cartesian_coordinates)
    out.update(a.extra)
    return out


def molecule_json(m: Molecule) -> dict:
    return {"id": m.id, "atoms": [_atom_json(a) for a in m.atoms], **m.extra}


def _setup_json(s: CalculationSetup | str):
    if isinstance(s, str):
        return s
    out: dict = {}
    for key, attr in _SETUP_KEYS.items():
        value = getattr(s, attr)
        if value is not None:
            out[key] = value
    out.update(s.extra)
    return out


def _property_json(p: PropertyRecord) -> dict:
    out: dict = {}
    if p.molecule is not None:
        out["Molecule"] = p.molecule
    if p.atom is not None:
        out["atom"] = p.atom
    for key, value in p.properties.items():
        if isinstance(value, Quantity):
            out[key] = quantity_json(value)
        else:
            out[key] = {name: quantity_json(q) for name, q in value.items()}
    out.update(p.extra)
    return out


def _results_json(r: CalculationResults) -> dict:
    out: dict = {}
    if r.molecular_properties:
        out["molecularProperties"] = [_property_json(p) for p in r.molecular_properties]
    if r.vibrational_frequencies:
        out["vibrationalFrequencies"] = [quantity_json(q) for q in r.vibrational_frequencies]
    if r.total_energy is not None:
        out["totalEnergy"] = quantity_json(r.total_energy)
    out.update(r.extra)
    return out


def calculation_json(c: Calculation) -> dict:
    out: dict = {"calculationType": c.calculation_type}
    if c.molecular_formula is not None:
        out["molecularFormula"] = c.molecular_formula
    out["id"] = c.id
    out["calculationSetup"] = _setup_json(c.calculation_setup)
    if c.calculation_results is not None:
        out["calculationResults"] = _results_json(c.calculation_results)
    out.update(c.extra)
    return out


def to_json(doc: ExtChemDocument) -> dict:
    return {
        "molecules": [molecule_json(m) for m in doc.molecules],
        "calculations": [calculation_json(c) for c in doc.calculations],
        **doc.extra,
    }


def serialize_extchem(doc: ExtChemDocument) -> str:
    problems = local_violations(doc)
    if problems:
        raise InvariantViolation(str(problems[0]), problems[0].path, problems)
    return _jsonio.dumps(to_json(doc))


# -- local (reference-free) checks -----------------------------------------


def _label_matches(label: str, symbol: str) -> bool:
    head = ""
    for ch in label:
        if not ch.isalpha():
            break
        head += ch
    return head.lower() == symbol.lower()


def _atom_violations(a: AtomObject, path: str) -> list[Violation]:
    out = []
    try:
        element = by_number(a.element_number)
    except UnknownElement as exc:
        return [Violation(f"{path}.elementNumber", "unknown-element", str(exc))]
    if a.element_symbol != element.symbol:
        out.append(Violation(f"{path}.elementSymbol", "symbol-number-mismatch",
                             f"symbol {a.element_symbol!r} but element number {a.element_number} is {element.symbol}"))
    if a.element_label is not None and not _label_matches(a.element_label, a.element_symbol):
        out.append(Violation(f"{path}.elementLabel", "label-symbol-mismatch",
                             f"label {a.element_label!r} vs symbol {a.element_symbol!r}"))
    coords = a.cartesian_coordinates
    if not coords.is_vector or len(coords.value) != 3:
        out.append(Violation(f"{path}.cartesianCoordinates.value", "not-a-3-vector"))
    return out


def _quantity_violations(q: Quantity, path: str) -> list[Violation]:
    out = []
    try:
        check_units(q.units)
    except Exception as exc:
        out.append(Violation(f"{path}.units", "unit-unknown", str(exc)))
    values = q.value if q.is_vector else (q.value,)
    if not all(_jsonio.is_finite_number(v) for v in values):
        out.append(Violation(f"{path}.value", "non-finite"))
    return out


def _quantities(doc: ExtChemDocument) -> Iterator[tuple[Quantity, str]]:
    for i, m in enumerate(doc.molecules):
        for j, a in enumerate(m.atoms):
            yield a.cartesian_coordinates, f"molecules[{i}].atoms[{j}].cartesianCoordinates"
    for i, c in enumerate(doc.calculations):
        r = c.calculation_results
        if r is None:
            continue
        base = f"calculations[{i}].calculationResults"
        for k, p in enumerate(r.molecular_properties):
            for key, value in p.properties.items():
                if isinstance(value, Quantity):
                    yield value, f"{base}.molecularProperties[{k}].{key}"
                else:
                    for name, q in value.items():
                        yield q, f"{base}.molecularProperties[{k}].{key}.{name}"
        for k, q in enumerate(r.vibrational_frequencies):
            yield q, f"{base}.vibrationalFrequencies[{k}]"
        if r.total_energy is not None:
            yield r.total_energy, f"{base}.totalEnergy"


def local_violations(doc: ExtChemDocument) -> list[Violation]:
    """Checks that need no reference resolution: atoms, units, finiteness."""
    out = []
    for i, m in enumerate(doc.molecules):
        if not m.id:
            out.append(Violation(f"molecules[{i}].id", "empty-id"))
        for j, a in enumerate(m.atoms):
            out.extend(_atom_violations(a, f"molecules[{i}].atoms[{j}]"))
    for q, path in _quantities(doc):
        out.extend(_quantity_violations(q, path))
    return out


# -- ids and references ----------------------------------------------------


@dataclass(frozen=True)
class IdEntry:
    path: str
    obj: object
    ordinal: int


@dataclass(frozen=True)
class RefSite:
    path: str
    target: str
    kind: type | None
    ordinal: int


class IdIndex(dict):
    """``id -> IdEntry`` for the first definition of each id, in document order."""


def _generic_defs(value, path: str, emit) -> None:
    if isinstance(value, dict):
        if isinstance(value.get("id"), str):
            emit(path, value["id"], value)
        for k, v in value.items():
            _generic_defs(v, f"{path}.{k}", emit)
    elif isinstance(value, list):
        for i, v in enumerate(value):
            _generic_defs(v, f"{path}[{i}]", emit)


def _walk(doc: ExtChemDocument):
    """Definitions and references in document (serialization) order."""
    defs: list[tuple[str, str, object, int]] = []
    refs: list[RefSite] = []
    counter = iter(range(1 << 62))

    def define(path, ident, obj):
        defs.append((path, ident, obj, next(counter)))

    def refer(path, target, kind):
        refs.append(RefSite(path, target, kind, next(counter)))

    for i, m in enumerate(doc.molecules):
        mp = f"molecules[{i}]"
        define(mp, m.id, m)
        for j, a in enumerate(m.atoms):
            define(f"{mp}.atoms[{j}]", a.id, a)
            _generic_defs(a.extra, f"{mp}.atoms[{j}]", define)
        _generic_defs(m.extra, mp, define)

    for i, c in enumerate(doc.calculations):
        cp = f"calculations[{i}]"
        define(cp, c.id, c)
        s = c.calculation_setup
        sp = f"{cp}.calculationSetup"
        if isinstance(s, str):
            refer(sp, s, CalculationSetup)
        else:
            define(sp, s.id, s)
            refer(f"{sp}.molecule", s.molecule, Molecule)
            if isinstance(s.basis_set, str):
                refer(f"{sp}.basisSet", s.basis_set, None)
            elif isinstance(s.basis_set, dict):
                _generic_defs(s.basis_set, f"{sp}.basisSet", define)
            _generic_defs(s.extra, sp, define)
        r = c.calculation_results
        if r is not None:
            for k, p in enumerate(r.molecular_properties):
                pp = f"{cp}.calculationResults.molecularProperties[{k}]"
                if p.molecule is not None:
                    refer(f"{pp}.Molecule", p.molecule, Molecule)
                if p.atom is not None:
                    refer(f"{pp}.atom", p.atom, AtomObject)
                _generic_defs(p.extra, pp, define)
            _generic_defs(r.extra, f"{cp}.calculationResults", define)
        _generic_defs(c.extra, cp, define)
    _generic_defs(doc.extra, "", define)
    return defs, refs


def _index(doc: ExtChemDocument) -> tuple[IdIndex, list[Violation], list[RefSite]]:
    defs, refs = _walk(doc)
    index = IdIndex()
    duplicates = []
    for path, ident, obj, ordinal in defs:
        if ident in index:
            duplicates.append(Violation(f"{path}.id", "duplicate-id",
                                        f"{ident!r} already defined at {index[ident].path}"))
        else:
            index[ident] = IdEntry(path, obj, ordinal)
    return index, duplicates, refs


def build_id_index(doc: ExtChemDocument) -> IdIndex:
    """Map every id to its first definition; a second definition is an error."""
    index, duplicates, _ = _index(doc)
    if duplicates:
        raise DuplicateId(duplicates[0].message, duplicates[0].path, duplicates)
    return index


def resolve_reference(index: IdIndex, ref: str):
    try:
        return index[ref].obj
    except KeyError:
        raise DanglingReference(f"no object with id {ref!r}") from None


def _reference_violations(index: IdIndex, refs: list[RefSite]) -> list[Violation]:
    out = []
    for site in refs:
        entry = index.get(site.target)
        if entry is None:
            out.append(Violation(site.path, "dangling-reference", f"{site.target!r} is never defined"))
        elif entry.ordinal > site.ordinal:
            out.append(Violation(site.path, "forward-reference",
                                 f"{site.target!r} is first defined later, at {entry.path}"))
        elif site.kind is not None and not isinstance(entry.obj, site.kind):
            out.append(Violation(site.path, "wrong-target-kind",
                                 f"{site.target!r} is not a {site.kind.__name__}"))
    return out


def validate_references(doc: ExtChemDocument) -> list[Violation]:
    """Every reference that does not resolve to an earlier definition."""
    index, _, refs = _index(doc)
    return _reference_violations(index, refs)


def _setup_of(c: Calculation, index: IdIndex) -> CalculationSetup | None:
    s = c.calculation_setup
    if isinstance(s, str):
        entry = index.get(s)
        return entry.obj if entry and isinstance(entry.obj, CalculationSetup) else None
    return s


def validate_extchem(doc: ExtChemDocument) -> list[Violation]:
    """Full check: local invariants, duplicate ids, references, electron counts."""
    index, duplicates, refs = _index(doc)
    out = local_violations(doc) + duplicates + _reference_violations(index, refs)
    for i, c in enumerate(doc.calculations):
        setup = _setup_of(c, index)
        if setup is None:
            continue
        entry = index.get(setup.molecule)
        if entry is None or not isinstance(entry.obj, Molecule):
            continue
        expected = sum(entry.obj.element_numbers) - setup.charge
        if setup.number_of_electrons != expected:
            out.append(Violation(f"calculations[{i}].calculationSetup.numberOfElectrons", "electron-count",
                                 f"{setup.number_of_electrons} != {expected} (sum of Z minus charge)"))
    return out


# -- units -----------------------------------------------------------------


def convert_quantity(q: Quantity, target_units: str) -> Quantity:
    factor = conversion_factor(q.units, target_units)
    if q.units == target_units:
        return q
    if q.is_vector:
        return Quantity(tuple(v * factor for v in q.value), target_units)
    return Quantity(q.value * factor, target_units)


def first_dipole_total(doc: ExtChemDocument) -> float | None:
    """Total dipole moment from the first dipole record, in atomic units."""
    for c in doc.calculations:
        r = c.calculation_results
        if r is None:
            continue
        for p in r.molecular_properties:
            dipole = p.properties.get("dipoleMoment")
            if isinstance(dipole, dict) and "totalMoment" in dipole:
                return dipole["totalMoment"].value
    return None
