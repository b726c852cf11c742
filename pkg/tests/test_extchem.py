import dataclasses
import json

import pytest
from hypothesis import given, settings, strategies as st

from chemjson.errors import (
    DanglingReference,
    DuplicateId,
    IncompatibleUnits,
    InvariantViolation,
    MalformedJson,
    SchemaViolation,
    UnitUnknown,
)
from chemjson.extchem import (
    AtomObject,
    CalculationSetup,
    ExtChemDocument,
    Molecule,
    Quantity,
    build_id_index,
    convert_quantity,
    parse_extchem,
    resolve_reference,
    serialize_extchem,
    validate_extchem,
    validate_references,
)
from chemjson.units import BOHR_TO_ANGSTROM

from strategies import extchem_documents


def test_water_molecule_fragment(doc_text):
    doc = parse_extchem(doc_text("water_molecule.json"))
    assert len(doc.molecules) == 1 and doc.calculations == ()
    mol = doc.molecules[0]
    assert mol.id == "Molecule.1"
    assert [a.id for a in mol.atoms] == ["Atom.1.Mol.1", "Atom.2.Mol.1", "Atom.3.Mol.1"]
    oxygen = mol.atoms[0]
    assert (oxygen.element_label, oxygen.element_symbol, oxygen.element_number, oxygen.element_name) == \
        ("o", "O", 8, "Oxygen")
    assert oxygen.cartesian_coordinates == Quantity((0.0, 0.0, 0.2106360400000002), "bohr")
    assert mol.atoms[1].cartesian_coordinates.value == (-1.841188380000002, 0.0, -0.8425441600000008)


def test_bare_calculation4(doc_text):
    doc = parse_extchem(doc_text("water_calculation4.json"))
    (calc,) = doc.calculations
    assert calc.id == "calculation.4"
    assert calc.calculation_type == "molecularProperties"
    assert calc.molecular_formula == "H2O"
    setup = calc.calculation_setup
    assert (setup.charge, setup.multiplicity, setup.number_of_electrons) == (0, 1, 10)
    assert (setup.molecule, setup.basis_set, setup.id) == ("Molecule.2", "BasisSet.1", "calculationSetup.4")
    assert (setup.wave_function_type, setup.wave_function_theory) == ("RHF", "Hartree-Fock")
    props = calc.calculation_results.molecular_properties
    assert props[0].molecule == "Molecule.2"
    assert props[0].properties["dipoleMoment"]["totalMoment"] == Quantity(0.8052087008, "atomic units")
    assert props[0].properties["quadrupoleMoment"]["diamagneticSusceptibility"].value == 18.596483
    assert props[0].properties["quadrupoleMoment"]["momentXZ"].value == 0.0
    assert props[1].atom == "Atom.1.Mol.2"
    assert props[1].properties["diamagneticShielding"] == Quantity(23.457292, "atomic units")


def _atom_json(**overrides):
    atom = {"id": "Atom.1.Mol.1", "elementLabel": "o", "elementSymbol": "O", "elementNumber": 8,
            "elementName": "Oxygen", "cartesianCoordinates": {"value": [0, 0, 0], "units": "bohr"}}
    atom.update(overrides)
    return json.dumps({"molecules": [{"id": "Molecule.1", "atoms": [atom]}]})


@pytest.mark.parametrize("overrides, exc, rule_path", [
    ({"elementSymbol": "H"}, SchemaViolation, "molecules[0].atoms[0].elementSymbol"),
    ({"elementLabel": "n"}, SchemaViolation, "molecules[0].atoms[0].elementLabel"),
    ({"elementNumber": 0}, SchemaViolation, "molecules[0].atoms[0].elementNumber"),
    ({"cartesianCoordinates": {"value": [0, 0], "units": "bohr"}}, SchemaViolation,
     "molecules[0].atoms[0].cartesianCoordinates.value"),
    ({"cartesianCoordinates": {"value": [0, 0, 0], "units": "furlong"}}, UnitUnknown,
     "molecules[0].atoms[0].cartesianCoordinates.units"),
    ({"cartesianCoordinates": [0, 0, 0]}, SchemaViolation, "molecules[0].atoms[0].cartesianCoordinates"),
])
def test_atom_schema_errors(overrides, exc, rule_path):
    with pytest.raises(exc) as err:
        parse_extchem(_atom_json(**overrides))
    assert err.value.path == rule_path


def test_label_with_suffix_is_consistent():
    doc = parse_extchem(_atom_json(elementLabel="O1"))
    assert doc.molecules[0].atoms[0].element_label == "O1"


def test_malformed_text():
    with pytest.raises(MalformedJson):
        parse_extchem('{"molecules": [}')


def test_setup_missing_molecule_is_schema_error(doc_text):
    raw = json.loads(doc_text("water_calculation4.json"))
    del raw["calculationSetup"]["molecule"]
    with pytest.raises(SchemaViolation) as err:
        parse_extchem(json.dumps(raw))
    assert err.value.path == "calculation.calculationSetup"


def test_unitless_number_in_results_rejected(doc_text):
    raw = json.loads(doc_text("water_calculation4.json"))
    raw["calculationResults"]["molecularProperties"][1]["diamagneticShielding"] = 23.4
    with pytest.raises(SchemaViolation):
        parse_extchem(json.dumps(raw))


# -- serialization ---------------------------------------------------------


def test_empty_document_envelope():
    assert json.loads(serialize_extchem(ExtChemDocument())) == {"molecules": [], "calculations": []}


def test_water_molecule_round_trip(doc_text):
    doc = parse_extchem(doc_text("water_molecule.json"))
    text = serialize_extchem(doc)
    assert parse_extchem(text) == doc
    assert serialize_extchem(parse_extchem(text)) == text


def test_type_key_order(doc_text):
    out = json.loads(serialize_extchem(parse_extchem(doc_text("water_full.json"))))
    assert list(out["molecules"][0]["atoms"][0]) == [
        "id", "elementLabel", "elementSymbol", "elementNumber", "elementName", "cartesianCoordinates"]
    calc = out["calculations"][1]
    assert list(calc) == ["calculationType", "molecularFormula", "id", "calculationSetup", "calculationResults"]
    assert list(calc["calculationSetup"]) == [
        "id", "molecule", "charge", "molecularSpinMultiplicity", "numberOfElectrons", "waveFunctionType",
        "waveFunctionTheory", "basisSet", "inputVectors", "outputVectors"]


def test_unknown_keys_preserved(doc_text):
    raw = json.loads(doc_text("water_full.json"))
    raw["simulationEnvironment"] = {"programRun": "NWChem"}
    raw["molecules"][0]["charge"] = 0
    raw["calculations"][1]["calculationSetup"]["exchangeCorrelationFunctional"] = [{"xcName": "B3LYP"}]
    out = json.loads(serialize_extchem(parse_extchem(json.dumps(raw))))
    assert out["simulationEnvironment"] == {"programRun": "NWChem"}
    assert out["molecules"][0]["charge"] == 0
    assert out["calculations"][1]["calculationSetup"]["exchangeCorrelationFunctional"] == [{"xcName": "B3LYP"}]


def test_serialize_rejects_non_finite():
    atom = AtomObject("A.1", "H", 1, Quantity((float("nan"), 0.0, 0.0), "bohr"))
    with pytest.raises(InvariantViolation):
        serialize_extchem(ExtChemDocument(molecules=(Molecule("M.1", (atom,)),)))


@settings(max_examples=200, deadline=None)
@given(extchem_documents())
def test_round_trip_property(doc):
    text = serialize_extchem(doc)
    back = parse_extchem(text)
    assert back == doc
    assert serialize_extchem(back) == text


# -- ids -------------------------------------------------------------------


def test_index_of_water_molecule(doc_text):
    index = build_id_index(parse_extchem(doc_text("water_molecule.json")))
    assert list(index) == ["Molecule.1", "Atom.1.Mol.1", "Atom.2.Mol.1", "Atom.3.Mol.1"]
    assert index["Atom.2.Mol.1"].path == "molecules[0].atoms[1]"


def test_empty_index():
    assert build_id_index(ExtChemDocument()) == {}


def test_duplicate_molecule_id(doc_text):
    raw = json.loads(doc_text("water_molecule.json"))
    twice = {"molecules": [raw["molecule"], raw["molecule"]]}
    with pytest.raises(DuplicateId):
        build_id_index(parse_extchem(json.dumps(twice)))
    problems = validate_extchem(parse_extchem(json.dumps(twice)))
    assert "duplicate-id" in {p.rule for p in problems}


def test_resolve_shielding_atom(doc_text):
    doc = parse_extchem(doc_text("water_full.json"))
    index = build_id_index(doc)
    atom = resolve_reference(index, "Atom.1.Mol.2")
    assert atom is doc.molecules[1].atoms[0]
    assert resolve_reference(index, "Molecule.2") is doc.molecules[1]
    assert resolve_reference(index, "BasisSet.1") == {"id": "BasisSet.1", "basisSetName": "6-31G*"}


def test_resolve_every_id_to_itself(doc_text):
    doc = parse_extchem(doc_text("water_full.json"))
    index = build_id_index(doc)
    for ident, entry in index.items():
        assert resolve_reference(index, ident) is entry.obj


def test_dangling(doc_text):
    index = build_id_index(parse_extchem(doc_text("water_full.json")))
    with pytest.raises(DanglingReference):
        resolve_reference(index, "BasisSet.99")


def test_full_water_example_is_linked(doc_text):
    doc = parse_extchem(doc_text("water_full.json"))
    assert validate_references(doc) == []
    assert validate_extchem(doc) == []


def test_setup_reference_to_undefined_molecule(doc_text):
    raw = json.loads(doc_text("water_full.json"))
    raw["molecules"] = raw["molecules"][:1]
    raw["calculations"] = raw["calculations"][1:]
    raw["calculations"][0]["calculationSetup"]["basisSet"] = {"id": "BasisSet.1"}
    raw["calculations"][0]["calculationResults"]["molecularProperties"][0]["Molecule"] = "Molecule.1"
    raw["calculations"][0]["calculationResults"]["molecularProperties"][1]["atom"] = "Atom.1.Mol.1"
    problems = validate_references(parse_extchem(json.dumps(raw)))
    assert [(p.path, p.rule) for p in problems] == [
        ("calculations[0].calculationSetup.molecule", "dangling-reference")]


def test_forward_reference_flagged():
    raw = {
        "molecules": [],
        "calculations": [
            {"calculationType": "e", "id": "c.1", "calculationSetup": "calculationSetup.2"},
            {"calculationType": "e", "id": "c.2", "calculationSetup": {
                "id": "calculationSetup.2", "molecule": "M", "charge": 0,
                "molecularSpinMultiplicity": 1, "numberOfElectrons": 0}},
        ],
    }
    rules = [p.rule for p in validate_references(parse_extchem(json.dumps(raw)))]
    assert rules == ["forward-reference", "dangling-reference"]


def test_setup_shared_by_reference(doc_text):
    raw = json.loads(doc_text("water_full.json"))
    extra = dict(raw["calculations"][1], id="calculation.5", calculationSetup="calculationSetup.4")
    raw["calculations"].append(extra)
    doc = parse_extchem(json.dumps(raw))
    assert doc.calculations[2].calculation_setup == "calculationSetup.4"
    assert validate_extchem(doc) == []


def test_reference_to_wrong_kind(doc_text):
    raw = json.loads(doc_text("water_full.json"))
    raw["calculations"][1]["calculationResults"]["molecularProperties"][1]["atom"] = "Molecule.2"
    problems = validate_references(parse_extchem(json.dumps(raw)))
    assert [p.rule for p in problems] == ["wrong-target-kind"]


def test_electron_count_consistency(doc_text):
    raw = json.loads(doc_text("water_full.json"))
    raw["calculations"][1]["calculationSetup"]["numberOfElectrons"] = 9
    problems = validate_extchem(parse_extchem(json.dumps(raw)))
    assert [(p.path, p.rule) for p in problems] == [
        ("calculations[1].calculationSetup.numberOfElectrons", "electron-count")]


def _ref_sites(raw):
    """(container, key) for every reference field in a JSON document."""
    sites = []
    for calc in raw["calculations"]:
        setup = calc["calculationSetup"]
        if isinstance(setup, str):
            sites.append((calc, "calculationSetup"))
            continue
        sites.append((setup, "molecule"))
        if isinstance(setup.get("basisSet"), str):
            sites.append((setup, "basisSet"))
        for record in calc.get("calculationResults", {}).get("molecularProperties", []):
            for key in ("Molecule", "atom"):
                if key in record:
                    sites.append((record, key))
    return sites


@settings(max_examples=60, deadline=None)
@given(extchem_documents(max_calculations=5).filter(lambda d: d.calculations), st.randoms())
def test_fault_injection_one_dangling_reference(doc, rnd):
    assert validate_references(doc) == []
    raw = json.loads(serialize_extchem(doc))
    container, key = rnd.choice(_ref_sites(raw))
    container[key] = "Broken.404"
    problems = validate_references(parse_extchem(json.dumps(raw)))
    assert len(problems) == 1
    assert problems[0].rule == "dangling-reference"


@settings(max_examples=100, deadline=None)
@given(extchem_documents())
def test_first_mention_rule(doc):
    index = build_id_index(doc)
    assert validate_references(doc) == []
    for calc in doc.calculations:
        setup = calc.calculation_setup
        if isinstance(setup, CalculationSetup):
            assert index[setup.molecule].ordinal < index[setup.id].ordinal


# -- units -----------------------------------------------------------------


def test_bohr_to_angstrom_constant():
    assert BOHR_TO_ANGSTROM == 0.52917721067
    assert convert_quantity(Quantity(1.0, "bohr"), "angstrom") == Quantity(0.52917721067, "angstrom")


def test_convert_oxygen_z():
    out = convert_quantity(Quantity((0.0, 0.0, 0.21063604), "bohr"), "angstrom")
    assert out.units == "angstrom"
    assert out.value == pytest.approx((0.0, 0.0, 0.21063604 * 0.52917721067), rel=1e-15)
    assert out.value[2] == pytest.approx(0.1114638, abs=5e-8)


@pytest.mark.parametrize("q", [Quantity(1.5, "atomic units"), Quantity((1.0, 2.0), "bohr"), Quantity(3.0, "cm-1")])
def test_convert_to_own_units_is_identity(q):
    assert convert_quantity(q, q.units) == q


def test_incompatible_and_unknown_units():
    with pytest.raises(IncompatibleUnits):
        convert_quantity(Quantity(1.0, "atomic units"), "debye")
    with pytest.raises(IncompatibleUnits):
        convert_quantity(Quantity(1.0, "bohr"), "cm-1")
    with pytest.raises(UnitUnknown):
        convert_quantity(Quantity(1.0, "bohr"), "parsec")


@given(st.floats(-1e6, 1e6, allow_nan=False), st.sampled_from(["bohr", "angstrom"]))
def test_length_conversion_round_trip(value, units):
    other = "angstrom" if units == "bohr" else "bohr"
    back = convert_quantity(convert_quantity(Quantity(value, units), other), units)
    # near the underflow boundary relative precision is lost, hence the tiny absolute floor
    assert back.value == pytest.approx(value, rel=1e-12, abs=1e-300)


def test_documents_are_immutable(doc_text):
    doc = parse_extchem(doc_text("water_molecule.json"))
    with pytest.raises(dataclasses.FrozenInstanceError):
        doc.molecules[0].id = "x"
