"""NWChem-style line-printer output to ExtendedChem JSON.

The log is cut into sections, and sections are grouped into tasks: a task
ends at its ``Task  times`` line. Recognised section headers are

* ``Geometry "<name>"``: followed by an ``Output coordinates in <units>``
  line and a table ``No. Tag Charge X Y Z`` under a dashed rule;
* ``NWChem SCF Module`` / ``NWChem DFT Module``: ``key = value`` lines
  (``charge``, ``wavefunction``, ``open shells``, ``multiplicity``) closed by
  ``Total SCF energy =`` / ``Total DFT energy =``;
* ``Multipole moments``: ``Total dipole moment <v>`` and
  ``Quadrupole <component> <v>`` lines, atomic units, ended by a blank line;
* ``Normal Eigenvalue``: a mode table ``<mode> <cm-1> || ...`` between two
  dashed rules.

Everything else becomes an ``UNKNOWN`` section. Columns are split on
whitespace. See ``docs/log-grammar.md`` for the full description.
"""

from __future__ import annotations

import enum
import logging
import re
from dataclasses import dataclass, field

from .elements import by_number, by_symbol
from .errors import EmptyLog, MissingField, RowParseError, UnknownElement
from .extchem import (
    Calculation,
    CalculationResults,
    CalculationSetup,
    ExtChemDocument,
    PropertyRecord,
    Quantity,
)
from .ops import hill_formula, molecule_from_arrays

log = logging.getLogger(__name__)


class SectionKind(enum.Enum):
    GEOMETRY = "GeometryBlock"
    SCF = "ScfSummary"
    MULTIPOLE = "MultipoleBlock"
    FREQUENCY = "FrequencyBlock"
    TASK_BOUNDARY = "TaskBoundary"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class LogSection:
    kind: SectionKind
    start: int  # 0-based index of the first line
    end: int  # exclusive
    lines: tuple[str, ...]

    def line_number(self, offset: int) -> int:
        return self.start + offset + 1


@dataclass(frozen=True)
class GeometryAtom:
    symbol: str
    coords: tuple[float, float, float]
    units: str
    label: str


@dataclass
class ParsedTask:
    geometry: list[GeometryAtom] = field(default_factory=list)
    energy: Quantity | None = None
    dipole: Quantity | None = None
    quadrupole: dict[str, Quantity] = field(default_factory=dict)
    frequencies: list[Quantity] = field(default_factory=list)
    charge: int = 0
    multiplicity: int = 1
    wave_function_type: str | None = None
    theory: str | None = None


_HEADERS = (
    (re.compile(r'^\s*Geometry\s+"[^"]*"'), SectionKind.GEOMETRY),
    (re.compile(r"^\s*NWChem (SCF|DFT) Module"), SectionKind.SCF),
    (re.compile(r"^\s*Multipole moments"), SectionKind.MULTIPOLE),
    (re.compile(r"^\s*Normal Eigenvalue"), SectionKind.FREQUENCY),
    (re.compile(r"^\s*Task  times"), SectionKind.TASK_BOUNDARY),
)
_RULE = re.compile(r"^\s*-{3,}[-\s|]*$")
_THEORY = {"SCF": "Hartree-Fock", "DFT": "Density Functional Theory"}
_UNITS = {"angstroms": "angstrom", "angstrom": "angstrom", "a.u.": "bohr", "bohr": "bohr", "au": "bohr"}


def _header_kind(line: str) -> SectionKind | None:
    for pattern, kind in _HEADERS:
        if pattern.match(line):
            return kind
    return None


def _geometry_end(lines, i, limit):
    j = i + 1
    while j < limit and not lines[j].split()[:1] == ["No."]:
        j += 1
    if j >= limit:
        return limit
    j += 1
    if j < limit and _RULE.match(lines[j]):
        j += 1
    while j < limit and lines[j].strip():
        j += 1
    return j


def _scf_end(lines, i, limit):
    for j in range(i + 1, limit):
        if re.match(r"^\s*Total (SCF|DFT) energy", lines[j]):
            return j + 1
    return limit


def _multipole_end(lines, i, limit):
    seen_data = False
    for j in range(i + 1, limit):
        text = lines[j].strip()
        if not text:
            if seen_data:
                return j
        elif not _RULE.match(lines[j]):
            seen_data = True
    return limit


def _frequency_end(lines, i, limit):
    rules = 0
    for j in range(i + 1, limit):
        if _RULE.match(lines[j]):
            rules += 1
            if rules == 2:
                return j + 1
        elif rules == 1 and not lines[j].strip():
            return j
    return limit


_ENDS = {
    SectionKind.GEOMETRY: _geometry_end,
    SectionKind.SCF: _scf_end,
    SectionKind.MULTIPOLE: _multipole_end,
    SectionKind.FREQUENCY: _frequency_end,
}


def split_sections(log_text: str) -> list[LogSection]:
    """Cut the log into consecutive sections that together cover every line."""
    lines = log_text.splitlines()
    kinds = [_header_kind(line) for line in lines]
    sections = []
    i, n = 0, len(lines)
    while i < n:
        kind = kinds[i]
        if kind is SectionKind.TASK_BOUNDARY:
            end = i + 1
        elif kind is not None:
            limit = next((j for j in range(i + 1, n) if kinds[j] is not None), n)
            end = max(i + 1, _ENDS[kind](lines, i, limit))
        else:
            kind = SectionKind.UNKNOWN
            end = next((j for j in range(i + 1, n) if kinds[j] is not None), n)
        sections.append(LogSection(kind, i, end, tuple(lines[i:end])))
        i = end
    # unknown runs interrupted only by block ends are merged back together
    merged: list[LogSection] = []
    for s in sections:
        prev = merged[-1] if merged else None
        if prev and prev.kind is s.kind is SectionKind.UNKNOWN:
            merged[-1] = LogSection(s.kind, prev.start, s.end, prev.lines + s.lines)
        else:
            merged.append(s)
    return merged


def _recognised(group) -> bool:
    return any(s.kind not in (SectionKind.UNKNOWN, SectionKind.TASK_BOUNDARY) for s in group)


def split_tasks(log_text: str) -> list[list[LogSection]]:
    """Group sections into tasks, one group per ``Task  times`` marker.

    Trailing content after the last marker opens a new group only if it
    holds a recognised block; otherwise it is appended to the last group.
    """
    groups: list[list[LogSection]] = []
    current: list[LogSection] = []
    for section in split_sections(log_text):
        current.append(section)
        if section.kind is SectionKind.TASK_BOUNDARY:
            groups.append(current)
            current = []
    if current:
        if groups and not _recognised(current):
            groups[-1].extend(current)
        else:
            groups.append(current)
    return groups


# -- block parsers ---------------------------------------------------------


def _symbol_for(tag: str, charge: str, line_no: int) -> str:
    letters = re.match(r"[A-Za-z]*", tag).group(0)
    for candidate in (letters, letters[:2], letters[:1]):
        if candidate:
            try:
                return by_symbol(candidate).symbol
            except UnknownElement:
                pass
    try:
        return by_number(round(float(charge))).symbol
    except (ValueError, UnknownElement):
        raise RowParseError(f"cannot identify element from tag {tag!r}", line_no) from None


def parse_geometry_block(section: LogSection) -> list[GeometryAtom]:
    units = None
    rows_start = None
    for k, line in enumerate(section.lines):
        m = re.search(r"Output coordinates in\s+(\S+)", line)
        if m:
            units = _UNITS.get(m.group(1).lower())
            if units is None:
                raise RowParseError(f"unrecognised coordinate units {m.group(1)!r}", section.line_number(k))
        if line.split()[:1] == ["No."]:
            rows_start = k + 1
            if rows_start < len(section.lines) and _RULE.match(section.lines[rows_start]):
                rows_start += 1
            break
    if rows_start is None:
        return []
    if units is None:
        raise RowParseError("no 'Output coordinates in <units>' line before the table",
                            section.line_number(rows_start - 1))
    atoms = []
    for k in range(rows_start, len(section.lines)):
        line = section.lines[k]
        if not line.strip():
            break
        line_no = section.line_number(k)
        cols = line.split()
        if len(cols) != 6:
            raise RowParseError(f"expected 6 columns, found {len(cols)}", line_no)
        try:
            xyz = (float(cols[3]), float(cols[4]), float(cols[5]))
        except ValueError:
            raise RowParseError(f"non-numeric coordinate in {line.strip()!r}", line_no) from None
        atoms.append(GeometryAtom(_symbol_for(cols[1], cols[2], line_no), xyz, units, cols[1]))
    return atoms


def _au(value: float) -> Quantity:
    return Quantity(value, "atomic units")


def parse_multipole_block(section: LogSection) -> tuple[Quantity, dict[str, Quantity]]:
    dipole = None
    quadrupole: dict[str, Quantity] = {}
    for line in section.lines:
        text = line.strip()
        if text.startswith("Total dipole moment"):
            try:
                dipole = _au(float(text.split()[-1]))
            except ValueError:
                raise MissingField("dipole totalMoment is not a number") from None
        elif text.startswith("Quadrupole ") and len(text.split()) >= 2:
            parts = text.split()
            name = parts[1]
            try:
                quadrupole[name] = _au(float(parts[2]))
            except (IndexError, ValueError):
                raise MissingField(f"quadrupole component {name} has no numeric value") from None
    if dipole is None:
        raise MissingField("no 'Total dipole moment' line (totalMoment)")
    return dipole, quadrupole


def parse_frequency_block(section: LogSection) -> list[Quantity]:
    out = []
    rules = 0
    for k, line in enumerate(section.lines):
        if _RULE.match(line):
            rules += 1
            continue
        if rules != 1 or not line.strip():
            continue
        cols = line.split()
        try:
            int(cols[0])
            out.append(Quantity(float(cols[1]), "cm-1"))
        except (IndexError, ValueError):
            raise RowParseError(f"bad frequency row {line.strip()!r}", section.line_number(k)) from None
    return out


def _parse_scf(section: LogSection, task: ParsedTask) -> None:
    m = re.match(r"^\s*NWChem (SCF|DFT) Module", section.lines[0])
    task.theory = _THEORY[m.group(1)]
    open_shells = None
    multiplicity = None
    for k, line in enumerate(section.lines[1:], start=1):
        if "=" not in line:
            continue
        key, _, value = (p.strip() for p in line.partition("="))
        try:
            if key == "charge":
                task.charge = round(float(value))
            elif key == "wavefunction":
                task.wave_function_type = value
            elif key == "open shells":
                open_shells = int(value)
            elif key == "multiplicity":
                multiplicity = int(value)
            elif key in ("Total SCF energy", "Total DFT energy"):
                task.energy = _au(float(value))
        except ValueError:
            raise RowParseError(f"bad value for {key!r}: {value!r}", section.line_number(k)) from None
    if multiplicity is not None:
        task.multiplicity = multiplicity
    elif open_shells is not None:
        task.multiplicity = open_shells + 1


def parse_task(group: list[LogSection]) -> ParsedTask:
    task = ParsedTask()
    for section in group:
        if section.kind is SectionKind.GEOMETRY:
            geometry = parse_geometry_block(section)
            if geometry:
                task.geometry = geometry
        elif section.kind is SectionKind.SCF:
            _parse_scf(section, task)
        elif section.kind is SectionKind.MULTIPOLE:
            task.dipole, task.quadrupole = parse_multipole_block(section)
        elif section.kind is SectionKind.FREQUENCY:
            task.frequencies = parse_frequency_block(section)
    return task


# -- assembly --------------------------------------------------------------


def _calculation_type(task: ParsedTask) -> str:
    if task.frequencies:
        return "vibrationalModes"
    if task.dipole is not None:
        return "molecularProperties"
    return "energyCalculation"


def parse_log(log_text: str) -> ExtChemDocument:
    """One calculation per task; a task without geometry reuses the previous molecule."""
    molecules = []
    calculations = []
    for group in split_tasks(log_text):
        if not _recognised(group):
            continue
        task = parse_task(group)
        if task.geometry:
            numbers = [by_symbol(a.symbol).number for a in task.geometry]
            coords = [c for a in task.geometry for c in a.coords]
            units = {a.units for a in task.geometry}.pop()
            molecules.append(molecule_from_arrays(
                numbers, coords, len(molecules) + 1, units=units, labels=[a.label for a in task.geometry]))
        elif not molecules:
            log.warning("skipping task at line %d: no geometry available", group[0].start + 1)
            continue
        molecule = molecules[-1]
        n = len(calculations) + 1
        numbers = molecule.element_numbers
        props = []
        if task.dipole is not None:
            record = {"dipoleMoment": {"totalMoment": task.dipole}}
            if task.quadrupole:
                record["quadrupoleMoment"] = dict(task.quadrupole)
            props.append(PropertyRecord(molecule=molecule.id, properties=record))
        results = CalculationResults(
            molecular_properties=tuple(props),
            vibrational_frequencies=tuple(task.frequencies),
            total_energy=task.energy,
        )
        has_results = bool(props or task.frequencies or task.energy is not None)
        calculations.append(Calculation(
            calculation_type=_calculation_type(task),
            molecular_formula=hill_formula(numbers),
            id=f"calculation.{n}",
            calculation_setup=CalculationSetup(
                id=f"calculationSetup.{n}",
                molecule=molecule.id,
                charge=task.charge,
                multiplicity=task.multiplicity,
                number_of_electrons=sum(numbers) - task.charge,
                wave_function_type=task.wave_function_type,
                wave_function_theory=task.theory,
            ),
            calculation_results=results if has_results else None,
        ))
    if not calculations:
        raise EmptyLog("no recognisable sections in log")
    return ExtChemDocument(molecules=tuple(molecules), calculations=tuple(calculations))
