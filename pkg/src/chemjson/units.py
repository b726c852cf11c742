"""Closed registry of unit labels and the conversions between them."""

from __future__ import annotations

from .errors import IncompatibleUnits, UnitUnknown

# CODATA 2014 Bohr radius in angstrom.
BOHR_TO_ANGSTROM = 0.52917721067

UNITS = ("bohr", "angstrom", "atomic units", "cm-1", "debye")

# (source, target) -> multiplicative factor
_FACTORS = {
    ("bohr", "angstrom"): BOHR_TO_ANGSTROM,
    ("angstrom", "bohr"): 1.0 / BOHR_TO_ANGSTROM,
}


def check_units(label: str, path: str = "") -> str:
    if label not in UNITS:
        raise UnitUnknown(f"units {label!r} not one of {', '.join(UNITS)}", path)
    return label


def conversion_factor(source: str, target: str) -> float:
    check_units(source)
    check_units(target)
    if source == target:
        return 1.0
    try:
        return _FACTORS[source, target]
    except KeyError:
        raise IncompatibleUnits(f"cannot convert {source!r} to {target!r}") from None
