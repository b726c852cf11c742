"""Periodic table lookups backed by the vendored ``data/elements.csv``.

Covalent radii are the single-bond values of Cordero et al. (2008), in
angstrom, covering Z = 1..96. High-spin values are used for Mn, Fe and Co.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources

from .errors import UnknownElement


@dataclass(frozen=True)
class Element:
    number: int
    symbol: str
    name: str
    covalent_radius: float | None


def _load() -> tuple[Element, ...]:
    text = resources.files(__package__).joinpath("data/elements.csv").read_text("utf-8")
    rows = csv.DictReader(text.splitlines())
    return tuple(
        Element(
            int(r["number"]),
            r["symbol"],
            r["name"],
            float(r["covalent_radius"]) if r["covalent_radius"] else None,
        )
        for r in rows
    )


ELEMENTS = _load()
MAX_ATOMIC_NUMBER = len(ELEMENTS)
_BY_SYMBOL = {e.symbol.lower(): e for e in ELEMENTS}


def by_number(z: int) -> Element:
    if isinstance(z, bool) or not isinstance(z, int) or not 1 <= z <= MAX_ATOMIC_NUMBER:
        raise UnknownElement(f"no element with atomic number {z!r}")
    return ELEMENTS[z - 1]


def by_symbol(symbol: str) -> Element:
    """Case-insensitive symbol lookup (``"o"``, ``"O"`` and ``"CL"`` all work)."""
    try:
        return _BY_SYMBOL[symbol.strip().lower()]
    except (KeyError, AttributeError):
        raise UnknownElement(f"unknown element symbol {symbol!r}") from None


def covalent_radius(z: int) -> float:
    r = by_number(z).covalent_radius
    if r is None:
        raise UnknownElement(f"no covalent radius tabulated for Z={z}")
    return r
