"""
From program output to linked JSON
==================================

The log parser cuts a line-printer log into sections, groups the sections
into tasks and writes one calculation per task.
"""

from pathlib import Path

from chemjson import parse_log, serialize_extchem, validate_extchem
from chemjson.nwparse import split_sections, split_tasks

LOGS = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "logs"
text = (LOGS / "water_two_tasks.out").read_text()

# Sections cover every line of the file, recognised or not.
for section in split_sections(text):
    print(f"lines {section.start + 1:3d}-{section.end:3d}  {section.kind.value}")
print("tasks:", len(split_tasks(text)))

# The second task prints its own geometry, so it gets a molecule of its own.
doc = parse_log(text)
for calc in doc.calculations:
    setup = calc.calculation_setup
    energy = calc.calculation_results.total_energy
    print(f"{calc.id}: {calc.calculation_type} on {setup.molecule}, E = {energy.value} {energy.units}")
print("violations:", validate_extchem(doc))
print(serialize_extchem(doc)[:400], "...")
