"""Unit conversions between spectroscopic input units and atomic units.

Internally everything is in atomic units (hbar = m_e = e = a0 = 1). Energies
are hartree, times are atomic time units, lengths are bohr and masses are
electron masses. Angular frequencies are numerically equal to energies.

Constants are CODATA 2018 recommended values.
"""

from __future__ import annotations

import re

HARTREE_IN_CM1 = 219474.6313632
AU_TIME_IN_PS = 2.4188843265857e-5
BOHR_IN_ANGSTROM = 0.529177210903
AMU_IN_ME = 1822.888486209

#: Half the standard atomic mass of 23Na (22.98976928 u), i.e. the Na2 reduced mass.
NA2_REDUCED_MASS_AMU = 11.49488464


class UnitError(ValueError):
    """Unknown unit tag, or a unit of the wrong dimension."""


# tag -> (dimension, factor multiplying a value in that unit to give atomic units)
_UNITS: dict[str, tuple[str, float]] = {
    "cm-1": ("energy", 1.0 / HARTREE_IN_CM1),
    "hartree": ("energy", 1.0),
    "ps": ("time", 1.0 / AU_TIME_IN_PS),
    "fs": ("time", 1e-3 / AU_TIME_IN_PS),
    "au_time": ("time", 1.0),
    "angstrom": ("length", 1.0 / BOHR_IN_ANGSTROM),
    "bohr": ("length", 1.0),
    "amu": ("mass", AMU_IN_ME),
    "me": ("mass", 1.0),
    "1/angstrom": ("inverse_length", BOHR_IN_ANGSTROM),
    "1/bohr": ("inverse_length", 1.0),
    "cm-1/angstrom^2": ("force_constant", BOHR_IN_ANGSTROM**2 / HARTREE_IN_CM1),
    "hartree/bohr^2": ("force_constant", 1.0),
}

_ALIASES = {
    "cm^-1": "cm-1",
    "cm⁻¹": "cm-1",
    "1/cm": "cm-1",
    "a": "angstrom",
    "å": "angstrom",
    "ang": "angstrom",
    "u": "amu",
    "da": "amu",
    "eh": "hartree",
}


def _canonical(unit: str) -> str:
    tag = unit.strip().lower()
    tag = _ALIASES.get(tag, tag)
    if tag not in _UNITS:
        raise UnitError(f"unknown unit tag {unit!r}")
    return tag


def dimension(unit: str) -> str:
    """Physical dimension ('energy', 'time', 'length', 'mass', ...) of a unit tag."""
    return _UNITS[_canonical(unit)][0]


def to_internal(value, unit: str):
    """Convert ``value`` given in ``unit`` to atomic units.

    Works elementwise on numpy arrays.

    >>> to_internal(219474.6313632, "cm-1")
    1.0
    """
    return value * _UNITS[_canonical(unit)][1]


def from_internal(value, unit: str):
    """Inverse of :func:`to_internal`."""
    return value / _UNITS[_canonical(unit)][1]


_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(\S.*?)\s*$")


def parse_quantity(text: str, expect: str | None = None) -> float:
    """Parse a string such as ``"2010 cm-1"`` into atomic units.

    If ``expect`` names a dimension, a unit of any other dimension raises
    :class:`UnitError`.
    """
    m = _QUANTITY.match(text)
    if m is None:
        raise UnitError(f"cannot parse quantity {text!r}; expected '<number> <unit>'")
    number, unit = m.groups()
    dim = dimension(unit)
    if expect is not None and dim != expect:
        raise UnitError(f"{text!r} has dimension {dim}, expected {expect}")
    return to_internal(float(number), unit)


def format_quantity(value: float, unit: str) -> str:
    """Format an internal value as a round-trippable quantity string."""
    return f"{from_internal(value, unit)!r} {_canonical(unit)}"
