"""Split safe Petri nets into sequential units via SMT partition formulas."""

from ._netsmt import (
    NetsmtError,
    chromatic_number,
    concurrent_pairs,
    decompose,
    encode,
    formula_stats,
    fragments,
    min_units,
    oracle,
    places,
    select,
)

__all__ = [
    "NetsmtError",
    "chromatic_number",
    "concurrent_pairs",
    "decompose",
    "encode",
    "formula_stats",
    "fragments",
    "min_units",
    "oracle",
    "places",
    "select",
]
