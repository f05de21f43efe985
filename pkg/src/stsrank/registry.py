"""Known base constants: labeled STS counts (psi), latin squares (lambda),
symmetric latin squares (pi)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

from .design import sts_order_admissible
from .errors import DesignError, UnknownConstantError

SYMBOLS = {"psi": "Ψ", "lambda": "Λ", "pi": "Π"}


@dataclass(frozen=True)
class Entry:
    value: int
    provenance: str  # "published" | "computed" | "user-supplied"


_PUBLISHED = {
    "psi": {0: 1, 1: 1, 3: 1, 7: 30, 9: 840},
    "lambda": {
        1: 1,
        2: 2,
        3: 12,
        4: 576,
        7: 61479419904000,
        8: 108776032459082956800,
        9: 5524751496156892842531225600,
        10: 9982437658213039871725064756920320000,
    },
    "pi": {0: 1, 1: 1, 3: 6, 7: 31449600, 9: 444733651353600},
}


@dataclass(frozen=True)
class CountRegistry:
    tables: Mapping[str, Mapping[int, Entry]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        frozen = {k: MappingProxyType(dict(self.tables.get(k, {}))) for k in SYMBOLS}
        object.__setattr__(self, "tables", MappingProxyType(frozen))

    def lookup(self, table: str, order: int) -> Entry:
        if table == "psi" and order > 1 and not sts_order_admissible(order):
            return Entry(0, "computed")
        try:
            return self.tables[table][order]
        except KeyError:
            raise UnknownConstantError(SYMBOLS[table], order) from None

    def psi(self, u: int) -> int:
        return self.lookup("psi", u).value

    def lam(self, u: int) -> int:
        return self.lookup("lambda", u).value

    def pi(self, u: int) -> int:
        return self.lookup("pi", u).value

    def extend(self, table: str, order: int, value: int, provenance: str = "user-supplied") -> CountRegistry:
        """Return a new registry with one more entry; conflicting values are rejected."""
        if table not in SYMBOLS:
            raise DesignError(f"unknown registry table {table!r}")
        if order < 0 or value < 0:
            raise DesignError(f"registry entries must be nonnegative, got {table}[{order}]={value}")
        if table == "psi" and not sts_order_admissible(order):
            raise DesignError(f"Ψ_{order} is fixed to 0: no STS of that order")
        current = self.tables[table].get(order)
        if current is not None:
            if current.value != value:
                raise DesignError(
                    f"conflicting value for {SYMBOLS[table]}_{order}: "
                    f"{current.value} ({current.provenance}) vs {value}"
                )
            return self
        tables = {k: dict(v) for k, v in self.tables.items()}
        tables[table][order] = Entry(value, provenance)
        return CountRegistry(tables)

    def to_json(self) -> dict[str, dict[str, str]]:
        return {
            t: {str(k): str(e.value) for k, e in sorted(self.tables[t].items())} for t in SYMBOLS
        }


def registry_default() -> CountRegistry:
    return CountRegistry(
        {t: {k: Entry(v, "published") for k, v in vals.items()} for t, vals in _PUBLISHED.items()}
    )


def registry_load(path: str | Path, base: CountRegistry | None = None) -> CountRegistry:
    """Extend ``base`` (default registry) with a JSON file of decimal-string values."""
    reg = registry_default() if base is None else base
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DesignError(f"cannot read registry {path}: {exc}") from None
    if not isinstance(data, dict) or set(data) - set(SYMBOLS):
        raise DesignError(f"registry must be an object with keys among {sorted(SYMBOLS)}")
    for table, entries in data.items():
        if not isinstance(entries, dict):
            raise DesignError(f"registry table {table!r} must be an object")
        for order, value in entries.items():
            try:
                reg = reg.extend(table, int(order), int(str(value)))
            except ValueError as exc:
                if isinstance(exc, DesignError):
                    raise
                raise DesignError(f"malformed entry {table}[{order!r}] = {value!r}") from None
    return reg
