"""Catalog of small standard groups and the structure census over it."""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional

from .errors import BudgetExceeded, MLAError
from .groups import GroupTable, construct_standard_group, is_class2
from .io import digest, to_plain
from .mla import gamma_series, is_improper_star, is_trivial_star, lie_series
from .search import SearchOptions, default_budget, enumerate_stars


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    spec: str
    order: int
    class2: bool    # [G,G] inside Z(G); abelian groups count

    def build(self) -> GroupTable:
        g = construct_standard_group(self.spec)
        if g.order != self.order:
            raise ValueError(f"{self.name}: built order {g.order}, expected {self.order}")
        if is_class2(g) != self.class2:
            raise ValueError(f"{self.name}: class-2 flag mismatch")
        return GroupTable(g.order, g.mul, g.identity, g.inv, self.name)


def _abelian(*ns) -> CatalogEntry:
    n = 1
    for k in ns:
        n *= k
    return CatalogEntry("x".join(f"C{k}" for k in ns), "abelian:" + ",".join(map(str, ns)), n, True)


def _metacyclic(m, n, r, s, name, class2) -> CatalogEntry:
    return CatalogEntry(name, f"metacyclic:{m},{n},{r},{s}", m * n, class2)


def _build_catalog() -> list[CatalogEntry]:
    out = [CatalogEntry(f"C{n}", f"cyclic:{n}", n, True) for n in range(1, 33)]
    out += [_abelian(*ns) for ns in [
        (2, 2), (2, 4), (3, 3), (2, 6), (2, 2, 2), (2, 8), (4, 4), (2, 2, 4),
        (2, 2, 2, 2), (3, 6), (2, 10), (2, 12), (2, 2, 6), (4, 8), (2, 16),
        (2, 4, 4), (2, 2, 8), (2, 2, 2, 4), (2, 2, 2, 2, 2)]]
    # D_n is class 2 only for n in {1, 2, 4}
    out += [CatalogEntry(f"D{n}", f"dihedral:{n}", 2 * n, n in (1, 2, 4)) for n in range(3, 17)]
    out += [
        CatalogEntry("Q8", "quaternion8", 8, True),
        CatalogEntry("Heis2", "heisenberg:2", 8, True),
        CatalogEntry("Heis3", "heisenberg:3", 27, True),
        _metacyclic(3, 2, 2, 0, "S3", False),
        _metacyclic(5, 4, 2, 0, "F20", False),
        _metacyclic(7, 3, 2, 0, "C7:C3", False),
        _metacyclic(8, 2, 5, 0, "M16", True),
        _metacyclic(4, 4, 3, 0, "C4:C4", True),
        _metacyclic(8, 2, 3, 0, "SD16", False),
        _metacyclic(8, 2, 7, 4, "Q16", False),
        _metacyclic(3, 4, 2, 0, "Dic3", False),
        _metacyclic(9, 3, 4, 0, "M27", True),
        CatalogEntry("D4xC2", "dihedral:4 x cyclic:2", 16, True),
        CatalogEntry("Q8xC2", "quaternion8 x cyclic:2", 16, True),
    ]
    return out


CATALOG: list[CatalogEntry] = _build_catalog()
CATALOG_BY_NAME = {e.name: e for e in CATALOG}


def select(names: Optional[Iterable[str]] = None, *, max_order: Optional[int] = None,
           class2: Optional[bool] = None) -> list[CatalogEntry]:
    if names is not None:
        names = list(names)
        missing = [n for n in names if n not in CATALOG_BY_NAME]
        if missing:
            raise KeyError(f"not in catalog: {missing}")
        out = [CATALOG_BY_NAME[n] for n in names]
    else:
        out = list(CATALOG)
    if max_order is not None:
        out = [e for e in out if e.order <= max_order]
    if class2 is not None:
        out = [e for e in out if e.class2 == class2]
    return out


# ---------------------------------------------------------------------------
# census


@dataclass
class RunReport:
    """What a command did. ``timing`` is left out of ``to_json`` unless asked,
    so identical inputs give byte-identical output."""

    command: list
    inputs: dict
    results: dict
    complete: bool = True
    timing: float = 0.0
    include_timing: bool = field(default=False, repr=False)

    def to_json(self) -> dict:
        out = {"command": list(self.command), "inputs_digest": digest(self.inputs),
               "results": to_plain(self.results), "complete": self.complete}
        if self.include_timing:
            out["timing"] = round(self.timing, 3)
        return out


def structure_record(g: GroupTable, star, class2: bool) -> dict:
    gam = gamma_series(g, star, "lower-central")
    lie = lie_series(g, star, "lower-central")
    return {
        "group": g.name,
        "star": star.tolist(),
        "class2": class2,
        "mla_nilpotency": gam.class_or_length,
        "lie_nilpotency": lie.class_or_length,
        "is_trivial": is_trivial_star(g, star),
        "is_improper": is_improper_star(g, star),
    }


def census_entry(entry: CatalogEntry, budget: float) -> list[dict]:
    """Records for one group followed by its summary record."""
    t0 = time.monotonic()
    summary = {"group": entry.name, "summary": True, "order": entry.order,
               "spec": entry.spec, "complete": True, "error": None}
    records: list[dict] = []
    try:
        g = entry.build()
        c2 = is_class2(g)
        try:
            res = enumerate_stars(g, SearchOptions(time_budget=budget))
            stars, complete = res.stars, res.complete
        except BudgetExceeded as exc:
            stars, complete = exc.partial.stars, False
        records = [structure_record(g, s.star, c2) for s in stars]
        summary["complete"] = complete
    except (MLAError, ValueError) as exc:
        summary["complete"] = False
        summary["error"] = f"{type(exc).__name__}: {exc}"
    summary["count"] = len(records)
    summary["nontrivial"] = sum(not r["is_trivial"] for r in records)
    summary["seconds"] = round(time.monotonic() - t0, 3)
    return records + [summary]


def _entry_job(args):
    return census_entry(*args)


def census(entries: Iterable[CatalogEntry], budget: Optional[float] = None, *,
           jobs: int = 1, timing: bool = False) -> list[dict]:
    """JSON-ready census records for every catalog entry.

    Structure records are sorted by (group name, star table); each group's
    summary record follows its structures. Failures are recorded in the
    summary and the run moves on. ``seconds`` is dropped unless ``timing``.
    """
    entries = list(entries)
    budget = default_budget() if budget is None else budget
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_entry_job, [(e, budget) for e in entries]))
    else:
        chunks = [census_entry(e, budget) for e in entries]
    out = []
    for chunk in sorted(chunks, key=lambda c: c[-1]["group"]):
        recs = sorted(chunk[:-1], key=lambda r: r["star"])
        summ = dict(chunk[-1])
        if not timing:
            summ.pop("seconds")
        out += recs + [summ]
    return out


def census_lines(records: list[dict]) -> str:
    return "".join(json.dumps(r, sort_keys=True, separators=(",", ":")) + "\n" for r in records)


def entry_asdict(e: CatalogEntry) -> dict:
    return asdict(e)
