"""JSON file formats for groups, stars and extension data, plus report payloads.

Group file::

    {"name": str, "order": n, "mul": [[int]]}

Identity and inverses are recomputed on load and the table is validated.

Star file::

    {"group": <group object or family spec string>, "star": [[int]]}

Extension file::

    {"H": group, "K": group, "bracket_H": [[int]], "bracket_K": [[int]],
     "sigma": [[int]], "gamma": [[int]], "f": [[int]], "h": [[int]]}

``sigma[x]`` and ``gamma[x]`` are the images of every H element under the
map attached to x in K. Elements of the built group use index
``a + |H| * x``.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

import numpy as np

from .groups import GroupTable, Subset, construct_standard_group, group_from_json
from .mla import (
    MLA,
    LieRing,
    StarTable,
    certify,
    check_derived_identities,
    check_mla_axioms,
    gamma_series,
    lie_series,
    lz_center,
    mz_center,
    star_improper,
    star_trivial,
)
from .extension import ExtensionData


def to_plain(obj: Any) -> Any:
    """Convert numpy scalars/arrays, tuples and Subsets into JSON-ready values."""
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, Subset):
        return obj.elements()
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if hasattr(obj, "to_json"):
        return to_plain(obj.to_json())
    return obj


def dumps(payload: Any) -> str:
    """Canonical JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(to_plain(payload), sort_keys=True, indent=2) + "\n"


def digest(payload: Any) -> str:
    raw = json.dumps(to_plain(payload), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(raw.encode()).hexdigest()


def read_json(path) -> Any:
    with open(path) as fh:
        return json.load(fh)


def write_json(path, payload: Any) -> None:
    Path(path).write_text(dumps(payload))


# groups ---------------------------------------------------------------------

def group_to_json(g: GroupTable) -> dict:
    return g.to_json()


def resolve_group(ref) -> GroupTable:
    """A group from an inline object or a family spec string."""
    if isinstance(ref, GroupTable):
        return ref
    if isinstance(ref, str):
        return construct_standard_group(ref)
    if isinstance(ref, dict):
        return group_from_json(ref)
    raise ValueError(f"cannot read a group from {type(ref).__name__}")


def load_group(path) -> GroupTable:
    return resolve_group(read_json(path))


def save_group(path, g: GroupTable) -> None:
    write_json(path, group_to_json(g))


# stars ----------------------------------------------------------------------

def star_to_json(g: GroupTable, star) -> dict:
    s = star.star if isinstance(star, (MLA, StarTable)) else np.asarray(star)
    return {"group": group_to_json(g), "star": s.tolist()}


def star_from_json(data: dict, group: GroupTable | None = None) -> tuple[GroupTable, np.ndarray]:
    """(group, star table). An explicit ``group`` wins over the file's own.

    An inline group in the file must equal the given one; a string
    reference is not re-checked.
    """
    ref = data.get("group")
    if group is None:
        if ref is None:
            raise ValueError("star file has no group and none was given")
        group = resolve_group(ref)
    elif isinstance(ref, dict) and resolve_group(ref) != group:
        raise ValueError("star file group differs from the given group")
    star = np.asarray(data["star"], dtype=np.int64)
    if star.shape != (group.order, group.order):
        raise ValueError(f"star table shape {star.shape} does not match order {group.order}")
    return group, star


def load_star(path, group: GroupTable | None = None):
    return star_from_json(read_json(path), group)


def save_star(path, g: GroupTable, star) -> None:
    write_json(path, star_to_json(g, star))


def named_star(g: GroupTable, which: str) -> np.ndarray:
    if which == "trivial":
        return star_trivial(g).star
    if which == "improper":
        return star_improper(g).star
    raise ValueError(f"unknown named star {which!r}")


# extensions -----------------------------------------------------------------

def extension_to_json(e: ExtensionData) -> dict:
    return {
        "H": group_to_json(e.H.group), "K": group_to_json(e.K.group),
        "bracket_H": e.H.bracket.tolist(), "bracket_K": e.K.bracket.tolist(),
        "sigma": e.sigma.tolist(), "gamma": e.gamma.tolist(),
        "f": e.f.tolist(), "h": e.h.tolist(),
    }


def extension_from_json(data: dict, *, certify_brackets: bool = True) -> ExtensionData:
    """Rebuild extension data; brackets are certified as Lie rings unless told not to."""
    H, K = resolve_group(data["H"]), resolve_group(data["K"])

    def ring(g, table):
        table = np.asarray(table, dtype=np.int64)
        m = certify(g, table) if certify_brackets else MLA(g, StarTable(table), False)
        return LieRing(m)

    return ExtensionData(ring(H, data["bracket_H"]), ring(K, data["bracket_K"]),
                         data["sigma"], data["gamma"], data["f"], data["h"])


def load_extension(path, **kw) -> ExtensionData:
    return extension_from_json(read_json(path), **kw)


def save_extension(path, e: ExtensionData) -> None:
    write_json(path, extension_to_json(e))


# reports --------------------------------------------------------------------

REPORT_PARTS = ("axioms", "identities", "series", "centers")


def mla_report(g: GroupTable, star, parts=REPORT_PARTS) -> dict:
    """Report payload; identities, series and centers need a certified star."""
    s = np.asarray(star, dtype=np.int64)
    out: dict = {}
    axioms = check_mla_axioms(g, s)
    out["axioms"] = [v.to_json() for v in axioms]
    if axioms:
        return out
    if "identities" in parts:
        out["identities"] = [v.to_json() for v in check_derived_identities(g, s)]
    if "series" in parts:
        out["series"] = {
            "gamma_derived": gamma_series(g, s, "derived").to_json(),
            "gamma_lower_central": gamma_series(g, s, "lower-central").to_json(),
            "lie_derived": lie_series(g, s, "derived").to_json(),
            "lie_lower_central": lie_series(g, s, "lower-central").to_json(),
        }
    if "centers" in parts:
        out["centers"] = {"MZ": mz_center(g, s).elements(), "LZ": lz_center(g, s).elements()}
    return out
