"""Corpus manifests: which groups a scan covers.

A manifest is JSON with an entry list.  Entries are either literal group
specs ({"group": {...}}) or family expansions with parameter ranges; the
"pairs" expansion forms direct products of all family groups expanded
before it, up to an order limit.  Expansion is deterministic and yields
plain group-spec dicts (picklable, so scan workers can rebuild them).
"""

from __future__ import annotations

import json
import os
from importlib import resources

from .families import family_order
from .groups import GroupError

ENV_CORPUS = "HALLBOUND_CORPUS"


class ManifestError(ValueError):
    """Malformed manifest or duplicate group names."""


def default_manifest_path() -> str:
    override = os.environ.get(ENV_CORPUS)
    if override:
        return override
    return str(resources.files("hallbound").joinpath("data/corpus.json"))


def load_manifest(path: str | None = None) -> dict:
    path = path or default_manifest_path()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("entries"), list):
        raise ManifestError(f"manifest {path} must be an object with an 'entries' list")
    return doc


def _family_spec(name: str, family: dict) -> dict:
    return {
        "name": name,
        "kind": "family",
        "family": family,
        "order": family_order(family),
    }


def _expand_entry(entry: dict, bases: list[dict]) -> list[dict]:
    if "group" in entry:
        spec = dict(entry["group"])
        if "name" not in spec:
            raise ManifestError(f"explicit group entry needs a name: {entry!r}")
        return [spec]
    kind = entry.get("expand")
    if kind == "cyclic":
        lo, hi = entry.get("orders", [2, 16])
        return [_family_spec(f"C{n}", {"id": "cyclic", "params": [n]}) for n in range(lo, hi + 1)]
    if kind == "dihedral":
        lo, hi = entry.get("sides", [3, 8])
        return [_family_spec(f"D{n}", {"id": "dihedral", "params": [n]}) for n in range(lo, hi + 1)]
    if kind == "quaternion":
        orders = entry.get("orders", [8, 16])
        return [_family_spec(f"Q{o}", {"id": "quaternion", "params": [o]}) for o in orders]
    if kind == "heisenberg":
        primes = entry.get("primes", [2, 3, 5])
        return [_family_spec(f"Heis{p}", {"id": "heisenberg", "params": [p]}) for p in primes]
    if kind == "unitriangular":
        sizes = entry.get("sizes", [[3, 2], [4, 2], [3, 3]])
        return [
            _family_spec(f"UT({n},{p})", {"id": "unitriangular", "params": [n, p]})
            for n, p in sizes
        ]
    if kind == "pairs":
        max_order = entry.get("max_order", 64)
        out = []
        for i, a in enumerate(bases):
            if a["order"] == 1:
                continue  # products with the trivial group repeat the base
            for b in bases[i:]:
                if b["order"] == 1 or a["order"] * b["order"] > max_order:
                    continue
                fam = {"id": "product", "of": [a["family"], b["family"]]}
                out.append(_family_spec(f"{a['name']}x{b['name']}", fam))
        return out
    raise ManifestError(f"unknown manifest entry {entry!r}")


def expand_manifest(doc: dict, max_order: int | None = None) -> list[dict]:
    """Flatten a manifest into concrete group specs, in manifest order.
    Duplicate names are an error; a max_order here prunes family entries
    whose order is known up front."""
    specs: list[dict] = []
    bases: list[dict] = []  # family groups seen so far, for "pairs" to
    for entry in doc.get("entries", []):
        if not isinstance(entry, dict):
            raise ManifestError(f"manifest entries must be objects, got {entry!r}")
        try:
            batch = _expand_entry(entry, bases)
        except GroupError as exc:
            raise ManifestError(f"bad manifest entry {entry!r}: {exc}") from exc
        if entry.get("expand") in ("cyclic", "dihedral", "quaternion", "heisenberg", "unitriangular"):
            bases.extend(batch)
        specs.extend(batch)

    cap = doc.get("max_order")
    if max_order is None:
        max_order = cap
    elif cap is not None:
        max_order = min(max_order, cap)
    if max_order is not None:
        specs = [s for s in specs if s.get("order") is None or s["order"] <= max_order]

    seen: set[str] = set()
    for s in specs:
        name = s.get("name")
        if name in seen:
            raise ManifestError(f"duplicate group name {name!r} in corpus")
        seen.add(name)
    return specs
