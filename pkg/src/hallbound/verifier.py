"""Normal-subgroup commutator semilattices and the nilpotency bound scan.

For a finite group E the carrier is its set of normal subgroups, join is
the subgroup product, and dot is the commutator subgroup.  On that lattice
f = dot(E, -) and g = dot(N, -) are inner derivations, and the descent
chain machinery from `calculus` turns "N has class c, E/[N,N] has class d"
into the bound class(E) <= c*d + (c-1)*(d-1).  This module builds those
lattices, checks every instance the corpus offers, and aggregates the
results.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .calculus import ChainReport, check_descent_chain
from .families import group_from_spec
from .groups import (
    CapExceeded,
    FiniteGroup,
    GroupError,
    Subgroup,
    all_normal_subgroups,
    commutator_subgroup,
    nilpotency_class,
    nilpotency_class_in,
    normality_witness,
    quotient,
    subgroup_generated,
)
from .lattice import (
    SCHEMA_VERSION,
    AxiomReport,
    CommutatorSemilattice,
    check_commutator_axioms,
    check_jacobi,
    check_join_semilattice,
)


class ConsistencyError(RuntimeError):
    """The engine contradicted itself (lattice axioms failing on a
    normal-subgroup lattice, or a bound instance on a non-nilpotent
    group).  Always a bug, never a property of the input."""

    def __init__(self, message: str, report: AxiomReport | None = None):
        super().__init__(message)
        self.report = report


class NotNormalError(GroupError):
    """Requested subgroup is not normal; carries a conjugation witness."""

    def __init__(self, message: str, witness: tuple[int, int]):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True, eq=False)
class NormalLattice:
    """A group's normal subgroups as a commutator semilattice.

    Element i of the lattice is subgroups[i]; sorting by (order, key)
    puts the trivial subgroup at 0 (the bottom) and the whole group last
    (the top).
    """

    group: FiniteGroup
    lattice: CommutatorSemilattice
    subgroups: tuple[Subgroup, ...]

    @property
    def bottom(self) -> int:
        return 0

    @property
    def top(self) -> int:
        return len(self.subgroups) - 1

    def id_of(self, sub: Subgroup) -> int:
        for i, s in enumerate(self.subgroups):
            if s.key == sub.key:
                return i
        raise GroupError(f"subgroup of order {sub.order} is not normal in {self.group.name}")


def nsub_semilattice(group: FiniteGroup) -> NormalLattice:
    """Build the normal-subgroup lattice and certify it: join and dot must
    land on normal subgroups, and the join/commutator/Jacobi axioms must
    all pass (anything else raises ConsistencyError)."""
    subs = all_normal_subgroups(group)
    count = len(subs)
    by_mask = {s.members.tobytes(): i for i, s in enumerate(subs)}
    els = [s.elements for s in subs]
    size = group.order
    T = group.table
    K = group.comm_table()

    def lookup(members: np.ndarray, what: str, i: int, j: int) -> int:
        mask = np.zeros(size, dtype=bool)
        mask[members] = True
        got = by_mask.get(mask.tobytes())
        if got is None:
            raise ConsistencyError(
                f"{what} of normal subgroups {i} and {j} of {group.name} "
                "is not in the enumerated lattice"
            )
        return got

    join = np.zeros((count, count), dtype=np.int32)
    dot = np.zeros((count, count), dtype=np.int32)
    for i in range(count):
        for j in range(i, count):
            prod = np.unique(T[np.ix_(els[i], els[j])])
            join[i, j] = join[j, i] = lookup(prod, "product", i, j)
            vals = np.unique(K[np.ix_(els[i], els[j])])
            comm = _close(T, vals)
            dot[i, j] = dot[j, i] = lookup(comm, "commutator", i, j)

    lat = CommutatorSemilattice(join, dot, names=[s.label() for s in subs])
    for checker, what in (
        (check_join_semilattice, "join"),
        (check_commutator_axioms, "commutator"),
        (check_jacobi, "jacobi"),
    ):
        report = checker(lat)
        if not report.holds:
            raise ConsistencyError(
                f"normal-subgroup lattice of {group.name} fails {what} axioms: "
                f"{', '.join(report.failing())}",
                report=report,
            )
    return NormalLattice(group=group, lattice=lat, subgroups=tuple(subs))


def _close(table: np.ndarray, ids: np.ndarray) -> np.ndarray:
    cur = np.unique(np.append(ids, 0)).astype(np.int32)
    while True:
        prods = np.unique(table[np.ix_(cur, cur)])
        if prods.size == cur.size:
            return cur
        cur = prods.astype(np.int32)


@dataclass(frozen=True, eq=False)
class HallInstance:
    """One (E, N) pair with both classes defined.

    c = class(N), d = class(E/[N,N]).  The bound only applies for c >= 1;
    c = 0 (N trivial) is kept as the degenerate identity-extension case
    and excluded from bound checking."""

    n_key: tuple[int, ...]
    n_label: str
    n_order: int
    c: int
    d: int
    class_e: int
    bound: int | None
    tight: bool
    chain: ChainReport | None

    @property
    def violated(self) -> bool:
        return self.bound is not None and self.class_e > self.bound

    def to_json(self, with_chain: bool = True) -> dict:
        doc = {
            "n_key": list(self.n_key),
            "n_label": self.n_label,
            "n_order": self.n_order,
            "c": self.c,
            "d": self.d,
            "class_e": self.class_e,
            "bound": self.bound,
            "tight": self.tight,
            "violated": self.violated,
        }
        if self.chain is not None:
            doc["chain_valid"] = self.chain.valid
            if with_chain:
                doc["chain"] = self.chain.to_json()
        return doc


@dataclass(frozen=True, eq=False)
class BoundReport:
    """All bound instances of one group, plus the pairs that had to be
    skipped because a class was undefined."""

    group_name: str
    order: int
    class_e: int | None
    instances: tuple[HallInstance, ...]
    skipped: tuple[tuple[tuple[int, ...], str, str], ...]  # (key, label, reason)

    @property
    def violations(self) -> tuple[HallInstance, ...]:
        return tuple(inst for inst in self.instances if inst.violated)

    @property
    def chain_failures(self) -> tuple[HallInstance, ...]:
        return tuple(
            inst
            for inst in self.instances
            if inst.chain is not None and not inst.chain.valid
        )

    def to_json(self, with_chains: bool = True) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "bound-report",
            "group": self.group_name,
            "order": self.order,
            "class": self.class_e,
            "instances": [i.to_json(with_chain=with_chains) for i in self.instances],
            "skipped": [
                {"n_key": list(k), "n_label": lbl, "reason": r} for k, lbl, r in self.skipped
            ],
            "summary": {
                "instances": len(self.instances),
                "skipped": len(self.skipped),
                "violations": len(self.violations),
                "chain_failures": len(self.chain_failures),
                "tight": sum(1 for i in self.instances if i.tight),
            },
        }


SKIP_N_NOT_NILPOTENT = "N is not nilpotent"
SKIP_QUOTIENT_NOT_NILPOTENT = "E/[N,N] is not nilpotent"


def hall_instances(group: FiniteGroup, nl: NormalLattice | None = None) -> BoundReport:
    """Walk every normal subgroup N of the group: compute c = class(N) and
    d = class(E/[N,N]), record the bound instance (or the skip reason),
    and re-verify the whole descent chain on the lattice."""
    if nl is None:
        nl = nsub_semilattice(group)
    class_e = nilpotency_class(group)
    lat = nl.lattice
    top = nl.top

    d_cache: dict[tuple[int, ...], int | None] = {}
    instances: list[HallInstance] = []
    skipped: list[tuple[tuple[int, ...], str, str]] = []
    for idx, sub in enumerate(nl.subgroups):
        c = nilpotency_class_in(group, sub)
        if c is None:
            skipped.append((sub.key, sub.label(), SKIP_N_NOT_NILPOTENT))
            continue
        derived = commutator_subgroup(group, sub, sub)
        if derived.key in d_cache:
            d = d_cache[derived.key]
        else:
            d = nilpotency_class(quotient(group, derived))
            d_cache[derived.key] = d
        if d is None:
            skipped.append((sub.key, sub.label(), SKIP_QUOTIENT_NOT_NILPOTENT))
            continue
        if class_e is None:
            # c and d defined force E nilpotent; disagreeing means a bug
            raise ConsistencyError(
                f"{group.name}: classes c={c}, d={d} defined for N of order "
                f"{sub.order} but the group is not nilpotent"
            )
        chain = None
        if d >= 1:
            chain = check_descent_chain(
                lat, lat.dot[top], x=idx, y=top, m=d, max_k=c,
                f_label=f"dot({group.name}, -)",
            )
            closes = c == 0 or chain.steps[-1].rhs == nl.bottom
            chain = dataclasses.replace(chain, closes_at_bottom=closes)
        if c == 0:
            bound = None
            tight = False
        else:
            bound = c * d + (c - 1) * (d - 1)
            tight = class_e == bound
        instances.append(
            HallInstance(
                n_key=sub.key,
                n_label=sub.label(),
                n_order=sub.order,
                c=c,
                d=d,
                class_e=class_e,
                bound=bound,
                tight=tight,
                chain=chain,
            )
        )
    return BoundReport(
        group_name=group.name,
        order=group.order,
        class_e=class_e,
        instances=tuple(instances),
        skipped=tuple(skipped),
    )


def verify_chain(
    group: FiniteGroup,
    normal=None,
    nl: NormalLattice | None = None,
) -> ChainReport:
    """Descent chain for one (E, N): f = dot(E, -), g = dot(N, -), m = the
    class of E/[N,N], chain length the class of N.  `normal` may be a
    Subgroup, an iterable of element ids, or None for N = E."""
    if nl is None:
        nl = nsub_semilattice(group)
    if normal is None:
        sub = nl.subgroups[nl.top]
    elif isinstance(normal, Subgroup):
        if normal.group is not group:
            raise GroupError("subgroup belongs to a different group")
        sub = normal
    else:
        sub = subgroup_generated(group, normal)
    witness = normality_witness(group, sub)
    if witness is not None:
        g, x = witness
        raise NotNormalError(
            f"subgroup is not normal in {group.name}: conjugating "
            f"{group.element_name(x)} by {group.element_name(g)} leaves it",
            witness=witness,
        )
    c = nilpotency_class_in(group, sub)
    if c is None:
        raise GroupError(f"chain undefined: {SKIP_N_NOT_NILPOTENT}")
    derived = commutator_subgroup(group, sub, sub)
    d = nilpotency_class(quotient(group, derived))
    if d is None:
        raise GroupError(f"chain undefined: {SKIP_QUOTIENT_NOT_NILPOTENT}")

    lat = nl.lattice
    idx = nl.id_of(sub)
    chain = check_descent_chain(
        lat, lat.dot[nl.top], x=idx, y=nl.top, m=max(d, 1), max_k=c,
        f_label=f"dot({group.name}, -)",
    )
    closes = (
        chain.steps[-1].rhs == nl.bottom if chain.steps else nl.subgroups[idx].is_trivial()
    )
    return dataclasses.replace(chain, closes_at_bottom=closes)


# ---------------------------------------------------------------------------
# corpus scanning
# ---------------------------------------------------------------------------


def scan_one(spec: dict) -> dict:
    """Build one corpus group and summarise its bound report (compact,
    JSON-ready; chains are verified but only their validity is kept)."""
    group = group_from_spec(spec)
    nl = nsub_semilattice(group)
    report = hall_instances(group, nl)
    tight = [
        {"c": i.c, "d": i.d, "n_label": i.n_label, "n_order": i.n_order}
        for i in report.instances
        if i.tight
    ]
    return {
        "name": group.name,
        "order": group.order,
        "class": report.class_e,
        "normal_subgroups": len(nl.subgroups),
        "axioms": True,  # nsub_semilattice would have raised otherwise
        "instances": [
            [i.n_order, i.c, i.d, i.bound, int(i.tight), int(i.chain.valid if i.chain else True)]
            for i in report.instances
        ],
        "skipped": [[lbl, reason] for _, lbl, reason in report.skipped],
        "violations": [i.to_json(with_chain=False) for i in report.violations],
        "chain_failures": [i.to_json(with_chain=False) for i in report.chain_failures],
        "tight": tight,
    }


def sharpness_scan(per_group: list[dict], witness_cap: int = 8) -> dict:
    """Aggregate tightness: for each (c, d) seen, the bound, the largest
    class any instance reached, and up to witness_cap tight witnesses."""
    by_cd: dict[tuple[int, int], dict] = {}
    for row in per_group:
        for n_order, c, d, bound, tight, _chain in row["instances"]:
            if bound is None:
                continue
            cell = by_cd.setdefault(
                (c, d),
                {"c": c, "d": d, "bound": bound, "max_class": 0, "instances": 0,
                 "tight": False, "witnesses": []},
            )
            cell["instances"] += 1
            cell["max_class"] = max(cell["max_class"], row["class"])
            if tight:
                cell["tight"] = True
        for w in row["tight"]:
            cell = by_cd.get((w["c"], w["d"]))
            if cell is not None and len(cell["witnesses"]) < witness_cap:
                cell["witnesses"].append(
                    {"group": row["name"], "n_label": w["n_label"], "n_order": w["n_order"]}
                )
    rows = [by_cd[k] for k in sorted(by_cd)]
    return {"by_cd": rows}


def scan_groups(specs: list[dict], jobs: int = 1, max_order: int | None = None) -> dict:
    """Scan a corpus: one bound report per group, aggregated.  Groups over
    max_order are skipped (listed, not fatal), as are family builds that
    trip the order cap.  Output is deterministic for a fixed corpus no
    matter how many jobs run."""
    todo: list[dict] = []
    skipped_groups: list[dict] = []
    for spec in specs:
        order = spec.get("order")
        if max_order is not None and order is not None and order > max_order:
            skipped_groups.append(
                {"name": spec.get("name", "?"), "reason": f"order {order} exceeds max-order {max_order}"}
            )
            continue
        todo.append(spec)

    results: list[dict] = []
    if jobs > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcome = list(pool.map(_scan_worker, todo, chunksize=8))
    else:
        outcome = [_scan_worker(spec) for spec in todo]
    for spec, row in zip(todo, outcome):
        if isinstance(row, dict) and "skip_reason" in row:
            skipped_groups.append({"name": spec.get("name", "?"), "reason": row["skip_reason"]})
        else:
            if max_order is not None and row["order"] > max_order:
                skipped_groups.append(
                    {
                        "name": row["name"],
                        "reason": f"order {row['order']} exceeds max-order {max_order}",
                    }
                )
            else:
                results.append(row)

    totals = {
        "groups": len(results),
        "instances": sum(len(r["instances"]) for r in results),
        "skipped_pairs": sum(len(r["skipped"]) for r in results),
        "violations": sum(len(r["violations"]) for r in results),
        "chain_failures": sum(len(r["chain_failures"]) for r in results),
        "tight_instances": sum(row[4] for r in results for row in r["instances"]),
    }
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "scan-report",
        "totals": totals,
        "violations": [v for r in results for v in r["violations"]],
        "chain_failures": [v for r in results for v in r["chain_failures"]],
        "skipped_groups": skipped_groups,
        "sharpness": sharpness_scan(results),
        "per_group": results,
    }


def _scan_worker(spec: dict) -> dict:
    try:
        return scan_one(spec)
    except CapExceeded as exc:
        return {"skip_reason": str(exc)}
