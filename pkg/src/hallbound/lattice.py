"""Finite join-semilattices carrying a commutator operation.

Everything is table-driven: a carrier {0, ..., n-1} with dense n x n join
and commutator tables.  The checkers scan all pairs/triples (vectorised,
chunked so memory stays bounded) and report violating tuples instead of
just a boolean, which is what makes counterexample hunting useful.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

SCHEMA_VERSION = 1

JOIN_AXIOMS = (
    "join-idempotent",
    "join-commutative",
    "join-associative",
    "leq-antisymmetric",
)
COMMUTATOR_AXIOMS = (
    "dot-commutative",
    "dot-bounded",
    "dot-join-distributive",
)
JACOBI_AXIOM = "jacobi"
DERIVATION_AXIOMS = (
    "preserves-joins",
    "leibniz",
)

# Rows per block when materialising (n, n, n) comparison tensors.
_CHUNK_CELLS = 2_000_000


class LatticeError(ValueError):
    """Bad element id, malformed table, or a failed construction check."""

    def __init__(self, message: str, report: "AxiomReport | None" = None):
        super().__init__(message)
        self.report = report


class GenerationError(LatticeError):
    """Random sampling exhausted its attempt budget."""


@dataclass(frozen=True)
class AxiomCheck:
    """Outcome for a single named law."""

    axiom: str
    holds: bool
    witnesses: tuple[tuple[int, ...], ...]

    def to_json(self) -> dict:
        return {
            "axiom": self.axiom,
            "holds": self.holds,
            "witnesses": [list(w) for w in self.witnesses],
        }


@dataclass(frozen=True)
class AxiomReport:
    """Bundle of per-axiom outcomes; holds iff every law held."""

    checks: tuple[AxiomCheck, ...]

    @property
    def holds(self) -> bool:
        return all(c.holds for c in self.checks)

    @property
    def witnesses(self) -> tuple[tuple[int, ...], ...]:
        return tuple(w for c in self.checks for w in c.witnesses)

    def failing(self) -> tuple[str, ...]:
        return tuple(c.axiom for c in self.checks if not c.holds)

    def check(self, axiom: str) -> AxiomCheck:
        for c in self.checks:
            if c.axiom == axiom:
                return c
        raise KeyError(axiom)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "axiom-report",
            "holds": self.holds,
            "checks": [c.to_json() for c in self.checks],
        }


def _as_table(values, n: int | None, what: str) -> np.ndarray:
    arr = np.ascontiguousarray(values, dtype=np.int32)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise LatticeError(f"{what} table must be square, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise LatticeError(f"{what} table is {arr.shape[0]}x{arr.shape[0]}, expected {n}")
    size = arr.shape[0]
    if size == 0:
        raise LatticeError("empty carrier")
    if arr.min(initial=0) < 0 or arr.max(initial=0) >= size:
        raise LatticeError(f"{what} table entries must lie in [0, {size})")
    arr.setflags(write=False)
    return arr


class CommutatorSemilattice:
    """Carrier {0..n-1} with explicit join and commutator ("dot") tables.

    The partial order is derived from join: a <= b iff join(a, b) == b.
    Construction only validates shapes and entry ranges; whether the
    tables actually satisfy the laws is the checkers' job.
    """

    __slots__ = ("n", "join", "dot", "names")

    def __init__(self, join, dot, names: Sequence[str] | None = None):
        self.join = _as_table(join, None, "join")
        self.n = self.join.shape[0]
        self.dot = _as_table(dot, self.n, "dot")
        if names is None:
            names = tuple(str(i) for i in range(self.n))
        else:
            names = tuple(str(s) for s in names)
            if len(names) != self.n:
                raise LatticeError(f"expected {self.n} names, got {len(names)}")
        self.names = names

    def __repr__(self):
        return f"CommutatorSemilattice(n={self.n})"

    def element(self, a: int) -> int:
        """Validate and normalise an element id."""
        a = int(a)
        if not 0 <= a < self.n:
            raise LatticeError(f"element id {a} out of range [0, {self.n})")
        return a

    def leq(self, a: int, b: int) -> bool:
        a, b = self.element(a), self.element(b)
        return int(self.join[a, b]) == b

    def bottom(self) -> int | None:
        """Least element, or None if the table has none."""
        expect = np.arange(self.n, dtype=np.int32)
        for a in range(self.n):
            if (self.join[a] == expect).all():
                return a
        return None

    def name(self, a: int) -> str:
        return self.names[self.element(a)]

    def to_fixture(self) -> dict:
        return {
            "carrier": self.n,
            "names": list(self.names),
            "join": self.join.tolist(),
            "dot": self.dot.tolist(),
        }

    @classmethod
    def from_fixture(cls, doc: dict) -> "CommutatorSemilattice":
        if not isinstance(doc, dict):
            raise LatticeError("lattice fixture must be a JSON object")
        try:
            join = doc["join"]
            dot = doc["dot"]
        except KeyError as exc:
            raise LatticeError(f"lattice fixture missing key {exc}") from None
        lat = cls(join, dot, doc.get("names"))
        carrier = doc.get("carrier")
        if carrier is not None and int(carrier) != lat.n:
            raise LatticeError(f"fixture says carrier {carrier} but tables are {lat.n}x{lat.n}")
        return lat


class _WitnessBin:
    """Collects violating index tuples in lexicographic order, up to a cap."""

    def __init__(self, cap: int):
        self.cap = cap
        self.items: list[tuple[int, ...]] = []
        self.ok = True

    def scan(self, bad: np.ndarray, offset: int = 0):
        # bad: boolean array over index tuples; leading axis may be offset.
        if not bad.any():
            return
        self.ok = False
        if len(self.items) >= self.cap:
            return
        idx = np.argwhere(bad)[: self.cap - len(self.items)]
        for row in idx:
            tup = tuple(int(v) for v in row)
            self.items.append((tup[0] + offset,) + tup[1:])

    def done(self, axiom: str) -> AxiomCheck:
        return AxiomCheck(axiom=axiom, holds=self.ok, witnesses=tuple(self.items))


def _chunks(n: int) -> Iterable[tuple[int, int]]:
    step = max(1, _CHUNK_CELLS // max(1, n * n))
    for lo in range(0, n, step):
        yield lo, min(n, lo + step)


def check_join_semilattice(lat: CommutatorSemilattice, max_witnesses: int = 8) -> AxiomReport:
    """Check idempotence, commutativity, associativity of join, and
    antisymmetry of the derived order.  Witnesses are element tuples."""
    J = lat.join
    n = lat.n
    ar = np.arange(n, dtype=np.int32)

    idem = _WitnessBin(max_witnesses)
    idem.scan(J[ar, ar] != ar)

    comm = _WitnessBin(max_witnesses)
    comm.scan(J != J.T)

    assoc = _WitnessBin(max_witnesses)
    for lo, hi in _chunks(n):
        rows = J[lo:hi]
        lhs = J[rows]            # (h, n, n): join(join(a, b), c)
        rhs = rows[:, J]         # (h, n, n): join(a, join(b, c))
        assoc.scan(lhs != rhs, offset=lo)

    # a <= b and b <= a with a != b can only happen when the table is broken.
    anti = _WitnessBin(max_witnesses)
    below = J == ar[None, :]
    anti.scan(below & below.T & ~np.eye(n, dtype=bool))

    return AxiomReport(
        (
            idem.done("join-idempotent"),
            comm.done("join-commutative"),
            assoc.done("join-associative"),
            anti.done("leq-antisymmetric"),
        )
    )


def check_commutator_axioms(lat: CommutatorSemilattice, max_witnesses: int = 8) -> AxiomReport:
    """Check the commutator laws on top of a valid join table:
    commutativity, dot(a, b) <= b, and distributivity over join."""
    J, D = lat.join, lat.dot
    n = lat.n
    ar = np.arange(n, dtype=np.int32)

    comm = _WitnessBin(max_witnesses)
    comm.scan(D != D.T)

    bounded = _WitnessBin(max_witnesses)
    bounded.scan(J[D, ar[None, :]] != ar[None, :])

    distrib = _WitnessBin(max_witnesses)
    for lo, hi in _chunks(n):
        rows = D[lo:hi]
        lhs = rows[:, J]                       # dot(a, join(b, c))
        rhs = J[rows[:, :, None], rows[:, None, :]]  # join(dot(a,b), dot(a,c))
        distrib.scan(lhs != rhs, offset=lo)

    return AxiomReport(
        (
            comm.done("dot-commutative"),
            bounded.done("dot-bounded"),
            distrib.done("dot-join-distributive"),
        )
    )


def check_jacobi(lat: CommutatorSemilattice, max_witnesses: int = 8) -> AxiomReport:
    """Check the Jacobi inequality
    dot(a, dot(b, c)) <= join(dot(dot(a, b), c), dot(b, dot(a, c)))."""
    J, D = lat.join, lat.dot
    n = lat.n

    bin_ = _WitnessBin(max_witnesses)
    for lo, hi in _chunks(n):
        rows = D[lo:hi]
        lhs = rows[:, D]                    # dot(a, dot(b, c))
        t1 = D[rows]                        # dot(dot(a, b), c)
        t2 = D[:, rows].transpose(1, 0, 2)  # dot(b, dot(a, c))
        rhs = J[t1, t2]
        bin_.scan(J[lhs, rhs] != rhs, offset=lo)

    return AxiomReport((bin_.done(JACOBI_AXIOM),))


def _map_table(lat: CommutatorSemilattice, f, what: str = "map") -> np.ndarray:
    if isinstance(f, Derivation):
        if f.lattice is not lat:
            raise LatticeError(f"{what} belongs to a different lattice")
        return f.table
    arr = np.ascontiguousarray(f, dtype=np.int32)
    if arr.shape != (lat.n,):
        raise LatticeError(f"{what} must be a length-{lat.n} value table, got shape {arr.shape}")
    if arr.size and (arr.min() < 0 or arr.max() >= lat.n):
        raise LatticeError(f"{what} table entries must lie in [0, {lat.n})")
    return arr


def check_derivation(lat: CommutatorSemilattice, f, max_witnesses: int = 8) -> AxiomReport:
    """Check that a self-map preserves joins and satisfies the Leibniz
    inequality f(dot(a, b)) <= join(dot(f(a), b), dot(a, f(b)))."""
    F = _map_table(lat, f)
    J, D = lat.join, lat.dot
    n = lat.n
    ar = np.arange(n, dtype=np.int32)

    joins = _WitnessBin(max_witnesses)
    joins.scan(F[J] != J[F[:, None], F[None, :]])

    leib = _WitnessBin(max_witnesses)
    lhs = F[D]
    rhs = J[D[F[:, None], ar[None, :]], D[ar[:, None], F[None, :]]]
    leib.scan(J[lhs, rhs] != rhs)

    return AxiomReport((joins.done("preserves-joins"), leib.done("leibniz")))


@dataclass(frozen=True, eq=False)
class Derivation:
    """A verified derivation, stored as its value table."""

    lattice: CommutatorSemilattice
    table: np.ndarray
    label: str = "f"

    def __call__(self, a: int) -> int:
        return int(self.table[self.lattice.element(a)])

    def is_bounded_by_identity(self) -> bool:
        ar = np.arange(self.lattice.n, dtype=np.int32)
        return bool((self.lattice.join[self.table, ar] == ar).all())

    @classmethod
    def checked(cls, lat: CommutatorSemilattice, table, label: str = "f") -> "Derivation":
        arr = _map_table(lat, table)
        report = check_derivation(lat, arr)
        if not report.holds:
            raise LatticeError(
                f"map {label!r} is not a derivation (failing: {', '.join(report.failing())})",
                report=report,
            )
        arr = arr.copy()
        arr.setflags(write=False)
        return cls(lattice=lat, table=arr, label=label)


def inner_derivation(lat: CommutatorSemilattice, x: int, label: str | None = None) -> Derivation:
    """The map dot(x, -).  Joins are preserved by distributivity; the
    Leibniz law is exactly the Jacobi inequality at x, so this raises
    (with the failing report attached) on non-Jacobi lattices."""
    x = lat.element(x)
    if label is None:
        label = f"dot({lat.name(x)}, -)"
    return Derivation.checked(lat, lat.dot[x], label=label)


# ---------------------------------------------------------------------------
# Random instances.
#
# The carrier is a family of subsets of a small ground set, closed under
# union and intersection and containing the empty set.  Closure under union
# makes the join table total; closure under intersection keeps the order
# distributive, so extending randomly chosen values on join-irreducible
# pairs bilinearly yields a commutator table satisfying commutativity,
# boundedness and distributivity by construction.  The Jacobi inequality is
# not automatic and is enforced by rejection when requested.
# ---------------------------------------------------------------------------


def _close_family(masks: set[int]) -> set[int]:
    fam = set(masks)
    fam.add(0)
    frontier = list(fam)
    while frontier:
        fresh = []
        for m in frontier:
            for other in list(fam):
                for combined in (m | other, m & other):
                    if combined not in fam:
                        fam.add(combined)
                        fresh.append(combined)
        frontier = fresh
    return fam


def _random_family(rng: random.Random, size: int, ground: int) -> list[int] | None:
    """Grow a union/intersection-closed family to exactly `size` members.

    Additions whose closure would overshoot are skipped; returns None when
    stuck so the caller can retry with fresh randomness.
    """
    fam = {0}
    stalls = 0
    while len(fam) < size:
        if stalls > 8 * ground + 16:
            return None
        m = rng.randrange(1, 1 << ground)
        if m in fam:
            stalls += 1
            continue
        grown = _close_family(fam | {m})
        if len(grown) > size:
            stalls += 1
            continue
        fam = grown
        stalls = 0
    return sorted(fam)


def _bilinear_dot(rng: random.Random, masks: list[int]) -> np.ndarray:
    """Random commutator table: choose values on join-irreducible pairs,
    below both arguments, and extend by joins."""
    n = len(masks)
    index = {m: i for i, m in enumerate(masks)}
    strictly_below = [[f for f in masks if f & m == f and f != m] for m in masks]

    irr = []
    for i, m in enumerate(masks):
        if m == 0:
            continue
        acc = 0
        for f in strictly_below[i]:
            acc |= f
        if acc != m:
            irr.append(m)

    # value on an irreducible pair: any family member under both arguments;
    # 0 is always available, which keeps the sampler total.
    val: dict[tuple[int, int], int] = {}
    for a in irr:
        for b in irr:
            if a > b:
                continue
            meet = a & b
            candidates = [m for m in masks if m & meet == m]
            val[(a, b)] = rng.choice(candidates)

    def value(p: int, q: int) -> int:
        return val[(p, q)] if p <= q else val[(q, p)]

    irr_below = [[p for p in irr if p & m == p] for m in masks]
    # partial[p][j] = join of value(p, q) over irreducible q below masks[j]
    partial = {}
    for p in irr:
        row = np.zeros(n, dtype=np.int64)
        for j, m in enumerate(masks):
            acc = 0
            for q in irr_below[j]:
                acc |= value(p, q)
            row[j] = acc
        partial[p] = row

    dot = np.zeros((n, n), dtype=np.int32)
    for i, m in enumerate(masks):
        acc = np.zeros(n, dtype=np.int64)
        for p in irr_below[i]:
            acc |= partial[p]
        dot[i] = [index[int(v)] for v in acc]
    return dot


def _mask_name(mask: int) -> str:
    if mask == 0:
        return "{}"
    bits = [str(b) for b in range(mask.bit_length()) if mask >> b & 1]
    return "{" + ",".join(bits) + "}"


def random_commutator_semilattice(
    seed: int,
    size: int,
    enforce_jacobi: bool = False,
    max_attempts: int = 400,
) -> CommutatorSemilattice:
    """Deterministically sample a commutator semilattice with `size` elements.

    With enforce_jacobi the sample is redrawn until check_jacobi passes;
    exhausting the budget raises GenerationError naming the blocking law.
    """
    if size < 1:
        raise LatticeError(f"size must be >= 1, got {size}")
    rng = random.Random(seed)
    if size == 1:
        return CommutatorSemilattice([[0]], [[0]], names=["{}"])

    ground = min(8, max(2, size - 1))
    blocked = "carrier-size"
    for _ in range(max_attempts):
        masks = _random_family(rng, size, ground)
        if masks is None:
            continue
        index = {m: i for i, m in enumerate(masks)}
        join = np.array(
            [[index[a | b] for b in masks] for a in masks], dtype=np.int32
        )
        dot = _bilinear_dot(rng, masks)
        lat = CommutatorSemilattice(join, dot, names=[_mask_name(m) for m in masks])
        if enforce_jacobi and not check_jacobi(lat, max_witnesses=1).holds:
            blocked = JACOBI_AXIOM
            continue
        return lat
    raise GenerationError(
        f"no valid sample in {max_attempts} attempts (blocking: {blocked})"
    )
