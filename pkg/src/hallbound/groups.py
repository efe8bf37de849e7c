"""Finite groups as dense Cayley tables.

Groups are element-indexed: the carrier is {0, ..., n-1} with the identity
at index 0, multiplication a dense n x n table, and (when the group came
from permutations) an images array mapping each element to its point
images.  Everything downstream (subgroup closures, normal closures,
commutator subgroups, quotients) is worklist closure over table lookups,
vectorised with numpy since the tables are small and dense.
"""

from __future__ import annotations

import re

import numpy as np

ORDER_CAP = 2048
DEGREE_CAP = 32


class GroupError(ValueError):
    """Malformed input: bad table, bad permutation, failed precondition."""


class CapExceeded(GroupError):
    """Construction would pass the configured order or degree cap."""


# ---------------------------------------------------------------------------
# cycle notation
# ---------------------------------------------------------------------------

_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, degree: int) -> tuple[int, ...]:
    """Parse disjoint cycle notation like "(1 2 3)(4 5)" into a 0-based
    image tuple of length `degree`.  Points are 1-based and space
    separated; fixed points are omitted; "()" is the identity."""
    stripped = text.replace(" ", "").replace("\t", "")
    body = _CYCLE_RE.sub("", stripped)
    if body:
        raise GroupError(f"unparseable cycle text {text!r}")
    images = list(range(degree))
    seen: set[int] = set()
    for group in _CYCLE_RE.findall(text):
        points = group.split()
        if not points:
            continue
        try:
            pts = [int(p) - 1 for p in points]
        except ValueError:
            raise GroupError(f"non-numeric point in cycle {group!r}") from None
        for p in pts:
            if not 0 <= p < degree:
                raise GroupError(f"point {p + 1} outside degree {degree} in {text!r}")
            if p in seen:
                raise GroupError(f"point {p + 1} repeated in {text!r}")
            seen.add(p)
        for a, b in zip(pts, pts[1:] + pts[:1]):
            images[a] = b
    return tuple(images)


def render_cycles(images) -> str:
    """Inverse of parse_cycles; fixed points are omitted."""
    images = [int(v) for v in images]
    seen = [False] * len(images)
    parts = []
    for start in range(len(images)):
        if seen[start] or images[start] == start:
            seen[start] = True
            continue
        cycle = [start]
        seen[start] = True
        cur = images[start]
        while cur != start:
            cycle.append(cur)
            seen[cur] = True
            cur = images[cur]
        parts.append("(" + " ".join(str(p + 1) for p in cycle) + ")")
    return "".join(parts) if parts else "()"


# ---------------------------------------------------------------------------
# groups
# ---------------------------------------------------------------------------


class FiniteGroup:
    """A finite group given by its Cayley table (identity at index 0).

    The constructor trusts the table apart from cheap shape/identity/inverse
    sanity; use group_from_table for untrusted input, which also certifies
    associativity.
    """

    __slots__ = ("name", "table", "inv", "images", "_abelian", "_comm")

    def __init__(self, table, images=None, name: str = "G"):
        table = np.ascontiguousarray(table, dtype=np.int32)
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise GroupError(f"Cayley table must be square, got shape {table.shape}")
        n = table.shape[0]
        if n == 0:
            raise GroupError("empty group")
        if table.min() < 0 or table.max() >= n:
            raise GroupError(f"table entries must lie in [0, {n})")
        ar = np.arange(n, dtype=np.int32)
        if not (table[0] == ar).all() or not (table[:, 0] == ar).all():
            raise GroupError("element 0 is not a two-sided identity")
        # unique two-sided inverse per element; being off means the table
        # is not a group no matter what the caller claims
        inv = np.argmax(table == 0, axis=1).astype(np.int32)
        if not (table[inv, ar] == 0).all() or not (table[ar, inv] == 0).all():
            raise GroupError("some element has no two-sided inverse")
        table.setflags(write=False)
        inv.setflags(write=False)
        self.table = table
        self.inv = inv
        self.name = name
        if images is not None:
            images = np.ascontiguousarray(images, dtype=np.int32)
            if images.shape[0] != n:
                raise GroupError(f"expected {n} permutation images, got {images.shape[0]}")
            images.setflags(write=False)
        self.images = images
        self._abelian = None
        self._comm = None

    @property
    def order(self) -> int:
        return self.table.shape[0]

    @property
    def degree(self) -> int | None:
        return None if self.images is None else self.images.shape[1]

    def mult(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inverse(self, a: int) -> int:
        return int(self.inv[a])

    def is_abelian(self) -> bool:
        if self._abelian is None:
            self._abelian = bool((self.table == self.table.T).all())
        return self._abelian

    def comm_table(self) -> np.ndarray:
        """K[x, y] = x^-1 y^-1 x y, for every pair at once."""
        if self._comm is None:
            T, inv = self.table, self.inv
            K = T[T[inv[:, None], inv[None, :]], T]
            K.setflags(write=False)
            self._comm = K
        return self._comm

    def element_name(self, g: int) -> str:
        if self.images is not None:
            return render_cycles(self.images[g])
        return f"e{g}"

    def __repr__(self):
        return f"FiniteGroup({self.name!r}, order={self.order})"


def group_from_generators(
    generators,
    degree: int,
    name: str = "G",
    order_cap: int = ORDER_CAP,
    degree_cap: int = DEGREE_CAP,
) -> FiniteGroup:
    """Breadth-first closure of permutation generators under composition.

    Generators may be cycle-notation strings or 0-based image sequences.
    Elements are indexed in discovery order with the identity first, so
    the numbering is deterministic in the generator order.
    """
    if degree < 1:
        raise GroupError(f"degree must be >= 1, got {degree}")
    if degree > degree_cap:
        raise CapExceeded(f"degree {degree} exceeds cap {degree_cap}")

    gens: list[tuple[int, ...]] = []
    for g in generators:
        img = parse_cycles(g, degree) if isinstance(g, str) else tuple(int(v) for v in g)
        if len(img) != degree:
            raise GroupError(f"generator {g!r} has {len(img)} images, expected {degree}")
        if sorted(img) != list(range(degree)):
            raise GroupError(f"generator {g!r} is not a permutation (repeated image)")
        gens.append(img)

    ident = tuple(range(degree))
    index = {ident: 0}
    order: list[tuple[int, ...]] = [ident]
    frontier = [ident]
    while frontier:
        fresh = []
        for p in frontier:
            for g in gens:
                q = tuple(p[g[x]] for x in range(degree))
                if q not in index:
                    if len(order) >= order_cap:
                        raise CapExceeded(
                            f"closure of {name!r} exceeds order cap {order_cap}"
                        )
                    index[q] = len(order)
                    order.append(q)
                    fresh.append(q)
        frontier = fresh

    n = len(order)
    images = np.array(order, dtype=np.int32)
    table = np.empty((n, n), dtype=np.int32)
    lookup = {row.tobytes(): i for i, row in enumerate(images)}
    for i in range(n):
        composed = images[i][images]  # (n, degree): row j is el_i after el_j
        for j in range(n):
            table[i, j] = lookup[composed[j].tobytes()]
    return FiniteGroup(table, images=images, name=name)


def group_from_table(table, name: str = "G") -> FiniteGroup:
    """Validate an untrusted Cayley table: identity at 0, two-sided
    inverses, and full associativity (witness triple on failure)."""
    arr = np.ascontiguousarray(table, dtype=np.int32)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise GroupError(f"Cayley table must be square, got shape {arr.shape}")
    n = arr.shape[0]
    if n == 0:
        raise GroupError("empty group")
    if arr.min() < 0 or arr.max() >= n:
        raise GroupError(f"table entries must lie in [0, {n})")
    ar = np.arange(n, dtype=np.int32)
    if not (arr[0] == ar).all():
        bad = int(np.flatnonzero(arr[0] != ar)[0])
        raise GroupError(f"row 0 is not the identity: 0*{bad} = {int(arr[0, bad])}")
    if not (arr[:, 0] == ar).all():
        bad = int(np.flatnonzero(arr[:, 0] != ar)[0])
        raise GroupError(f"column 0 is not the identity: {bad}*0 = {int(arr[bad, 0])}")
    right = np.argmax(arr == 0, axis=1)
    left = np.argmax(arr.T == 0, axis=1)
    if not (arr[ar, right] == 0).all():
        bad = int(np.flatnonzero(arr[ar, right] != 0)[0])
        raise GroupError(f"element {bad} has no right inverse")
    if (right != left).any():
        bad = int(np.flatnonzero(right != left)[0])
        raise GroupError(
            f"element {bad} has mismatched inverses "
            f"(left {int(left[bad])}, right {int(right[bad])})"
        )
    # associativity, chunked so the (n, n, n) tensors stay bounded
    step = max(1, 2_000_000 // max(1, n * n))
    for lo in range(0, n, step):
        rows = arr[lo : lo + step]
        lhs = arr[rows]
        rhs = rows[:, arr]
        if (lhs != rhs).any():
            a, b, c = (int(v) for v in np.argwhere(lhs != rhs)[0])
            raise GroupError(
                f"not associative at ({a + lo},{b},{c}): "
                f"({a + lo}*{b})*{c} = {int(lhs[a, b, c])} but "
                f"{a + lo}*({b}*{c}) = {int(rhs[a, b, c])}"
            )
    return FiniteGroup(arr, name=name)


def direct_product(a: FiniteGroup, b: FiniteGroup, name: str | None = None) -> FiniteGroup:
    """External direct product; element (i, j) gets index i*|B| + j."""
    n1, n2 = a.order, b.order
    table = (
        a.table.astype(np.int64)[:, None, :, None] * n2
        + b.table.astype(np.int64)[None, :, None, :]
    ).reshape(n1 * n2, n1 * n2)
    images = None
    if a.images is not None and b.images is not None:
        d1 = a.images.shape[1]
        left = np.repeat(a.images, n2, axis=0)
        right = np.tile(b.images + d1, (n1, 1))
        images = np.concatenate([left, right], axis=1)
    return FiniteGroup(table, images=images, name=name or f"{a.name}x{b.name}")


# ---------------------------------------------------------------------------
# subgroups
# ---------------------------------------------------------------------------


class Subgroup:
    """Subgroup of a fixed parent, stored as a membership mask.

    The canonical key is the sorted tuple of member indices; two Subgroup
    objects compare equal iff they have the same parent and key.
    """

    __slots__ = ("group", "members", "key", "_normal")

    def __init__(self, group: FiniteGroup, members: np.ndarray, normal: bool | None = None):
        members = np.ascontiguousarray(members, dtype=bool)
        if members.shape != (group.order,):
            raise GroupError(
                f"membership mask has shape {members.shape}, expected ({group.order},)"
            )
        if not members[0]:
            raise GroupError("subgroup must contain the identity")
        order = int(members.sum())
        assert group.order % order == 0, "subgroup order must divide group order"
        members.setflags(write=False)
        self.group = group
        self.members = members
        self.key = tuple(int(v) for v in np.flatnonzero(members))
        self._normal = normal

    @classmethod
    def from_indices(cls, group: FiniteGroup, ids, normal: bool | None = None) -> "Subgroup":
        mask = np.zeros(group.order, dtype=bool)
        for i in ids:
            i = int(i)
            if not 0 <= i < group.order:
                raise GroupError(f"element id {i} out of range [0, {group.order})")
            mask[i] = True
        mask[0] = True
        return cls(group, mask, normal=normal)

    @property
    def order(self) -> int:
        return len(self.key)

    @property
    def elements(self) -> np.ndarray:
        return np.flatnonzero(self.members).astype(np.int32)

    def contains(self, g: int) -> bool:
        return bool(self.members[g])

    def is_trivial(self) -> bool:
        return self.order == 1

    def is_full(self) -> bool:
        return self.order == self.group.order

    def label(self) -> str:
        if self.is_trivial():
            return "1"
        if self.is_full():
            return self.group.name
        gens = generating_set(self)
        return "<" + ", ".join(self.group.element_name(g) for g in gens) + ">"

    def __eq__(self, other):
        return (
            isinstance(other, Subgroup)
            and self.group is other.group
            and self.key == other.key
        )

    def __hash__(self):
        return hash((id(self.group), self.key))

    def __repr__(self):
        return f"Subgroup(order={self.order} of {self.group.name!r})"


def _close_under_mult(group: FiniteGroup, ids: np.ndarray) -> np.ndarray:
    """Smallest multiplicatively closed superset containing the identity."""
    cur = np.unique(np.append(ids, 0)).astype(np.int32)
    while True:
        prods = np.unique(group.table[np.ix_(cur, cur)])
        if prods.size == cur.size:
            return cur
        cur = prods.astype(np.int32)


def subgroup_generated(group: FiniteGroup, gens) -> Subgroup:
    """Closure of the given element ids (finite, so inverses come free)."""
    ids = np.array([int(g) for g in gens], dtype=np.int32)
    if ids.size and (ids.min() < 0 or ids.max() >= group.order):
        raise GroupError(f"generator id out of range [0, {group.order})")
    members = _close_under_mult(group, ids)
    mask = np.zeros(group.order, dtype=bool)
    mask[members] = True
    return Subgroup(group, mask)


def generating_set(sub: Subgroup) -> list[int]:
    """Small (greedy, not minimal) generating set; empty for the trivial
    subgroup."""
    group = sub.group
    gens: list[int] = []
    have = np.array([0], dtype=np.int32)
    for g in sub.key:
        if g in have:
            continue
        gens.append(g)
        have = _close_under_mult(group, np.append(have, g))
        if have.size == sub.order:
            break
    return gens


def normality_witness(group: FiniteGroup, sub: Subgroup) -> tuple[int, int] | None:
    """(g, x) with x in the subgroup but g x g^-1 outside, or None."""
    els = sub.elements
    T, inv = group.table, group.inv
    conj = T[T[:, els], inv[:, None]]  # [g, j] = g * els[j] * g^-1
    bad = ~sub.members[conj]
    if not bad.any():
        return None
    g, j = (int(v) for v in np.argwhere(bad)[0])
    return g, int(els[j])


def is_normal(group: FiniteGroup, sub: Subgroup) -> bool:
    if sub._normal is None:
        sub._normal = normality_witness(group, sub) is None
    return sub._normal


def normal_closure(group: FiniteGroup, seeds) -> Subgroup:
    """Smallest normal subgroup containing the seed elements; alternates
    conjugation sweeps with multiplicative closure until stable."""
    cur = subgroup_generated(group, seeds)
    T, inv = group.table, group.inv
    while True:
        els = cur.elements
        conj = np.unique(T[T[:, els], inv[:, None]])
        if cur.members[conj].all():
            cur._normal = True
            return cur
        cur = subgroup_generated(group, np.union1d(els, conj))


def conjugacy_class_minima(group: FiniteGroup) -> np.ndarray:
    """For each element, the least element of its conjugacy class."""
    T, inv = group.table, group.inv
    conj = T[T, inv[:, None]]  # [g, x] = g x g^-1
    return conj.min(axis=0)


def all_normal_subgroups(group: FiniteGroup) -> list[Subgroup]:
    """Every normal subgroup, as the join closure of the normal closures
    of conjugacy class representatives.  Sorted by (order, key), so the
    trivial subgroup is first and the whole group last."""
    reps = np.unique(conjugacy_class_minima(group))
    found: dict[tuple, Subgroup] = {}
    trivial = Subgroup.from_indices(group, [], normal=True)
    found[trivial.key] = trivial
    fresh = [trivial]
    for r in reps:
        sub = normal_closure(group, [int(r)])
        if sub.key not in found:
            found[sub.key] = sub
            fresh.append(sub)

    # close under pairwise join; the product of two normal subgroups is
    # already a subgroup, no extra generation pass needed
    T = group.table
    full_mask = np.ones(group.order, dtype=bool)
    existing: list[Subgroup] = []
    while fresh:
        nxt = fresh.pop()
        for other in existing:
            if other.members[nxt.elements].all() or nxt.members[other.elements].all():
                continue
            prod = np.unique(T[np.ix_(nxt.elements, other.elements)])
            mask = np.zeros(group.order, dtype=bool)
            mask[prod] = True
            joined = Subgroup(group, mask, normal=True)
            if joined.key not in found:
                found[joined.key] = joined
                fresh.append(joined)
        existing.append(nxt)

    return sorted(found.values(), key=lambda s: (s.order, s.key))


def commutator_subgroup(group: FiniteGroup, a: Subgroup, b: Subgroup) -> Subgroup:
    """Subgroup generated by all commutators [x, y], x in a, y in b."""
    if a.group is not group or b.group is not group:
        raise GroupError("subgroups belong to a different group")
    K = group.comm_table()
    vals = np.unique(K[np.ix_(a.elements, b.elements)])
    members = _close_under_mult(group, vals)
    mask = np.zeros(group.order, dtype=bool)
    mask[members] = True
    normal = True if (is_normal(group, a) and is_normal(group, b)) else None
    return Subgroup(group, mask, normal=normal)


def product_subgroup(group: FiniteGroup, a: Subgroup, b: Subgroup) -> Subgroup:
    """The set product ab; requires it to be closed (which normality of
    either factor guarantees)."""
    if a.group is not group or b.group is not group:
        raise GroupError("subgroups belong to a different group")
    prod = np.unique(group.table[np.ix_(a.elements, b.elements)])
    trusted = (a._normal is True) or (b._normal is True)
    if not trusted:
        closure = np.unique(group.table[np.ix_(prod, prod)])
        if closure.size != prod.size:
            raise GroupError(
                f"product of subgroups {a.key} and {b.key} is not closed "
                "(neither factor is normal)"
            )
    mask = np.zeros(group.order, dtype=bool)
    mask[prod] = True
    normal = True if (a._normal is True and b._normal is True) else None
    return Subgroup(group, mask, normal=normal)


def quotient(group: FiniteGroup, sub: Subgroup, name: str | None = None) -> FiniteGroup:
    """Quotient by a normal subgroup, elements being cosets in order of
    their least representative (identity coset first)."""
    witness = normality_witness(group, sub)
    if witness is not None:
        g, x = witness
        raise GroupError(
            f"cannot quotient by non-normal subgroup: "
            f"conjugating element {x} by {g} leaves it"
        )
    T = group.table
    coset_of = np.full(group.order, -1, dtype=np.int32)
    reps: list[int] = []
    els = sub.elements
    for x in range(group.order):
        if coset_of[x] < 0:
            coset_of[T[x, els]] = len(reps)
            reps.append(x)
    reps_arr = np.array(reps, dtype=np.int32)
    qtable = coset_of[T[np.ix_(reps_arr, reps_arr)]]
    return FiniteGroup(qtable, name=name or f"{group.name}/{sub.label()}")


def full_subgroup(group: FiniteGroup) -> Subgroup:
    return Subgroup(group, np.ones(group.order, dtype=bool), normal=True)


def center(group: FiniteGroup) -> Subgroup:
    mask = (group.table == group.table.T).all(axis=1)
    return Subgroup(group, mask, normal=True)


def lower_central_series(group: FiniteGroup) -> list[Subgroup]:
    """G = T0 >= T1 >= ... with T(i+1) = [G, Ti], stopping when stable."""
    g_full = full_subgroup(group)
    series = [g_full]
    while True:
        nxt = commutator_subgroup(group, g_full, series[-1])
        if nxt.key == series[-1].key:
            return series
        series.append(nxt)


def nilpotency_class(group: FiniteGroup) -> int | None:
    """Length of the lower central series when it reaches the trivial
    subgroup; None when the series stalls above it."""
    series = lower_central_series(group)
    if series[-1].is_trivial():
        return len(series) - 1
    return None


def nilpotency_class_in(group: FiniteGroup, sub: Subgroup) -> int | None:
    """Nilpotency class of a subgroup, with commutators taken in the
    parent's table (same answer as re-tabulating the subgroup)."""
    cur = sub
    count = 0
    while not cur.is_trivial():
        nxt = commutator_subgroup(group, sub, cur)
        if nxt.key == cur.key:
            return None
        cur = nxt
        count += 1
    return count


def element_order(group: FiniteGroup, g: int) -> int:
    count = 1
    cur = int(g)
    while cur != 0:
        cur = int(group.table[cur, g])
        count += 1
    return count
