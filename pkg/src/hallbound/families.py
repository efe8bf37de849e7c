"""Built-in group families and the JSON group-spec loader.

Each family builds its Cayley table directly from the defining arithmetic
(that is much faster than closing generators) and attaches a faithful
permutation action: natural actions where there is an obvious one, the
left-regular action otherwise.
"""

from __future__ import annotations

import numpy as np

from .groups import (
    CapExceeded,
    FiniteGroup,
    GroupError,
    ORDER_CAP,
    direct_product,
    group_from_generators,
    group_from_table,
)


def cyclic(n: int, name: str | None = None) -> FiniteGroup:
    """C_n, acting on n points by rotation."""
    if n < 1:
        raise GroupError(f"cyclic order must be >= 1, got {n}")
    if n > ORDER_CAP:
        raise CapExceeded(f"cyclic order {n} exceeds cap {ORDER_CAP}")
    ar = np.arange(n, dtype=np.int64)
    table = (ar[:, None] + ar[None, :]) % n
    images = (ar[None, :] + ar[:, None]) % n
    return FiniteGroup(table, images=images, name=name or f"C{n}")


def dihedral(n: int, name: str | None = None) -> FiniteGroup:
    """D_n of order 2n: rotations and reflections of the n-gon.

    Element s*n + r is rotation-by-r composed with s reflections.  For
    n <= 2 the vertex action is not faithful, so those fall back to the
    regular action.
    """
    if n < 1:
        raise GroupError(f"dihedral parameter must be >= 1, got {n}")
    if 2 * n > ORDER_CAP:
        raise CapExceeded(f"dihedral order {2 * n} exceeds cap {ORDER_CAP}")
    r = np.arange(2 * n, dtype=np.int64) % n
    s = np.arange(2 * n, dtype=np.int64) // n
    sign = 1 - 2 * s  # +1 for rotations, -1 for reflections
    rr = (r[:, None] + sign[:, None] * r[None, :]) % n
    ss = (s[:, None] + s[None, :]) % 2
    table = ss * n + rr
    if n >= 3:
        pts = np.arange(n, dtype=np.int64)
        images = (r[:, None] + sign[:, None] * pts[None, :]) % n
    else:
        images = table  # regular action for the degenerate sizes
    return FiniteGroup(table, images=images, name=name or f"D{n}")


def quaternion(order: int, name: str | None = None) -> FiniteGroup:
    """Dicyclic group of the given order 4m (generalized quaternion when
    the order is a power of two): a of order 2m, b with b^2 = a^m and
    b a b^-1 = a^-1.  Element s*2m + i is a^i b^s."""
    if order < 8 or order % 4 != 0:
        raise GroupError(f"quaternion order must be a multiple of 4, >= 8, got {order}")
    if order > ORDER_CAP:
        raise CapExceeded(f"quaternion order {order} exceeds cap {ORDER_CAP}")
    m2 = order // 2
    i = np.arange(order, dtype=np.int64) % m2
    s = np.arange(order, dtype=np.int64) // m2
    sign = 1 - 2 * s
    ii = (i[:, None] + sign[:, None] * i[None, :]) % m2
    # b^2 = a^m kicks in when both factors carry a b
    ii = (ii + (s[:, None] & s[None, :]) * (m2 // 2)) % m2
    ss = (s[:, None] + s[None, :]) % 2
    table = ss * m2 + ii
    # left-regular action: row g of the table is a faithful permutation
    return FiniteGroup(table, images=table, name=name or f"Q{order}")


def heisenberg(p: int, name: str | None = None) -> FiniteGroup:
    """Upper unitriangular 3x3 matrices over F_p for p in {2, 3, 5},
    acting naturally on the p^3 column vectors."""
    if p not in (2, 3, 5):
        raise GroupError(f"heisenberg expects p in {{2, 3, 5}}, got {p}")
    n = p**3
    ids = np.arange(n, dtype=np.int64)
    x, y, z = ids // (p * p), (ids // p) % p, ids % p
    xx = (x[:, None] + x[None, :]) % p
    yy = (y[:, None] + y[None, :]) % p
    zz = (z[:, None] + z[None, :] + x[:, None] * y[None, :]) % p
    table = xx * p * p + yy * p + zz
    # action on vectors (v0, v1, v2): matrix [[1, x, z], [0, 1, y], [0, 0, 1]]
    v0, v1, v2 = x, y, z  # reuse the same digit decomposition for points
    w0 = (v0[None, :] + x[:, None] * v1[None, :] + z[:, None] * v2[None, :]) % p
    w1 = (v1[None, :] + y[:, None] * v2[None, :]) % p
    w2 = np.broadcast_to(v2[None, :], (n, n))
    images = w0 * p * p + w1 * p + w2
    return FiniteGroup(table, images=images, name=name or f"Heis{p}")


def unitriangular(n: int, p: int, name: str | None = None) -> FiniteGroup:
    """UT(n, p): upper unitriangular n x n matrices over F_p, for
    2 <= n <= 5 and p in {2, 3}; order p^(n(n-1)/2)."""
    if not 2 <= n <= 5:
        raise GroupError(f"unitriangular expects 2 <= n <= 5, got n={n}")
    if p not in (2, 3):
        raise GroupError(f"unitriangular expects p in {{2, 3}}, got {p}")
    slots = [(i, j) for i in range(n) for j in range(i + 1, n)]
    m = len(slots)
    count = p**m
    if count > ORDER_CAP:
        raise CapExceeded(f"UT({n},{p}) order {count} exceeds cap {ORDER_CAP}")

    digits = np.zeros((count, m), dtype=np.int64)
    ids = np.arange(count, dtype=np.int64)
    rem = ids
    for k in range(m - 1, -1, -1):
        digits[:, k] = rem % p
        rem = rem // p
    mats = np.tile(np.eye(n, dtype=np.int64), (count, 1, 1))
    for k, (i, j) in enumerate(slots):
        mats[:, i, j] = digits[:, k]

    weights = p ** np.arange(m - 1, -1, -1, dtype=np.int64)

    def encode(ms: np.ndarray) -> np.ndarray:
        digs = np.stack([ms[..., i, j] for (i, j) in slots], axis=-1)
        return digs @ weights

    table = np.empty((count, count), dtype=np.int64)
    step = max(1, 2_000_000 // (count * n * n))
    for lo in range(0, count, step):
        prod = np.einsum("aij,bjk->abik", mats[lo : lo + step], mats) % p
        table[lo : lo + step] = encode(prod)

    # natural action on the p^n column vectors
    vec_count = p**n
    vecs = np.zeros((vec_count, n), dtype=np.int64)
    rem = np.arange(vec_count, dtype=np.int64)
    for k in range(n - 1, -1, -1):
        vecs[:, k] = rem % p
        rem = rem // p
    vweights = p ** np.arange(n - 1, -1, -1, dtype=np.int64)
    moved = np.einsum("aij,vj->avi", mats, vecs) % p
    images = moved @ vweights
    return FiniteGroup(table, images=images, name=name or f"UT({n},{p})")


FAMILY_ALIASES = {
    "cyclic": "cyclic",
    "c": "cyclic",
    "dihedral": "dihedral",
    "d": "dihedral",
    "quaternion": "quaternion",
    "q": "quaternion",
    "heisenberg": "heisenberg",
    "heis": "heisenberg",
    "h": "heisenberg",
    "unitriangular": "unitriangular",
    "ut": "unitriangular",
    "product": "product",
}


def family_order(family: dict) -> int:
    """Order of the group a family spec would build, without building it.
    Parameter ranges are validated here too, so manifests fail fast."""
    fid, params = _family_fields(family)
    if fid == "cyclic":
        if params[0] < 1:
            raise GroupError(f"cyclic order must be >= 1, got {params[0]}")
        return params[0]
    if fid == "dihedral":
        if params[0] < 1:
            raise GroupError(f"dihedral parameter must be >= 1, got {params[0]}")
        return 2 * params[0]
    if fid == "quaternion":
        if params[0] < 8 or params[0] % 4 != 0:
            raise GroupError(
                f"quaternion order must be a multiple of 4, >= 8, got {params[0]}"
            )
        return params[0]
    if fid == "heisenberg":
        if params[0] not in (2, 3, 5):
            raise GroupError(f"heisenberg expects p in {{2, 3, 5}}, got {params[0]}")
        return params[0] ** 3
    if fid == "unitriangular":
        n, p = params
        if not 2 <= n <= 5:
            raise GroupError(f"unitriangular expects 2 <= n <= 5, got n={n}")
        if p not in (2, 3):
            raise GroupError(f"unitriangular expects p in {{2, 3}}, got {p}")
        return p ** (n * (n - 1) // 2)
    if fid == "product":
        total = 1
        for part in family["of"]:
            total *= family_order(part)
        return total
    raise GroupError(f"unknown family id {family.get('id')!r}")


def _family_fields(family: dict) -> tuple[str, list[int]]:
    if not isinstance(family, dict):
        raise GroupError(f"family spec must be an object, got {type(family).__name__}")
    raw = str(family.get("id", "")).lower()
    fid = FAMILY_ALIASES.get(raw)
    if fid is None:
        raise GroupError(f"unknown family id {family.get('id')!r}")
    if fid == "product":
        if not isinstance(family.get("of"), list) or len(family["of"]) < 2:
            raise GroupError("product family needs an 'of' list of at least two specs")
        return fid, []
    params = family.get("params", [])
    if not isinstance(params, list) or not all(isinstance(v, int) for v in params):
        raise GroupError(f"family params must be a list of integers, got {params!r}")
    expected = {"cyclic": 1, "dihedral": 1, "quaternion": 1, "heisenberg": 1, "unitriangular": 2}[fid]
    if len(params) != expected:
        raise GroupError(f"family {fid!r} expects {expected} parameter(s), got {params!r}")
    return fid, params


def family_group(family: dict, name: str | None = None) -> FiniteGroup:
    fid, params = _family_fields(family)
    if fid == "cyclic":
        return cyclic(params[0], name=name)
    if fid == "dihedral":
        return dihedral(params[0], name=name)
    if fid == "quaternion":
        return quaternion(params[0], name=name)
    if fid == "heisenberg":
        return heisenberg(params[0], name=name)
    if fid == "unitriangular":
        return unitriangular(params[0], params[1], name=name)
    # product: fold left
    parts = [family_group(part) for part in family["of"]]
    acc = parts[0]
    for part in parts[1:]:
        acc = direct_product(acc, part)
    if name:
        acc = FiniteGroup(acc.table, images=acc.images, name=name)
    return acc


def group_from_spec(doc: dict) -> FiniteGroup:
    """Build a group from its JSON spec: permutation generators, an
    explicit Cayley table, or a family reference."""
    if not isinstance(doc, dict):
        raise GroupError(f"group spec must be an object, got {type(doc).__name__}")
    kind = doc.get("kind")
    name = doc.get("name")
    if kind == "permutation":
        gens = doc.get("generators")
        degree = doc.get("degree")
        if not isinstance(gens, list):
            raise GroupError("permutation spec needs a 'generators' list")
        if not isinstance(degree, int) or degree < 1:
            raise GroupError(f"permutation spec needs a positive integer 'degree', got {degree!r}")
        return group_from_generators(gens, degree=degree, name=name or "G")
    if kind == "table":
        table = doc.get("table")
        if not isinstance(table, list):
            raise GroupError("table spec needs a 'table' field")
        return group_from_table(table, name=name or "G")
    if kind == "family":
        family = doc.get("family")
        if family is None:
            raise GroupError("family spec needs a 'family' field")
        return family_group(family, name=name)
    raise GroupError(f"unknown group spec kind {kind!r}")
