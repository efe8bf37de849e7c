"""Iterating derivations and verifying the descent inequalities.

The useful maps here all satisfy f(a) <= a, so iterating from any start
walks down a finite chain and stabilises; every loop below exits early at
the first fixed point.  `step_bound` is the bookkeeping for how many steps
of an outer map f are needed to fall below successive iterates of an inner
map g once the first descent (f^m(y) <= g(x)) is known.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import (
    AxiomCheck,
    AxiomReport,
    CommutatorSemilattice,
    SCHEMA_VERSION,
    _map_table,
)


def step_bound(k: int, m: int) -> int:
    """Iterations of f needed to descend below the k-th iterate of g,
    given that m iterations suffice for the first: k*m + (k-1)*(m-1)."""
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool):
        raise ValueError(f"k must be an integer, got {k!r}")
    if not isinstance(m, (int, np.integer)) or isinstance(m, bool):
        raise ValueError(f"m must be an integer, got {m!r}")
    if k < 1 or m < 1:
        raise ValueError(f"step_bound needs k >= 1 and m >= 1, got k={k}, m={m}")
    return int(k) * int(m) + (int(k) - 1) * (int(m) - 1)


@dataclass(frozen=True)
class IterationChain:
    """Successive values h^0(a), h^1(a), ... of a self-map.

    `values` stops at the first repeat (or at the requested length);
    `value_at(t)` extends it by constancy past the fixed point.
    """

    label: str
    base: int
    values: tuple[int, ...]
    fixed_from: int | None

    def value_at(self, t: int) -> int:
        if t < 0:
            raise ValueError(f"iteration count must be >= 0, got {t}")
        if t < len(self.values):
            return self.values[t]
        if self.fixed_from is None:
            raise ValueError(f"chain only computed up to t={len(self.values) - 1}")
        return self.values[-1]

    def to_json(self, lat: CommutatorSemilattice | None = None) -> dict:
        doc = {
            "label": self.label,
            "base": self.base,
            "values": list(self.values),
            "fixed_from": self.fixed_from,
        }
        if lat is not None:
            doc["names"] = [lat.name(v) for v in self.values]
        return doc


def iteration_chain(lat: CommutatorSemilattice, f, a: int, n: int, label: str = "f") -> IterationChain:
    """Walk a = h^0(a), h(a), ... up to n steps, stopping at a fixed point."""
    table = _map_table(lat, f)
    if n < 0:
        raise ValueError(f"iteration count must be >= 0, got {n}")
    a = lat.element(a)
    values = [a]
    fixed_from = None
    cur = a
    for _ in range(n):
        nxt = int(table[cur])
        if nxt == cur:
            fixed_from = len(values) - 1
            break
        values.append(nxt)
        cur = nxt
    else:
        # peek one step further so value_at can extrapolate when stable
        if int(table[cur]) == cur:
            fixed_from = len(values) - 1
    return IterationChain(label=label, base=a, values=tuple(values), fixed_from=fixed_from)


def iterate(lat: CommutatorSemilattice, f, n: int, a: int) -> int:
    """n-fold application of f to a."""
    return iteration_chain(lat, f, a, n).value_at(n)


def power_tables(lat: CommutatorSemilattice, f, max_n: int) -> np.ndarray:
    """Stack of iterated value tables: row t sends a to f^t(a)."""
    table = _map_table(lat, f)
    if max_n < 0:
        raise ValueError(f"iteration count must be >= 0, got {max_n}")
    out = np.empty((max_n + 1, lat.n), dtype=np.int32)
    out[0] = np.arange(lat.n, dtype=np.int32)
    for t in range(max_n):
        out[t + 1] = table[out[t]]
    return out


def check_iterate_products(
    lat: CommutatorSemilattice,
    x: int,
    max_i: int | None = None,
    max_j: int | None = None,
    max_witnesses: int = 8,
) -> AxiomReport:
    """On a Jacobi lattice the iterates of the inner map g = dot(x, -) absorb
    products: dot(g^i(x), g^j(x)) <= g^(i+j+1)(x).  Witnesses are (i, j).

    Defaults for max_i/max_j run until the iterates stabilise, which covers
    every distinct case.
    """
    x = lat.element(x)
    g = lat.dot[x]
    limit = max(v for v in (max_i, max_j, lat.n) if v is not None)
    chain = iteration_chain(lat, g, x, limit + limit + 1, label="g")
    # default range: up to the fixed point, which covers every distinct
    # iterate; cap at n for tables whose iterates cycle instead of settling
    top = chain.fixed_from if chain.fixed_from is not None else limit
    if max_i is None:
        max_i = top
    if max_j is None:
        max_j = top

    witnesses = []
    holds = True
    for i in range(max_i + 1):
        gi = chain.value_at(i)
        for j in range(max_j + 1):
            gj = chain.value_at(j)
            prod = int(lat.dot[gi, gj])
            bound = chain.value_at(i + j + 1)
            if not lat.leq(prod, bound):
                holds = False
                if len(witnesses) < max_witnesses:
                    witnesses.append((i, j))
    return AxiomReport(
        (AxiomCheck(axiom="iterate-product", holds=holds, witnesses=tuple(witnesses)),)
    )


def leibniz_bound(lat: CommutatorSemilattice, f, a: int, b: int, n: int) -> int:
    """join over i of dot(f^i(a), f^(n-i)(b)): the expansion that should
    dominate f^n(dot(a, b))."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    F = power_tables(lat, f, n)
    a, b = lat.element(a), lat.element(b)
    acc = None
    for i in range(n + 1):
        term = int(lat.dot[F[i, a], F[n - i, b]])
        acc = term if acc is None else int(lat.join[acc, term])
    return acc


def check_iterated_leibniz(
    lat: CommutatorSemilattice,
    f,
    a: int,
    b: int,
    max_n: int,
    max_witnesses: int = 8,
) -> AxiomReport:
    """Iterated Leibniz rule: f^n(dot(a, b)) <= join_i dot(f^i(a), f^(n-i)(b))
    for 0 <= n <= max_n.  Witnesses are the failing n values."""
    F = power_tables(lat, f, max_n)
    a, b = lat.element(a), lat.element(b)
    ab = int(lat.dot[a, b])

    witnesses = []
    holds = True
    for n in range(max_n + 1):
        lhs = int(F[n, ab])
        rhs = None
        for i in range(n + 1):
            term = int(lat.dot[F[i, a], F[n - i, b]])
            rhs = term if rhs is None else int(lat.join[rhs, term])
        if not lat.leq(lhs, rhs):
            holds = False
            if len(witnesses) < max_witnesses:
                witnesses.append((n,))
    return AxiomReport(
        (AxiomCheck(axiom="iterated-leibniz", holds=holds, witnesses=tuple(witnesses)),)
    )


def check_iterate_products_all(
    lat: CommutatorSemilattice, max_i: int, max_j: int, max_witnesses: int = 8
) -> AxiomReport:
    """check_iterate_products over every base point at once (vectorised).
    Witnesses are (x, i, j)."""
    D, J = lat.dot, lat.join
    n = lat.n
    depth = max_i + max_j + 1
    # S[t, x] = g_x^t(x) where g_x = dot(x, -)
    S = np.empty((depth + 1, n), dtype=np.int32)
    S[0] = np.arange(n, dtype=np.int32)
    for t in range(depth):
        S[t + 1] = D[S[0], S[t]]

    witnesses = []
    holds = True
    for i in range(max_i + 1):
        for j in range(max_j + 1):
            prod = D[S[i], S[j]]
            bound = S[i + j + 1]
            bad = J[prod, bound] != bound
            if bad.any():
                holds = False
                for x in np.flatnonzero(bad):
                    if len(witnesses) >= max_witnesses:
                        break
                    witnesses.append((int(x), i, j))
    return AxiomReport(
        (AxiomCheck(axiom="iterate-product", holds=holds, witnesses=tuple(witnesses)),)
    )


def check_iterated_leibniz_all(
    lat: CommutatorSemilattice, f, max_n: int, max_witnesses: int = 8
) -> AxiomReport:
    """check_iterated_leibniz over every pair (a, b) at once (vectorised).
    Witnesses are (a, b, n)."""
    F = power_tables(lat, f, max_n)
    D, J = lat.dot, lat.join

    witnesses = []
    holds = True
    for n in range(max_n + 1):
        lhs = F[n][D]
        rhs = None
        for i in range(n + 1):
            term = D[F[i][:, None], F[n - i][None, :]]
            rhs = term if rhs is None else J[rhs, term]
        bad = J[lhs, rhs] != rhs
        if bad.any():
            holds = False
            for a, b in np.argwhere(bad):
                if len(witnesses) >= max_witnesses:
                    break
                witnesses.append((int(a), int(b), n))
    return AxiomReport(
        (AxiomCheck(axiom="iterated-leibniz", holds=holds, witnesses=tuple(witnesses)),)
    )


HYPOTHESES = ("x-below-y", "initial-descent", "f-below-identity")


@dataclass(frozen=True)
class ChainStep:
    k: int
    t: int
    lhs: int  # f^t(y)
    rhs: int  # g^k(x)
    holds: bool

    def to_json(self, lat: CommutatorSemilattice | None = None) -> dict:
        doc = {"k": self.k, "t": self.t, "lhs": self.lhs, "rhs": self.rhs, "holds": self.holds}
        if lat is not None:
            doc["lhs_name"] = lat.name(self.lhs)
            doc["rhs_name"] = lat.name(self.rhs)
        return doc


@dataclass(frozen=True, eq=False)
class ChainReport:
    """Outcome of a descent-chain verification f^step_bound(k,m)(y) <= g^k(x).

    When a hypothesis fails the steps are not evaluated and `valid` is
    False with the culprit named in `failed_hypotheses`.
    """

    lattice: CommutatorSemilattice
    x: int
    y: int
    m: int
    max_k: int
    hypotheses: dict
    steps: tuple[ChainStep, ...]
    f_label: str = "f"
    g_label: str = "g"
    closes_at_bottom: bool | None = None

    @property
    def hypotheses_hold(self) -> bool:
        return all(self.hypotheses.values())

    @property
    def failed_hypotheses(self) -> tuple[str, ...]:
        return tuple(h for h in HYPOTHESES if not self.hypotheses[h])

    @property
    def valid(self) -> bool:
        return self.hypotheses_hold and all(s.holds for s in self.steps)

    def to_json(self) -> dict:
        lat = self.lattice
        doc = {
            "schema_version": SCHEMA_VERSION,
            "kind": "chain-report",
            "x": self.x,
            "x_name": lat.name(self.x),
            "y": self.y,
            "y_name": lat.name(self.y),
            "m": self.m,
            "max_k": self.max_k,
            "f": self.f_label,
            "g": self.g_label,
            "hypotheses": dict(self.hypotheses),
            "steps": [s.to_json(lat) for s in self.steps],
            "valid": self.valid,
        }
        if self.closes_at_bottom is not None:
            doc["closes_at_bottom"] = self.closes_at_bottom
        return doc


def check_descent_chain(
    lat: CommutatorSemilattice,
    f,
    x: int,
    y: int,
    m: int,
    max_k: int,
    f_label: str = "f",
) -> ChainReport:
    """Verify f^step_bound(k,m)(y) <= g^k(x) for k = 1..max_k, where
    g = dot(x, -), under the hypotheses x <= y, f^m(y) <= g(x), and
    f(a) <= a for every a."""
    F = _map_table(lat, f, "f")
    x, y = lat.element(x), lat.element(y)
    if not isinstance(m, (int, np.integer)) or isinstance(m, bool) or m < 1:
        raise ValueError(f"m must be an integer >= 1, got {m!r}")
    if max_k < 0:
        raise ValueError(f"max_k must be >= 0, got {max_k}")

    g = lat.dot[x]
    ar = np.arange(lat.n, dtype=np.int32)
    bounded = bool((lat.join[F, ar] == ar).all())
    fm_y = iterate(lat, F, int(m), y)
    hypotheses = {
        "x-below-y": lat.leq(x, y),
        "initial-descent": lat.leq(fm_y, int(g[x])),
        "f-below-identity": bounded,
    }

    steps: tuple[ChainStep, ...] = ()
    if all(hypotheses.values()) and max_k >= 1:
        t_max = step_bound(max_k, int(m))
        f_chain = iteration_chain(lat, F, y, t_max, label=f_label)
        g_chain = iteration_chain(lat, g, x, max_k, label="g")
        out = []
        for k in range(1, max_k + 1):
            t = step_bound(k, int(m))
            lhs = f_chain.value_at(t)
            rhs = g_chain.value_at(k)
            out.append(ChainStep(k=k, t=t, lhs=lhs, rhs=rhs, holds=lat.leq(lhs, rhs)))
        steps = tuple(out)

    return ChainReport(
        lattice=lat,
        x=x,
        y=y,
        m=int(m),
        max_k=int(max_k),
        hypotheses=hypotheses,
        steps=steps,
        f_label=f_label,
        g_label=f"dot({lat.name(x)}, -)",
    )
