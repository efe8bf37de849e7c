"""Batch entry point: axiom checks, bound verification, corpus scans,
chain traces, and randomized counterexample search.

Every command prints one JSON document to stdout.  Exit status: 0 when all
checked properties hold, 1 when a property failed (the JSON carries the
witnesses), 2 on input or usage errors (message on stderr).  Output is
deterministic for fixed inputs; --jobs never changes the bytes.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

from .calculus import check_descent_chain, check_iterate_products_all, iterate
from .families import group_from_spec
from .groups import FiniteGroup, GroupError, parse_cycles, subgroup_generated
from .lattice import (
    AxiomReport,
    CommutatorSemilattice,
    GenerationError,
    LatticeError,
    check_commutator_axioms,
    check_jacobi,
    check_join_semilattice,
    random_commutator_semilattice,
)
from .lattice import SCHEMA_VERSION
from .manifest import ManifestError, default_manifest_path, expand_manifest, load_manifest
from .verifier import (
    ConsistencyError,
    NotNormalError,
    hall_instances,
    nsub_semilattice,
    scan_groups,
    verify_chain,
)

_INT_RE = re.compile(r"-?\d+\Z")


class UsageError(Exception):
    """Bad input: unreadable file, malformed spec, out-of-cap group."""


def _emit(doc: dict, pretty: bool) -> None:
    if pretty:
        print(json.dumps(doc, indent=2))
    else:
        print(json.dumps(doc, separators=(",", ":")))


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _load_group(path: str, cap: int | None) -> FiniteGroup:
    doc = _load_json(path)
    if not isinstance(doc, dict) or "kind" not in doc:
        raise UsageError(f"{path} is not a group spec (no 'kind' field)")
    group = group_from_spec(doc)
    if cap is not None and group.order > cap:
        raise UsageError(f"{group.name} has order {group.order}, over the cap {cap}")
    return group


def _element_ids(group: FiniteGroup, tokens: list[str]) -> list[int]:
    """Generator tokens are element ids or cycle strings like '(1 2 3)'."""
    ids: list[int] = []
    by_image: dict[tuple[int, ...], int] | None = None
    for tok in tokens:
        text = tok.strip()
        if _INT_RE.match(text):
            g = int(text)
            if not 0 <= g < group.order:
                raise UsageError(f"element id {g} out of range [0, {group.order})")
            ids.append(g)
            continue
        if group.images is None:
            raise UsageError(
                f"{group.name} has no permutation realisation; pass element ids, not {tok!r}"
            )
        if by_image is None:
            by_image = {tuple(int(v) for v in row): i for i, row in enumerate(group.images)}
        try:
            image = parse_cycles(text, group.degree)
        except GroupError as exc:
            raise UsageError(str(exc)) from exc
        found = by_image.get(image)
        if found is None:
            raise UsageError(f"{tok!r} is not an element of {group.name}")
        ids.append(found)
    return ids


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_axioms(args: argparse.Namespace) -> int:
    doc = _load_json(args.input)
    if isinstance(doc, dict) and "join" in doc:
        try:
            lat = CommutatorSemilattice.from_fixture(doc)
        except LatticeError as exc:
            raise UsageError(str(exc)) from exc
        subject = {"source": "fixture", "carrier": lat.n}
    elif isinstance(doc, dict) and "kind" in doc:
        group = group_from_spec(doc)
        if args.cap is not None and group.order > args.cap:
            raise UsageError(f"{group.name} has order {group.order}, over the cap {args.cap}")
        try:
            lat = nsub_semilattice(group).lattice
        except ConsistencyError as exc:
            # normal-subgroup lattices satisfy the axioms mathematically,
            # so a failure here still reports like any other axiom failure
            out = {"subject": {"source": "group", "group": group.name}}
            if exc.report is not None:
                out.update(exc.report.to_json())
            else:
                out.update({"holds": False, "error": str(exc)})
            _emit(out, args.pretty)
            return 1
        subject = {"source": "group", "group": group.name, "carrier": lat.n}
    else:
        raise UsageError(f"{args.input} is neither a lattice fixture nor a group spec")

    checks = (
        check_join_semilattice(lat).checks
        + check_commutator_axioms(lat).checks
        + check_jacobi(lat).checks
    )
    report = AxiomReport(checks)
    out = {"subject": subject}
    out.update(report.to_json())
    _emit(out, args.pretty)
    return 0 if report.holds else 1


def cmd_verify(args: argparse.Namespace) -> int:
    group = _load_group(args.group, args.cap)
    nl = nsub_semilattice(group)
    report = hall_instances(group, nl)

    if args.normal is None:
        _emit(report.to_json(with_chains=args.chains), args.pretty)
        return 0 if not report.violations and not report.chain_failures else 1

    sub = subgroup_generated(group, _element_ids(group, args.normal))
    try:
        verify_chain(group, sub, nl)
    except NotNormalError as exc:
        g, x = exc.witness
        _emit(
            {
                "schema_version": SCHEMA_VERSION,
                "kind": "verify-report",
                "group": group.name,
                "error": str(exc),
                "witness": [g, x],
                "witness_names": [group.element_name(g), group.element_name(x)],
            },
            args.pretty,
        )
        return 1
    except GroupError:
        pass  # chain undefined: reported below through the skip list

    out = {
        "schema_version": SCHEMA_VERSION,
        "kind": "verify-report",
        "group": group.name,
        "order": group.order,
        "class": report.class_e,
    }
    for key, label, reason in report.skipped:
        if key == sub.key:
            out["skipped"] = {"n_label": label, "reason": reason}
            _emit(out, args.pretty)
            return 0
    inst = next(i for i in report.instances if i.n_key == sub.key)
    out["instance"] = inst.to_json(with_chain=True)
    _emit(out, args.pretty)
    ok = not inst.violated and (inst.chain is None or inst.chain.valid)
    return 0 if ok else 1


def cmd_scan(args: argparse.Namespace) -> int:
    try:
        manifest = load_manifest(args.manifest or default_manifest_path())
        specs = expand_manifest(manifest)
    except ManifestError as exc:
        raise UsageError(str(exc)) from exc
    report = scan_groups(specs, jobs=args.jobs, max_order=args.max_order)
    if not args.per_group:
        report.pop("per_group")
    _emit(report, args.pretty)
    totals = report["totals"]
    return 0 if totals["violations"] == 0 and totals["chain_failures"] == 0 else 1


def cmd_trace(args: argparse.Namespace) -> int:
    group = _load_group(args.group, args.cap)
    sub = subgroup_generated(group, _element_ids(group, args.normal))
    try:
        chain = verify_chain(group, sub)
    except NotNormalError as exc:
        g, x = exc.witness
        _emit(
            {
                "schema_version": SCHEMA_VERSION,
                "kind": "chain-report",
                "group": group.name,
                "error": str(exc),
                "witness": [g, x],
                "witness_names": [group.element_name(g), group.element_name(x)],
            },
            args.pretty,
        )
        return 1
    except GroupError as exc:
        raise UsageError(str(exc)) from exc

    doc = {"group": group.name, "order": group.order}
    doc.update(chain.to_json())
    _emit(doc, args.pretty)
    return 0 if chain.valid else 1


def _lattice_top(lat: CommutatorSemilattice) -> int:
    top = 0
    for e in range(lat.n):
        top = int(lat.join[top, e])
    return top


def _search_lattice(lat: CommutatorSemilattice, depth: int) -> list[dict]:
    """Conclusion failures on one lattice: iterate-product inequalities
    over every base point, and descent chains from the top wherever the
    initial-descent hypothesis can be met."""
    findings: list[dict] = []
    ip = check_iterate_products_all(lat, max_i=depth, max_j=depth)
    if not ip.holds:
        findings.append(
            {
                "kind": "iterate-products",
                "witnesses": [list(w) for w in ip.check("iterate-product").witnesses],
            }
        )
    top = _lattice_top(lat)
    f = lat.dot[top]
    for x in range(lat.n):
        target = int(lat.dot[x, x])
        m = None
        for cand in range(1, lat.n + 2):
            if lat.leq(iterate(lat, f, cand, top), target):
                m = cand
                break
        if m is None:
            continue
        chain = check_descent_chain(lat, f, x=x, y=top, m=m, max_k=depth)
        if chain.hypotheses_hold and not chain.valid:
            bad = [s for s in chain.steps if not s.holds]
            findings.append(
                {
                    "kind": "descent-chain",
                    "x": x,
                    "m": m,
                    "failed_steps": [s.to_json() for s in bad],
                }
            )
    return findings


def cmd_search(args: argparse.Namespace) -> int:
    enforce = not args.drop_jacobi
    findings: list[dict] = []
    sampled = 0
    generation_failures = 0
    jacobi_failures = 0
    for i in range(args.iters):
        seed = args.seed + i
        try:
            lat = random_commutator_semilattice(seed, args.size, enforce_jacobi=enforce)
        except GenerationError:
            generation_failures += 1
            continue
        sampled += 1
        jacobi = check_jacobi(lat).holds
        if not jacobi:
            jacobi_failures += 1
        for row in _search_lattice(lat, args.depth):
            row["seed"] = seed
            row["jacobi_holds"] = jacobi
            findings.append(row)
    _emit(
        {
            "schema_version": SCHEMA_VERSION,
            "kind": "search-report",
            "seed": args.seed,
            "size": args.size,
            "iters": args.iters,
            "depth": args.depth,
            "enforce_jacobi": enforce,
            "sampled": sampled,
            "generation_failures": generation_failures,
            "jacobi_failures": jacobi_failures,
            "findings": findings,
        },
        args.pretty,
    )
    # a conclusion failing on a lattice that DOES satisfy Jacobi would
    # contradict the theorems; failures without Jacobi are the point
    return 1 if any(row["jacobi_holds"] for row in findings) else 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hallbound",
        description="Verify the nilpotency bound class(E) <= c*d + (c-1)*(d-1) "
        "and its supporting lattice calculus on finite groups.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        fmt = p.add_mutually_exclusive_group()
        fmt.add_argument("--json", action="store_true", help="compact JSON (default)")
        fmt.add_argument("--pretty", action="store_true", help="indented JSON")

    p = sub.add_parser("axioms", help="check lattice axioms on a fixture or a group spec")
    p.add_argument("input", help="lattice fixture or group spec (JSON file)")
    p.add_argument("--cap", type=int, default=None, help="reject groups over this order")
    common(p)
    p.set_defaults(func=cmd_axioms)

    p = sub.add_parser("verify", help="check the bound on a group (all N, or one via --normal)")
    p.add_argument("group", help="group spec (JSON file)")
    p.add_argument(
        "--normal",
        nargs="+",
        default=None,
        metavar="GEN",
        help="generators of N: cycle strings like '(1 2 3)' or element ids",
    )
    p.add_argument("--cap", type=int, default=None, help="reject groups over this order")
    p.add_argument("--chains", action="store_true", help="include full chains in the report")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scan", help="verify the bound over a whole corpus manifest")
    p.add_argument("--manifest", default=None, help="corpus file (default: built-in)")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p.add_argument("--max-order", type=int, default=None, help="skip groups over this order")
    p.add_argument("--per-group", action="store_true", help="include per-group rows")
    common(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("trace", help="print the descent chain for one (E, N)")
    p.add_argument("group", help="group spec (JSON file)")
    p.add_argument("--normal", nargs="+", required=True, metavar="GEN")
    p.add_argument("--cap", type=int, default=None, help="reject groups over this order")
    common(p)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("search", help="sample random lattices and hunt for conclusion failures")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", type=int, default=6, help="lattice carrier size")
    p.add_argument("--iters", type=int, default=200, help="number of lattices to sample")
    p.add_argument("--depth", type=int, default=3, help="iterate/chain depth to check")
    p.add_argument(
        "--drop-jacobi",
        action="store_true",
        help="sample without requiring the Jacobi inequality",
    )
    common(p)
    p.set_defaults(func=cmd_search)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ManifestError, GroupError, LatticeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
