"""Normal-subgroup lattices, the nilpotency-bound instances, per-pair descent
chains, and the corpus scanner."""

import numpy as np
import pytest

from hallbound import families
from hallbound.calculus import iterate, step_bound
from hallbound.groups import (
    GroupError,
    Subgroup,
    group_from_table,
    nilpotency_class,
    subgroup_generated,
)
from hallbound.lattice import (
    check_commutator_axioms,
    check_jacobi,
    check_join_semilattice,
)
from hallbound.verifier import (
    BoundReport,
    NotNormalError,
    SKIP_N_NOT_NILPOTENT,
    SKIP_QUOTIENT_NOT_NILPOTENT,
    hall_instances,
    nsub_semilattice,
    scan_groups,
    scan_one,
    sharpness_scan,
    verify_chain,
)

import oracles


def spec_for(family_id, *params, name=None):
    doc = {"kind": "family", "family": {"id": family_id, "params": list(params)}}
    if name:
        doc["name"] = name
    return doc


# ---------------------------------------------------------------------------
# lattice construction
# ---------------------------------------------------------------------------


def test_s3_lattice_is_a_three_chain(s3):
    nl = nsub_semilattice(s3)
    assert [s.order for s in nl.subgroups] == [1, 3, 6]
    lat = nl.lattice
    assert lat.leq(0, 1) and lat.leq(1, 2)
    # [S3, S3] = A3 and [A3, A3] = 1
    assert lat.dot[2, 2] == 1
    assert lat.dot[1, 1] == 0
    assert lat.names[0] == "1"
    assert lat.names[2] == s3.name


def test_d4_lattice_shape(d4):
    nl = nsub_semilattice(d4)
    assert [s.order for s in nl.subgroups] == [1, 2, 4, 4, 4, 8]
    assert nl.subgroups[1].key == (0, 2)  # the center <r^2>
    lat = nl.lattice
    # derived subgroup is the center; order-4 subgroups join to the top
    assert lat.dot[5, 5] == 1
    assert lat.join[2, 3] == 5
    assert lat.dot[2, 3] == 1  # [<r>, <r^2, s>] = <r^2>
    # reflections alone are not normal, so no order-2 subgroup besides Z
    assert sum(1 for s in nl.subgroups if s.order == 2) == 1


def test_lattice_axioms_certified(q8, heis3, ut42):
    for group in (q8, heis3, ut42):
        lat = nsub_semilattice(group).lattice
        assert check_join_semilattice(lat).holds
        assert check_commutator_axioms(lat).holds
        assert check_jacobi(lat).holds


def test_trivial_group_lattice():
    nl = nsub_semilattice(group_from_table([[0]]))
    assert nl.top == nl.bottom == 0
    assert len(nl.subgroups) == 1


def test_bottom_and_top_are_extremes(q16):
    nl = nsub_semilattice(q16)
    lat = nl.lattice
    for i in range(lat.n):
        assert lat.leq(nl.bottom, i)
        assert lat.leq(i, nl.top)


def test_id_of_roundtrip_and_rejection(d4):
    nl = nsub_semilattice(d4)
    for i, sub in enumerate(nl.subgroups):
        assert nl.id_of(sub) == i
    with pytest.raises(GroupError, match="not normal"):
        nl.id_of(subgroup_generated(d4, [4]))


def test_join_is_subgroup_product(d4):
    # the lattice join of two normal subgroups is exactly their set product
    nl = nsub_semilattice(d4)
    table = d4.table
    for i, a in enumerate(nl.subgroups):
        for j, b in enumerate(nl.subgroups):
            prod = set(
                int(table[x, y]) for x in a.key for y in b.key
            )
            assert set(nl.subgroups[int(nl.lattice.join[i, j])].key) == prod


def test_dot_is_commutator_subgroup(q16):
    nl = nsub_semilattice(q16)
    raw = q16.table.tolist()
    for i, a in enumerate(nl.subgroups):
        for j, b in enumerate(nl.subgroups):
            want = oracles.commutator_subgroup_sets(raw, set(a.key), set(b.key))
            assert set(nl.subgroups[int(nl.lattice.dot[i, j])].key) == want


# ---------------------------------------------------------------------------
# bound instances
# ---------------------------------------------------------------------------


def test_c2_is_tight_at_the_smallest_cell():
    report = hall_instances(families.cyclic(2))
    nontrivial = [i for i in report.instances if i.c >= 1]
    assert len(nontrivial) == 1
    inst = nontrivial[0]
    assert (inst.c, inst.d, inst.bound, inst.class_e) == (1, 1, 1, 1)
    assert inst.tight and not inst.violated


def test_d4_instances(d4):
    report = hall_instances(d4)
    assert report.class_e == 2
    assert len(report.instances) == 6
    assert not report.skipped
    assert not report.violations
    assert not report.chain_failures

    by_key = {inst.n_key: inst for inst in report.instances}
    trivial = by_key[(0,)]
    assert (trivial.c, trivial.d, trivial.bound) == (0, 2, None)
    assert not trivial.tight and not trivial.violated

    full = by_key[tuple(range(8))]
    assert (full.c, full.d, full.bound) == (2, 1, 2)
    assert full.tight

    center = by_key[(0, 2)]
    assert (center.c, center.d, center.bound) == (1, 2, 2)
    assert center.tight

    # the three order-4 subgroups are abelian with D4 / 1 of class 2
    assert sum(1 for i in report.instances if i.tight) == 5


def test_s3_all_pairs_skipped(s3):
    report = hall_instances(s3)
    assert report.class_e is None
    assert not report.instances
    reasons = sorted(r for _, _, r in report.skipped)
    assert reasons == sorted(
        [SKIP_QUOTIENT_NOT_NILPOTENT, SKIP_QUOTIENT_NOT_NILPOTENT, SKIP_N_NOT_NILPOTENT]
    )


def test_every_normal_subgroup_accounted_once(d4, q8, q16, s3, heis3):
    for group in (d4, q8, q16, s3, heis3):
        nl = nsub_semilattice(group)
        report = hall_instances(group, nl)
        seen = [i.n_key for i in report.instances] + [k for k, _, _ in report.skipped]
        assert sorted(seen) == sorted(s.key for s in nl.subgroups)


def test_full_subgroup_instance_has_d_equal_one(d4, q8, q16, heis3, ut42):
    # N = E always lands in the d = 1 column, where the bound collapses to
    # the class itself and is therefore tight
    for group in (d4, q8, q16, heis3, ut42):
        report = hall_instances(group)
        full = next(i for i in report.instances if i.n_order == group.order)
        assert full.d == 1
        assert full.c == report.class_e
        assert full.bound == report.class_e
        assert full.tight


def test_d_matches_direct_quotient_computation(q16):
    from hallbound.groups import commutator_subgroup, quotient

    nl = nsub_semilattice(q16)
    report = hall_instances(q16, nl)
    for inst in report.instances:
        sub = next(s for s in nl.subgroups if s.key == inst.n_key)
        derived = commutator_subgroup(q16, sub, sub)
        q = quotient(q16, derived)
        assert oracles.nilpotency_class_raw(q.table.tolist()) == inst.d


def test_chains_verified_and_close_at_bottom(q8, q16, heis3, ut42):
    for group in (q8, q16, heis3, ut42):
        report = hall_instances(group)
        for inst in report.instances:
            if inst.chain is None:
                continue
            assert inst.chain.valid
            assert inst.chain.closes_at_bottom
            if inst.c >= 1:
                assert inst.chain.steps[-1].rhs == 0


def test_chain_rhs_is_lower_central_series_of_n(d4):
    # g = dot(N, -) iterated from N walks N's lower central series inside
    # the ambient lattice
    nl = nsub_semilattice(d4)
    report = hall_instances(d4, nl)
    full = next(i for i in report.instances if i.n_order == 8)
    lat = nl.lattice
    g = lat.dot[nl.id_of(nl.subgroups[-1])]
    assert iterate(lat, g, 2, nl.top) == 0  # gamma_3(D4) = 1
    assert [s.rhs for s in full.chain.steps] == [
        iterate(lat, g, k, nl.top) for k in (1, 2)
    ]


def test_step_counts_follow_the_bound_table(heis3):
    report = hall_instances(heis3)
    for inst in report.instances:
        if inst.chain is None or inst.c == 0:
            continue
        assert [s.t for s in inst.chain.steps] == [
            step_bound(k, inst.d) for k in range(1, inst.c + 1)
        ]


def test_report_json_shape(d4):
    doc = hall_instances(d4).to_json()
    assert doc["kind"] == "bound-report"
    assert doc["group"] == d4.name
    assert doc["summary"]["instances"] == 6
    assert doc["summary"]["violations"] == 0
    assert all("chain" in inst for inst in doc["instances"] if inst["c"] >= 0)
    slim = hall_instances(d4).to_json(with_chains=False)
    assert all("chain" not in inst for inst in slim["instances"])
    assert all(inst.get("chain_valid", True) for inst in slim["instances"])


def test_trivial_group_report():
    report = hall_instances(group_from_table([[0]]))
    assert report.class_e == 0
    assert len(report.instances) == 1
    inst = report.instances[0]
    assert (inst.c, inst.d, inst.bound) == (0, 0, None)
    assert inst.chain is None


# ---------------------------------------------------------------------------
# single chains
# ---------------------------------------------------------------------------


def test_verify_chain_d4_full(d4):
    chain = verify_chain(d4)  # N = E
    assert chain.valid
    assert chain.m == 1
    assert [s.t for s in chain.steps] == [1, 2]
    assert chain.closes_at_bottom
    assert chain.steps[-1].rhs == 0


def test_verify_chain_heis3_full(heis3):
    chain = verify_chain(heis3)
    assert chain.valid and chain.closes_at_bottom
    assert [(s.k, s.t) for s in chain.steps] == [(1, 1), (2, 2)]


def test_verify_chain_abelian_single_step():
    chain = verify_chain(families.cyclic(4))
    assert chain.valid
    assert len(chain.steps) == 1
    assert chain.steps[0].t == 1
    assert chain.closes_at_bottom


def test_verify_chain_accepts_element_ids(d4):
    chain = verify_chain(d4, [2])  # N = <r^2>, c = 1, d = 2
    assert chain.valid
    assert chain.m == 2
    assert [s.t for s in chain.steps] == [step_bound(1, 2)]


def test_verify_chain_accepts_subgroup_object(d4):
    sub = subgroup_generated(d4, [1])
    chain = verify_chain(d4, sub)
    assert chain.valid
    assert chain.m == 2


def test_verify_chain_trivial_n(d4):
    chain = verify_chain(d4, [])
    assert chain.valid
    assert chain.steps == ()
    assert chain.closes_at_bottom


def test_verify_chain_rejects_non_normal(d4):
    with pytest.raises(NotNormalError) as exc:
        verify_chain(d4, [4])
    g, x = exc.value.witness
    sub = subgroup_generated(d4, [4])
    assert sub.contains(x)
    assert not sub.contains(d4.mult(d4.mult(g, x), d4.inverse(g)))


def test_verify_chain_undefined_for_bad_quotient(s3):
    from hallbound.groups import element_order

    three_cycle = next(g for g in range(6) if element_order(s3, g) == 3)
    with pytest.raises(GroupError) as exc:
        verify_chain(s3, [three_cycle])
    assert SKIP_QUOTIENT_NOT_NILPOTENT in str(exc.value)


def test_verify_chain_undefined_for_non_nilpotent_n(s3):
    with pytest.raises(GroupError, match=SKIP_N_NOT_NILPOTENT):
        verify_chain(s3)


def test_verify_chain_rejects_foreign_subgroup(d4, q8):
    from hallbound.groups import full_subgroup

    with pytest.raises(GroupError, match="different group"):
        verify_chain(d4, full_subgroup(q8))


def test_verify_chain_reuses_prebuilt_lattice(q8):
    nl = nsub_semilattice(q8)
    a = verify_chain(q8, nl=nl)
    b = verify_chain(q8)
    assert a.valid == b.valid
    assert [(s.k, s.t, s.lhs, s.rhs) for s in a.steps] == [
        (s.k, s.t, s.lhs, s.rhs) for s in b.steps
    ]


# ---------------------------------------------------------------------------
# scanning
# ---------------------------------------------------------------------------


def test_scan_one_row_shape():
    row = scan_one(spec_for("d", 4, name="D4"))
    assert row["name"] == "D4"
    assert row["order"] == 8
    assert row["class"] == 2
    assert row["normal_subgroups"] == 6
    assert row["axioms"] is True
    assert len(row["instances"]) == 6
    assert all(len(inst) == 6 for inst in row["instances"])
    assert row["violations"] == []
    assert row["chain_failures"] == []
    assert {(w["c"], w["d"]) for w in row["tight"]} == {(1, 2), (2, 1)}


def test_scan_one_records_skips():
    row = scan_one(
        {
            "kind": "permutation",
            "name": "S3",
            "degree": 3,
            "generators": ["(1 2 3)", "(1 2)"],
        }
    )
    assert row["class"] is None
    assert row["instances"] == []
    assert len(row["skipped"]) == 3
    assert {reason for _, reason in row["skipped"]} == {
        SKIP_N_NOT_NILPOTENT,
        SKIP_QUOTIENT_NOT_NILPOTENT,
    }


def test_scan_groups_totals_and_determinism():
    specs = [
        spec_for("c", 12, name="C12"),
        spec_for("d", 4, name="D4"),
        spec_for("q", 8, name="Q8"),
        {
            "kind": "permutation",
            "name": "S3",
            "degree": 3,
            "generators": ["(1 2 3)", "(1 2)"],
        },
    ]
    single = scan_groups(specs, jobs=1)
    multi = scan_groups(specs, jobs=3)
    assert single == multi
    totals = single["totals"]
    assert totals["groups"] == 4
    assert totals["violations"] == 0
    assert totals["chain_failures"] == 0
    assert totals["skipped_pairs"] == 3  # all of S3's
    assert [r["name"] for r in single["per_group"]] == ["C12", "D4", "Q8", "S3"]


def test_scan_groups_max_order_skips():
    specs = [
        dict(spec_for("c", 4, name="C4"), order=4),
        dict(spec_for("q", 16, name="Q16"), order=16),
    ]
    out = scan_groups(specs, max_order=8)
    assert out["totals"]["groups"] == 1
    assert out["per_group"][0]["name"] == "C4"
    assert out["skipped_groups"] == [
        {"name": "Q16", "reason": "order 16 exceeds max-order 8"}
    ]


def test_scan_groups_max_order_without_hint():
    # specs with no order field are built first, then filtered
    specs = [spec_for("c", 4, name="C4"), spec_for("q", 16, name="Q16")]
    out = scan_groups(specs, max_order=8)
    assert out["totals"]["groups"] == 1
    assert out["skipped_groups"][0]["name"] == "Q16"


def test_sharpness_cells():
    rows = scan_groups(
        [spec_for("c", 2, name="C2"), spec_for("d", 4, name="D4")]
    )["sharpness"]["by_cd"]
    cells = {(r["c"], r["d"]): r for r in rows}
    assert cells[(1, 1)]["bound"] == 1 and cells[(1, 1)]["tight"]
    assert cells[(2, 1)]["bound"] == 2 and cells[(2, 1)]["tight"]
    assert cells[(1, 2)]["bound"] == 2 and cells[(1, 2)]["tight"]
    for row in rows:
        assert row["max_class"] <= row["bound"]
        assert row["witnesses"]


def test_sharpness_witness_cap():
    per_group = [scan_one(spec_for("c", 2, name=f"G{i}")) for i in range(12)]
    rows = sharpness_scan(per_group, witness_cap=5)["by_cd"]
    cell = next(r for r in rows if (r["c"], r["d"]) == (1, 1))
    assert cell["instances"] == 12
    assert len(cell["witnesses"]) == 5
