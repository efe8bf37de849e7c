"""Brute-force verification of a nilpotency bound on finite groups.

If N is a normal subgroup of E with nilpotency class c, and E/[N,N] has
class d, then E is nilpotent of class at most c*d + (c-1)*(d-1).  The
machinery lives on the commutator semilattice of normal subgroups: join
is the subgroup product, dot is the commutator, and the bound falls out
of a descent chain of inequalities that this package checks one by one,
on every (E, N) pair a corpus of finite groups can offer.
"""

from .calculus import (
    ChainReport,
    ChainStep,
    check_descent_chain,
    check_iterate_products,
    check_iterate_products_all,
    check_iterated_leibniz,
    check_iterated_leibniz_all,
    iterate,
    iteration_chain,
    leibniz_bound,
    step_bound,
)
from .families import (
    cyclic,
    dihedral,
    family_group,
    group_from_spec,
    heisenberg,
    quaternion,
    unitriangular,
)
from .groups import (
    CapExceeded,
    FiniteGroup,
    GroupError,
    Subgroup,
    all_normal_subgroups,
    commutator_subgroup,
    direct_product,
    group_from_generators,
    group_from_table,
    nilpotency_class,
    nilpotency_class_in,
    normal_closure,
    quotient,
    subgroup_generated,
)
from .lattice import (
    AxiomCheck,
    AxiomReport,
    CommutatorSemilattice,
    Derivation,
    GenerationError,
    LatticeError,
    check_commutator_axioms,
    check_derivation,
    check_jacobi,
    check_join_semilattice,
    inner_derivation,
    random_commutator_semilattice,
)
from .manifest import ManifestError, default_manifest_path, expand_manifest, load_manifest
from .verifier import (
    BoundReport,
    ConsistencyError,
    HallInstance,
    NormalLattice,
    NotNormalError,
    hall_instances,
    nsub_semilattice,
    scan_groups,
    verify_chain,
)

__version__ = "0.1.0"

__all__ = [
    "AxiomCheck",
    "AxiomReport",
    "BoundReport",
    "CapExceeded",
    "ChainReport",
    "ChainStep",
    "CommutatorSemilattice",
    "ConsistencyError",
    "Derivation",
    "FiniteGroup",
    "GenerationError",
    "GroupError",
    "HallInstance",
    "LatticeError",
    "ManifestError",
    "NormalLattice",
    "NotNormalError",
    "Subgroup",
    "all_normal_subgroups",
    "check_commutator_axioms",
    "check_derivation",
    "check_descent_chain",
    "check_iterate_products",
    "check_iterate_products_all",
    "check_iterated_leibniz",
    "check_iterated_leibniz_all",
    "check_jacobi",
    "check_join_semilattice",
    "commutator_subgroup",
    "cyclic",
    "default_manifest_path",
    "dihedral",
    "direct_product",
    "expand_manifest",
    "family_group",
    "group_from_generators",
    "group_from_spec",
    "group_from_table",
    "hall_instances",
    "heisenberg",
    "inner_derivation",
    "iterate",
    "iteration_chain",
    "leibniz_bound",
    "load_manifest",
    "nilpotency_class",
    "nilpotency_class_in",
    "normal_closure",
    "nsub_semilattice",
    "quaternion",
    "quotient",
    "random_commutator_semilattice",
    "scan_groups",
    "step_bound",
    "subgroup_generated",
    "unitriangular",
    "verify_chain",
]
