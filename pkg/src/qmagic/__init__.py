"""Quantum magic squares, quantum Latin squares and semiclassicality."""
from .construct import (
    CounterexampleBundle,
    build_counterexample,
    direct_sum,
    easy_qls,
    povm_latin,
    semiclassical_from_decomposition,
)
from .decompose import (
    MembershipVerdict,
    Status,
    bvn_decompose,
    purify_semiclassical,
    rank_one_semiclassical_test,
    semiclassical_membership,
    verify_semiclassical,
)
from .linalg import Tolerances, hermitian_eig, psd_check, psd_project
from .mconv import MatrixConvexCombination, combine, compress
from .squares import (
    Classification,
    LatinSquare,
    Permutation,
    QuantumLatinSquare,
    QuantumMagicSquare,
    SemiclassicalDecomposition,
    classify,
    qls_to_qms,
    qms_to_qls,
    verify_povm,
)

__version__ = "0.1.0"


__all__ = [
    "Classification",
    "CounterexampleBundle",
    "LatinSquare",
    "MatrixConvexCombination",
    "MembershipVerdict",
    "Permutation",
    "QuantumLatinSquare",
    "QuantumMagicSquare",
    "SemiclassicalDecomposition",
    "Status",
    "Tolerances",
    "build_counterexample",
    "bvn_decompose",
    "classify",
    "combine",
    "compress",
    "direct_sum",
    "easy_qls",
    "hermitian_eig",
    "povm_latin",
    "psd_check",
    "psd_project",
    "purify_semiclassical",
    "qls_to_qms",
    "qms_to_qls",
    "rank_one_semiclassical_test",
    "semiclassical_from_decomposition",
    "semiclassical_membership",
    "verify_povm",
    "verify_semiclassical",
]
