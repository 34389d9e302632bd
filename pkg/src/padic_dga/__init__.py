"""Computational engine for graded-commutative dgas over truncated p-adic
coefficients: exact linear algebra over Z/p^N, windowed dga presentations,
homology with cyclic decompositions, triple Massey products, and the
constructive quasi-isomorphism synthesizer with certification."""

from .padics import PAdicInt, padic_reduce, valuation, int_valuation
from .linalg import (
    RingMatrix,
    SnfDecomposition,
    smith_normal_form,
    solve_linear,
    kernel_generators,
)
from .dga import (
    DegreeWindow,
    GeneratorSpec,
    DgaPresentation,
    Element,
    build_free_cdga,
    build_test_dga_C,
    multiply,
    differential,
    check_dga_axioms,
    adjoin_cell,
    tensor_acyclic_pair,
    is_grounded,
)
from .homology import (
    FREE,
    HomologyGroup,
    HomologyClass,
    homology_group,
    class_of,
    order_of,
    cycle_section,
    verify_homology_of_C,
)
from .massey import (
    MasseyResult,
    triple_massey,
    indeterminacy,
    verify_massey_relations_C,
    gamma_class,
    p_unit_class,
)
from .rigidity import (
    DgaMorphism,
    SynthesisReport,
    CertReport,
    check_morphism,
    truncate_Q,
    kill_positive_homology,
    factor_mono_epi,
    pullback_normalize,
    synthesize_qiso,
    perturb_dga,
    is_normalized,
)
from .serialize import serialize_dga, parse_dga, parse_free_presentation

__all__ = [name for name in dir() if not name.startswith("_")]
