"""Triple Massey products with exact sign conventions.

For classes α, β, γ with α·β = 0 = β·γ, represented by cycles a, b, c:
witnesses solve d(u) = (-1)^(1+|a|) a·b and d(v) = (-1)^(1+|b|) b·c, and
the bracket is the class of (-1)^(1+|u|) u·c + (-1)^(1+|a|) a·v, a coset
of the indeterminacy subgroup α·H_(|b|+|c|+1) + γ·H_(|a|+|b|+1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .dga import DgaPresentation, Element, differential, multiply
from .errors import BracketUndefinedError, WindowError, WitnessError
from .homology import (
    HomologyClass,
    HomologyGroup,
    class_in_subgroup,
    class_of,
    cycle_section,
    homology_group,
    section_of_class,
)
from .linalg import smith_normal_form, solve_linear


@dataclass
class MasseyResult:
    representative: HomologyClass
    indeterminacy_generators: List[HomologyClass]
    witnesses: Tuple[Element, Element]
    degree: int

    @property
    def indeterminacy_trivial(self) -> bool:
        return all(g.is_zero() for g in self.indeterminacy_generators)


def _solve_witness(A: DgaPresentation, rhs: Element, shift: Optional[Element]):
    """u with d(u) = rhs in degree |rhs| + 1; SNF-canonical particular
    solution, optionally shifted by a chosen cycle."""
    deg = rhs.degree + 1
    if deg > A.window.max_degree:
        raise WitnessError(
            f"witness degree {deg} outside window (window insufficiency)")
    M = A.diff_matrix(deg)
    x = solve_linear(M, np.array(rhs.coords, dtype=np.int64))
    if x is None:
        raise WitnessError(
            f"no chain u with d(u) = rhs in degree {deg} "
            "(precision or window insufficiency)")
    u = A.element(deg, x.tolist())
    if shift is not None:
        if shift.degree != deg:
            raise ValueError("witness shift has wrong degree")
        if not differential(A, shift).is_zero():
            raise ValueError("witness shift must be a cycle")
        u = A.add(u, shift)
    return u


def indeterminacy(A: DgaPresentation, alpha: HomologyClass, gamma: HomologyClass,
                  beta_degree: int,
                  groups: Optional[dict] = None) -> List[HomologyClass]:
    """Generators of α·H_(|b|+|c|+1) + γ·H_(|a|+|b|+1) inside the bracket
    degree's homology."""
    target_deg = alpha.degree + beta_degree + gamma.degree + 1
    groups = groups if groups is not None else {}

    def G(n) -> HomologyGroup:
        if n not in groups:
            groups[n] = homology_group(A, n)
        return groups[n]

    w = A.window
    for n in (target_deg, beta_degree + gamma.degree + 1,
              alpha.degree + beta_degree + 1):
        if not (w.inner_min <= n <= w.inner_max):
            raise WindowError(f"indeterminacy degree {n} outside inner window")

    target = G(target_deg)
    gens: List[HomologyClass] = []
    a = section_of_class(alpha)
    c = section_of_class(gamma)
    for h in G(beta_degree + gamma.degree + 1).factors:
        prod = multiply(A, a, h.representative)
        cls = class_of(A, prod, target)
        if not cls.is_zero():
            gens.append(cls)
    for h in G(alpha.degree + beta_degree + 1).factors:
        prod = multiply(A, c, h.representative)
        cls = class_of(A, prod, target)
        if not cls.is_zero():
            gens.append(cls)
    return gens


def triple_massey(A: DgaPresentation, alpha: HomologyClass, beta: HomologyClass,
                  gamma: HomologyClass,
                  witness_shifts: Tuple[Optional[Element], Optional[Element]] = (None, None),
                  groups: Optional[dict] = None) -> MasseyResult:
    """The triple Massey product <α, β, γ>; requires α·β = 0 and β·γ = 0."""
    groups = groups if groups is not None else {}

    def G(n) -> HomologyGroup:
        if n not in groups:
            groups[n] = homology_group(A, n)
        return groups[n]

    a = section_of_class(alpha)
    b = section_of_class(beta)
    c = section_of_class(gamma)
    da, db, dc = alpha.degree, beta.degree, gamma.degree

    ab = multiply(A, a, b)
    if not class_of(A, ab, G(da + db)).is_zero():
        raise BracketUndefinedError(
            f"bracket undefined: product of the first two classes is nonzero "
            f"in homology (degree {da + db})")
    bc = multiply(A, b, c)
    if not class_of(A, bc, G(db + dc)).is_zero():
        raise BracketUndefinedError(
            f"bracket undefined: product of the last two classes is nonzero "
            f"in homology (degree {db + dc})")

    sign_a = -1 if (1 + da) % 2 else 1
    sign_b = -1 if (1 + db) % 2 else 1
    u = _solve_witness(A, A.scale(sign_a, ab), witness_shifts[0])
    v = _solve_witness(A, A.scale(sign_b, bc), witness_shifts[1])

    # the stored witnesses satisfy the sign convention exactly
    assert differential(A, u).coords == A.scale(sign_a, ab).coords
    assert differential(A, v).coords == A.scale(sign_b, bc).coords

    sign_u = -1 if (1 + u.degree) % 2 else 1
    rep_chain = A.add(A.scale(sign_u, multiply(A, u, c)),
                      A.scale(sign_a, multiply(A, a, v)))
    target_deg = da + db + dc + 1
    rep = class_of(A, rep_chain, G(target_deg))
    gens = indeterminacy(A, alpha, gamma, db, groups)
    return MasseyResult(rep, gens, (u, v), target_deg)


def results_agree_mod_indeterminacy(r1: MasseyResult, r2: MasseyResult) -> bool:
    G = r1.representative.group
    A = G.ambient
    diff = HomologyClass(
        r1.degree,
        tuple(
            (x - y) % _factor_modulus(G, i)
            for i, (x, y) in enumerate(zip(r1.representative.coordinates,
                                           r2.representative.coordinates))),
        G)
    return class_in_subgroup(diff, r1.indeterminacy_generators)


def _factor_modulus(G: HomologyGroup, i: int) -> int:
    p, N = G.ambient.prime, G.ambient.precision
    f = G.factors[i].order_exponent
    return p ** (N if f == "free" else f)


# -- batch verification on the test dga --------------------------------------


@dataclass
class RelationRow:
    i: int
    j: int
    expected: str
    computed: str
    indet_size: int
    ok: bool


@dataclass
class RelationReport:
    rows: List[RelationRow]
    skipped: List[Tuple[int, int, str]]

    @property
    def passed(self) -> bool:
        return all(r.ok for r in self.rows)

    def render(self) -> str:
        lines = ["  i |  j | expected | computed | indet size | OK/FAIL"]
        for r in self.rows:
            lines.append(
                f"{r.i:>3} | {r.j:>3} | {r.expected:>8} | {r.computed:>8} | "
                f"{r.indet_size:>10} | {'OK' if r.ok else 'FAIL'}")
        for i, j, why in self.skipped:
            lines.append(f"{i:>3} | {j:>3} | skipped: {why}")
        return "\n".join(lines)

    def machine(self):
        return {
            "rows": [
                {"i": r.i, "j": r.j, "expected": r.expected,
                 "computed": r.computed, "indet_size": r.indet_size, "ok": r.ok}
                for r in self.rows
            ],
            "skipped": [{"i": i, "j": j, "reason": why} for i, j, why in self.skipped],
        }


def gamma_class(A: DgaPresentation, p: int, m: int,
                groups: Optional[dict] = None) -> HomologyClass:
    """γ_m := [-m · e·x^(m-1)], the order-p element of H_((2p-2)m - 1)."""
    if m == 0:
        raise ValueError("gamma_0 is undefined")
    deg = (2 * p - 2) * m - 1
    label = _ex_label(m - 1)
    z = A.scale(-m, A.element_from_label(deg, label))
    if groups is not None:
        if deg not in groups:
            groups[deg] = homology_group(A, deg)
        return class_of(A, z, groups[deg])
    return class_of(A, z)


def _ex_label(k: int) -> str:
    if k == 0:
        return "e"
    return f"e*x^{k}" if k != 1 else "e*x"


def p_unit_class(A: DgaPresentation, groups: Optional[dict] = None) -> HomologyClass:
    """The middle entry of the paper's brackets: p times the unit class,
    whose canonical chain representative is p · 1."""
    G = None
    if groups is not None:
        if 0 not in groups:
            groups[0] = homology_group(A, 0)
        G = groups[0]
    return class_of(A, A.scale(A.prime, A.unit_element()), G)


def verify_massey_relations_C(p: int, N: int, window, max_index: int,
                              C: Optional[DgaPresentation] = None) -> RelationReport:
    """<γ_i, p, γ_j> = γ_(i+j) with trivial indeterminacy, for all pairs
    with |i|, |j| <= max_index, i, j, i+j != 0 and degrees in the window."""
    from .dga import DegreeWindow, build_test_dga_C

    if not isinstance(window, DegreeWindow):
        window = DegreeWindow(*window)
    A = C if C is not None else build_test_dga_C(p, N, window)
    period = 2 * p - 2
    groups: dict = {}
    rows: List[RelationRow] = []
    skipped: List[Tuple[int, int, str]] = []

    def degrees_fit(i, j) -> bool:
        needed = [
            period * i - 1, period * j - 1, period * (i + j) - 1,  # classes
            period * i, period * j,                                # witnesses
            period * (i + j),                                      # indet degrees
        ]
        return all(window.inner_min <= d <= window.inner_max for d in needed)

    beta = None
    for i in range(-max_index, max_index + 1):
        for j in range(-max_index, max_index + 1):
            if i == 0 or j == 0 or i + j == 0:
                continue
            if not degrees_fit(i, j):
                skipped.append((i, j, "degrees outside inner window"))
                continue
            if beta is None:
                beta = p_unit_class(A, groups)
            gi = gamma_class(A, p, i, groups)
            gj = gamma_class(A, p, j, groups)
            expected = gamma_class(A, p, i + j, groups)
            res = triple_massey(A, gi, beta, gj, groups=groups)
            ok = (res.representative == expected) and res.indeterminacy_trivial
            rows.append(RelationRow(
                i, j,
                f"γ_{i + j}",
                "γ_{%d}" % (i + j) if res.representative == expected
                else str(res.representative.coordinates),
                len(res.indeterminacy_generators),
                ok))
    return RelationReport(rows, skipped)
