"""Degreewise homology of a windowed presentation over Z/p^N.

The coefficients model Z_p at precision N, so homology follows Z_p
semantics, not Z/p^N semantics.  Mod p^N the kernel of d_n acquires ghost
generators from diagonal SNF entries of valuation strictly between 0 and
N (they are Tor(H_(n-1), Z/p^N) terms); over Z_p those slots have zero
kernel.  The computation therefore keeps only the free kernel slots, and
verifies that boundary coordinates along non-free slots vanish to the
precision forced by d∘d = 0.

Each group is decomposed into cyclic factors Z/p^f with chosen cycle
representatives.  A factor whose annihilator exponent reaches N is
reported as free: finite precision cannot separate Z_p from Z/p^N, so
torsion is required to stay at exponent <= N - 2, leaving a one-power
margin; exponent N - 1 aborts and demands higher precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .dga import DgaPresentation, Element, is_cycle
from .errors import AxiomError, PrecisionError, WindowError
from .linalg import RingMatrix, smith_normal_form, solve_linear
from .padics import int_valuation

FREE = "free"


@dataclass(frozen=True)
class HomologyFactor:
    order_exponent: object  # int (torsion exponent) or FREE
    representative: Element

    @property
    def is_free(self) -> bool:
        return self.order_exponent == FREE


@dataclass
class HomologyGroup:
    degree: int
    factors: List[HomologyFactor]
    ambient: DgaPresentation
    # internals: free-slot kernel basis K = V0[:, free], V0^-1 for cycle
    # coordinates, and the relation transform T with class = (T y)_slots
    _free_cols: Tuple[int, ...] = ()
    _V0_inv: RingMatrix = None
    _K: RingMatrix = None
    _T: RingMatrix = None
    _slots: Tuple[int, ...] = ()
    _slot_exponents: Tuple[int, ...] = ()

    @property
    def is_trivial(self) -> bool:
        return not self.factors

    def factor_exponents(self) -> Tuple[object, ...]:
        return tuple(f.order_exponent for f in self.factors)

    def describe(self) -> str:
        if self.is_trivial:
            return "0"
        p = self.ambient.prime
        parts = []
        for f in self.factors:
            parts.append("Z_p" if f.is_free else f"Z/{p ** f.order_exponent}")
        return " + ".join(parts)


@dataclass(frozen=True)
class HomologyClass:
    degree: int
    coordinates: Tuple[int, ...]
    group: HomologyGroup

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coordinates)

    def __eq__(self, other) -> bool:
        return (isinstance(other, HomologyClass)
                and self.degree == other.degree
                and self.coordinates == other.coordinates)


def homology_group(A: DgaPresentation, n: int) -> HomologyGroup:
    """Cyclic decomposition of ker(d_n)/im(d_(n+1)) with Z_p semantics;
    deterministic given the SNF pivoting rule."""
    w = A.window
    if not (w.inner_min <= n <= w.inner_max):
        raise WindowError(f"degree {n} is a window boundary; homology not certified")
    p, N, q = A.prime, A.precision, A.modulus

    dn = A.diff_matrix(n)
    dn1 = A.diff_matrix(n + 1)
    if A.dim(n) == 0:
        return HomologyGroup(n, [], A)

    snf_n = smith_normal_form(dn)
    exps = snf_n.diagonal_exponents
    col_exponents = tuple(
        exps[j] if j < len(exps) else N for j in range(A.dim(n)))
    free_cols = tuple(j for j, e in enumerate(col_exponents) if e >= N)
    k = len(free_cols)
    if k == 0:
        return HomologyGroup(n, [], A)
    K = RingMatrix(snf_n.V.data[:, list(free_cols)], p, N)

    # boundary coordinates in the V0 basis: non-free rows must vanish to
    # the precision forced by d∘d = 0, free rows give the relations
    W = (snf_n.V_inv.data @ dn1.data) % q
    for j, e in enumerate(col_exponents):
        if e >= N:
            continue
        bad = W[j, :] % (p ** (N - e))
        if np.any(bad):
            raise AxiomError(
                f"boundaries violate d∘d = 0 at precision in degree {n}")
    rel = W[list(free_cols), :] if dn1.cols else np.zeros((k, 0), dtype=np.int64)
    snf_rel = smith_normal_form(RingMatrix(rel, p, N))

    rexps = list(snf_rel.diagonal_exponents)
    factors = []
    slots = []
    slot_exponents = []
    for i in range(k):
        f = rexps[i] if i < len(rexps) else N
        if f == 0:
            continue
        if f == N - 1:
            raise PrecisionError(
                f"torsion exponent {f} reaches N-1 in degree {n}; "
                f"raise precision above {N}")
        rep_vec = (K.data @ snf_rel.U_inv.data[:, i]) % q
        rep = A.element(n, rep_vec.tolist())
        factors.append(HomologyFactor(FREE if f >= N else f, rep))
        slots.append(i)
        slot_exponents.append(min(f, N))

    return HomologyGroup(n, factors, A, _free_cols=free_cols,
                         _V0_inv=snf_n.V_inv, _K=K,
                         _T=snf_rel.U, _slots=tuple(slots),
                         _slot_exponents=tuple(slot_exponents))


def class_of(A: DgaPresentation, z: Element,
             group: Optional[HomologyGroup] = None) -> HomologyClass:
    """Coordinates of [z] in the stored decomposition; boundaries map to 0.

    Ghost cycles (nonzero only because of truncation, i.e. lying in the
    non-free kernel slots) represent zero over Z_p and map to zero."""
    G = group or homology_group(A, z.degree)
    if not is_cycle(A, z):
        raise ValueError(f"element of degree {z.degree} is not a cycle")
    if G.is_trivial:
        return HomologyClass(z.degree, (), G)
    q = A.modulus
    y_full = (G._V0_inv.data @ (np.array(z.coords, dtype=np.int64) % q)) % q
    y = y_full[list(G._free_cols)]
    ty = (G._T.data @ y) % q
    coords = []
    for slot, f in zip(G._slots, G._slot_exponents):
        coords.append(int(ty[slot]) % (A.prime ** f))
    return HomologyClass(z.degree, tuple(coords), G)


def order_of(c: HomologyClass):
    """Least k with p^k * c = 0, or FREE when the class meets a free factor."""
    G = c.group
    p, N = G.ambient.prime, G.ambient.precision
    need = 0
    for coord, f in zip(c.coordinates, G.factors):
        if coord == 0:
            continue
        v = 0
        x = coord
        while x % p == 0:
            x //= p
            v += 1
        if f.is_free:
            return FREE
        need = max(need, f.order_exponent - v)
    return need


def cycle_section(G: HomologyGroup):
    """Additive section: lift class coordinates through the stored
    representatives.  class_of(s(c)) = c; discrepancies of sums are
    boundaries (coordinate wraparound hits p^f * rep, which bounds)."""
    A = G.ambient

    def s(c: HomologyClass) -> Element:
        out = A.zero_element(G.degree)
        for coord, f in zip(c.coordinates, G.factors):
            if coord:
                out = A.add(out, A.scale(coord, f.representative))
        return out

    return s


def section_of_class(c: HomologyClass) -> Element:
    return cycle_section(c.group)(c)


def class_in_subgroup(c: HomologyClass, gens: List[HomologyClass]) -> bool:
    """Membership of c in the subgroup generated by gens (all in one group).

    Mixed-modulus coordinates embed into Z/p^N by scaling each factor
    coordinate with p^(N-f); membership becomes a linear solve."""
    G = c.group
    A = G.ambient
    p, N, q = A.prime, A.precision, A.modulus
    r = len(G.factors)
    if r == 0:
        return True
    fs = [min(f.order_exponent, N) if not f.is_free else N for f in G.factors]

    def embed(cls):
        return [(coord * pow(p, N - f)) % q for coord, f in zip(cls.coordinates, fs)]

    if not gens:
        return c.is_zero()
    M = RingMatrix(np.array([embed(g) for g in gens], dtype=np.int64).T, p, N)
    return solve_linear(M, np.array(embed(c), dtype=np.int64)) is not None


# -- closed-form verification for the test dga -------------------------------


@dataclass
class TableRow:
    degree: int
    expected: str
    computed: str
    ok: bool


@dataclass
class TableReport:
    rows: List[TableRow]

    @property
    def passed(self) -> bool:
        return all(r.ok for r in self.rows)

    def render(self) -> str:
        width = max((len(r.expected) for r in self.rows), default=8)
        lines = ["deg | " + "expected".ljust(width) + " | computed | OK/FAIL"]
        for r in self.rows:
            lines.append(
                f"{r.degree:>3} | {r.expected.ljust(width)} | "
                f"{r.computed} | {'OK' if r.ok else 'FAIL'}")
        return "\n".join(lines)

    def machine(self):
        return [
            {"degree": r.degree, "expected": r.expected,
             "computed": r.computed, "ok": r.ok}
            for r in self.rows
        ]


def expected_factors_of_C(p: int, N: int, n: int) -> Tuple[object, ...]:
    """Closed form: Z_p in degrees 0 and -1, Z/p^(nu(m)+1) at (2p-2)m - 1
    for m != 0, trivial elsewhere."""
    if n in (0, -1):
        return (FREE,)
    period = 2 * p - 2
    if (n + 1) % period == 0:
        m = (n + 1) // period
        if m != 0:
            return (int_valuation(m, p) + 1,)
    return ()


def verify_homology_of_C(p: int, N: int, window, C: Optional[DgaPresentation] = None,
                         ) -> TableReport:
    from .dga import DegreeWindow, build_test_dga_C

    if not isinstance(window, DegreeWindow):
        window = DegreeWindow(*window)
    A = C if C is not None else build_test_dga_C(p, N, window)

    def fmt(exps):
        if not exps:
            return "0"
        return " + ".join("Z_p" if e == FREE else f"Z/{p ** e}" for e in exps)

    rows = []
    for n in window.inner():
        expected = expected_factors_of_C(p, N, n)
        computed = homology_group(A, n).factor_exponents()
        rows.append(TableRow(n, fmt(expected), fmt(computed), expected == computed))
    return TableReport(rows)
