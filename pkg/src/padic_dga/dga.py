"""Degree-windowed graded-commutative dgas over Z/p^N.

A presentation stores, per window degree, an ordered basis, the
differential matrices C_n -> C_{n-1}, and sparse product structure
constants.  Products whose degree leaves the window are dropped and the
pair is recorded as a clip event; any operation that would need a clipped
product fails loudly rather than silently truncating.

The window's bottom degree has no outgoing differential; constructions
that extend a presentation treat it as zero (a brutal truncation), which
keeps every stored complex exact.  Homology is only certified on the
inner window, away from both boundary degrees.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from .errors import AxiomError, WindowError
from .linalg import RingMatrix
from .padics import require_precision

Monomial = Tuple[Tuple[str, int], ...]  # name-sorted, nonzero exponents
Expression = Dict[Monomial, int]

UNIT_MONOMIAL: Monomial = ()


@dataclass(frozen=True)
class DegreeWindow:
    min_degree: int
    max_degree: int

    def __post_init__(self):
        if not (self.min_degree <= 0 < self.max_degree):
            raise ValueError(
                f"window must satisfy min <= 0 < max, got "
                f"[{self.min_degree}, {self.max_degree}]"
            )

    def __contains__(self, n: int) -> bool:
        return self.min_degree <= n <= self.max_degree

    @property
    def inner_min(self) -> int:
        return self.min_degree + 1

    @property
    def inner_max(self) -> int:
        return self.max_degree - 1

    def inner(self) -> range:
        return range(self.inner_min, self.inner_max + 1)


@dataclass(frozen=True)
class GeneratorSpec:
    """A free algebra generator.  Invertible generators must sit in even
    degree: over Z_p with p odd, odd-degree elements square to zero."""

    name: str
    degree: int
    invertible: bool = False
    differential: Optional[object] = None  # Expression, str, or None

    def __post_init__(self):
        if self.degree == 0:
            raise ValueError(f"generator {self.name} must have nonzero degree")
        if self.invertible and self.degree % 2 != 0:
            raise ValueError(f"invertible generator {self.name} must have even degree")


@dataclass(frozen=True)
class Element:
    """Homogeneous chain: coordinates over the basis of one degree."""

    degree: int
    coords: Tuple[int, ...]

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)


def monomial_degree(mon: Monomial, degrees: Dict[str, int]) -> int:
    return sum(e * degrees[name] for name, e in mon)


def koszul_mul(m1: Monomial, m2: Monomial, degrees: Dict[str, int]):
    """Product of two monomials: (sign, monomial) or None when an odd
    generator repeats (odd squares vanish)."""
    odd1 = [name for name, _ in m1 if degrees[name] % 2]
    odd2 = [name for name, _ in m2 if degrees[name] % 2]
    if set(odd1) & set(odd2):
        return None
    inversions = sum(1 for a in odd1 for b in odd2 if a > b)
    sign = -1 if inversions % 2 else 1
    exps: Dict[str, int] = {}
    for name, e in m1:
        exps[name] = exps.get(name, 0) + e
    for name, e in m2:
        exps[name] = exps.get(name, 0) + e
    mon = tuple(sorted((n, e) for n, e in exps.items() if e != 0))
    return sign, mon


def expr_mul(e1: Expression, e2: Expression, degrees) -> Expression:
    out: Dict[Monomial, int] = {}
    for m1, c1 in e1.items():
        for m2, c2 in e2.items():
            r = koszul_mul(m1, m2, degrees)
            if r is None:
                continue
            s, mon = r
            out[mon] = out.get(mon, 0) + s * c1 * c2
    return {m: c for m, c in out.items() if c != 0}


def differential_of_monomial(mon: Monomial, dexprs: Dict[str, Expression],
                             degrees: Dict[str, int]) -> Expression:
    """Leibniz expansion d(g1^m1 ... gk^mk); d(g^m) = m g^(m-1) dg."""
    out: Dict[Monomial, int] = {}
    factors = list(mon)
    prefix_deg = 0
    for i, (name, m) in enumerate(factors):
        dg = dexprs.get(name)
        if dg:
            sign_prefix = -1 if prefix_deg % 2 else 1
            left = tuple(factors[:i]) + (((name, m - 1),) if m != 1 else ())
            right = tuple(factors[i + 1:])
            for dmon, coeff in dg.items():
                r1 = koszul_mul(left, dmon, degrees)
                if r1 is None:
                    continue
                s1, mid = r1
                r2 = koszul_mul(mid, right, degrees)
                if r2 is None:
                    continue
                s2, full = r2
                out[full] = out.get(full, 0) + sign_prefix * s1 * s2 * m * coeff
        prefix_deg += m * degrees[name]
    return {m_: c for m_, c in out.items() if c != 0}


def monomial_label(mon: Monomial) -> str:
    if not mon:
        return "1"
    parts = []
    for name, e in mon:
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


_TERM_RE = re.compile(r"^\s*([+-]?\d+)?\s*\*?\s*(.*)$")


def parse_expression(text: str) -> Expression:
    """Parse sums of terms "coeff*gen1^e1*gen2^e2"; bare "0" is empty."""
    text = text.strip()
    if text in ("", "0"):
        return {}
    # normalize: insert '+' before '-' signs that start a new term
    chunks = re.split(r"(?=[+-])", text.replace(" ", ""))
    out: Dict[Monomial, int] = {}
    for chunk in chunks:
        if not chunk:
            continue
        coeff = 1
        if chunk[0] == "+":
            chunk = chunk[1:]
        elif chunk[0] == "-":
            coeff = -1
            chunk = chunk[1:]
        exps: Dict[str, int] = {}
        for factor in chunk.split("*"):
            if not factor:
                continue
            if re.fullmatch(r"\d+", factor):
                coeff *= int(factor)
                continue
            m = re.fullmatch(r"([A-Za-z_][A-Za-z_0-9]*)(?:\^(-?\d+))?", factor)
            if not m:
                raise ValueError(f"cannot parse factor {factor!r}")
            name, e = m.group(1), int(m.group(2) or 1)
            exps[name] = exps.get(name, 0) + e
        mon = tuple(sorted((n, e) for n, e in exps.items() if e != 0))
        out[mon] = out.get(mon, 0) + coeff
    return {m: c for m, c in out.items() if c != 0}


class DgaPresentation:
    """Immutable-by-convention windowed dga.  Construct via the builders."""

    def __init__(self, prime, precision, window: DegreeWindow,
                 basis: Dict[int, Tuple[str, ...]],
                 diff: Dict[int, RingMatrix],
                 product: Dict[Tuple[int, int, int, int], Tuple[Tuple[int, int], ...]],
                 unit_index: int = 0,
                 clipped: Optional[set] = None,
                 clip_drop_count: int = 0):
        self.prime = prime
        self.precision = precision
        self.modulus = prime ** precision
        self.window = window
        self.basis = {n: tuple(labels) for n, labels in basis.items() if labels}
        self.diff = diff
        self.product = product
        self.unit_index = unit_index
        # pairs whose product lies at an in-window degree but cannot be
        # represented (lost to an earlier clip); consulting them fails loudly
        self.clipped = frozenset(clipped or ())
        # count of products dropped because their degree left the window
        self.clip_drop_count = clip_drop_count
        if self.dim(0) <= unit_index:
            raise ValueError("unit index outside degree-0 basis")
        self._index = {
            (n, lbl): i for n, labels in self.basis.items()
            for i, lbl in enumerate(labels)
        }

    # -- structure access ---------------------------------------------------

    def dim(self, n: int) -> int:
        return len(self.basis.get(n, ()))

    def labels(self, n: int) -> Tuple[str, ...]:
        return self.basis.get(n, ())

    def diff_matrix(self, n: int) -> RingMatrix:
        """Matrix of d: C_n -> C_{n-1}; zero when absent.  Only meaningful
        for n >= min_degree + 1."""
        if n in self.diff:
            return self.diff[n]
        return RingMatrix.zeros(self.dim(n - 1), self.dim(n), self.prime, self.precision)

    def unit_element(self) -> Element:
        coords = [0] * self.dim(0)
        coords[self.unit_index] = 1
        return Element(0, tuple(coords))

    def element(self, degree: int, coords: Iterable[int]) -> Element:
        coords = tuple(int(c) % self.modulus for c in coords)
        if len(coords) != self.dim(degree):
            raise ValueError(f"coordinate length {len(coords)} != dim {self.dim(degree)}"
                             f" in degree {degree}")
        return Element(degree, coords)

    def element_from_label(self, degree: int, label: str, coeff: int = 1) -> Element:
        idx = self._index[(degree, label)]
        coords = [0] * self.dim(degree)
        coords[idx] = coeff
        return self.element(degree, coords)

    def zero_element(self, degree: int) -> Element:
        return Element(degree, (0,) * self.dim(degree))

    def add(self, u: Element, v: Element) -> Element:
        if u.degree != v.degree:
            raise ValueError("degree mismatch")
        return self.element(u.degree, (a + b for a, b in zip(u.coords, v.coords)))

    def scale(self, c: int, u: Element) -> Element:
        return self.element(u.degree, (c * a for a in u.coords))

    # -- serialization helper ------------------------------------------------

    def product_entries(self):
        return self.product


def multiply(A: DgaPresentation, u: Element, v: Element) -> Element:
    """Bilinear product; fails loudly if the result degree leaves the
    window or a needed structure constant was clipped."""
    target = u.degree + v.degree
    if target not in A.window:
        raise WindowError(f"product degree {target} outside window")
    out = [0] * A.dim(target)
    for ia, ca in enumerate(u.coords):
        if ca == 0:
            continue
        for ib, cb in enumerate(v.coords):
            if cb == 0:
                continue
            key = (u.degree, ia, v.degree, ib)
            if key in A.clipped:
                raise WindowError(
                    f"product of ({u.degree},{ia}) and ({v.degree},{ib}) "
                    "depends on window-clipped data")
            for idx, coeff in A.product.get(key, ()):
                out[idx] = (out[idx] + ca * cb * coeff) % A.modulus
    return A.element(target, out)


def differential(A: DgaPresentation, u: Element) -> Element:
    if u.degree - 1 < A.window.min_degree:
        raise WindowError(f"differential leaves window at degree {u.degree}")
    return A.element(u.degree - 1, A.diff_matrix(u.degree).apply(np.array(u.coords)))


def is_cycle(A: DgaPresentation, u: Element) -> bool:
    """Cycle test; the bottom window degree has no outgoing differential
    and counts as cycles by the truncation convention."""
    if u.degree == A.window.min_degree:
        return True
    return differential(A, u).is_zero()


# -- free graded-commutative construction -----------------------------------


def _normalize_differentials(gens: List[GeneratorSpec]) -> Dict[str, Expression]:
    out: Dict[str, Expression] = {}
    for g in gens:
        d = g.differential
        if d is None:
            continue
        if isinstance(d, str):
            expr = parse_expression(d)
        else:
            expr = dict(d)
        if expr:
            out[g.name] = expr
    return out


def _enumerate_monomials(gens: List[GeneratorSpec], window: DegreeWindow):
    """All monomials with degree in the window, grouped by degree.

    Finiteness demands at most one invertible generator and no mixing of
    invertible generators with non-invertible even ones (otherwise a fixed
    degree holds infinitely many monomials)."""
    invertibles = [g for g in gens if g.invertible]
    odds = [g for g in gens if g.degree % 2 != 0]
    evens = [g for g in gens if not g.invertible and g.degree % 2 == 0]
    if len(invertibles) > 1:
        raise ValueError("at most one invertible generator is supported "
                         "(basis would be infinite per degree)")
    if invertibles and evens:
        raise ValueError("mixing an invertible generator with non-invertible "
                         "even generators gives an infinite basis per degree")

    lo, hi = window.min_degree, window.max_degree
    partials = [(UNIT_MONOMIAL, 0)]
    for g in odds:
        partials = [(mon, d) for mon, d in partials] + [
            (tuple(sorted(mon + ((g.name, 1),))), d + g.degree) for mon, d in partials
        ]
    for g in evens:
        new = []
        for mon, d in partials:
            k = 0
            while True:
                nd = d + k * g.degree
                if (g.degree > 0 and nd > hi) or (g.degree < 0 and nd < lo):
                    break
                new.append((tuple(sorted(mon + ((g.name, k),))) if k else mon, nd))
                k += 1
        partials = new

    by_degree: Dict[int, List[Monomial]] = {}

    def put(mon, d):
        if lo <= d <= hi:
            by_degree.setdefault(d, []).append(mon)

    if invertibles:
        x = invertibles[0]
        for mon, d in partials:
            # all integer exponents m with d + m*|x| in window
            m_lo = -((d - lo) // x.degree)
            m_hi = (hi - d) // x.degree
            for m in range(m_lo, m_hi + 1):
                nm = tuple(sorted(mon + ((x.name, m),))) if m != 0 else mon
                put(nm, d + m * x.degree)
    else:
        for mon, d in partials:
            put(mon, d)

    for d in by_degree:
        by_degree[d].sort()
    return by_degree


def build_free_cdga(gens: List[GeneratorSpec], p: int, N: int,
                    window: DegreeWindow) -> DgaPresentation:
    """Free graded-commutative dga on the given generators, restricted to
    the window; differentials extend by the Leibniz rule."""
    degrees = {g.name: g.degree for g in gens}
    dexprs = _normalize_differentials(gens)
    for g in gens:
        if g.name in dexprs:
            dd = monomial_degree(next(iter(dexprs[g.name])), degrees)
            for mon in dexprs[g.name]:
                if monomial_degree(mon, degrees) != dd or dd != g.degree - 1:
                    raise ValueError(
                        f"differential of {g.name} must be homogeneous of "
                        f"degree {g.degree - 1}")

    by_degree = _enumerate_monomials(gens, window)
    by_degree.setdefault(0, [UNIT_MONOMIAL])
    index = {(d, mon): i for d, mons in by_degree.items() for i, mon in enumerate(mons)}

    q = p ** N
    diff: Dict[int, RingMatrix] = {}
    for n, mons in sorted(by_degree.items()):
        if n - 1 < window.min_degree:
            continue
        rows = len(by_degree.get(n - 1, []))
        if rows == 0 or not mons:
            continue
        M = np.zeros((rows, len(mons)), dtype=np.int64)
        nontrivial = False
        for j, mon in enumerate(mons):
            for tmon, coeff in differential_of_monomial(mon, dexprs, degrees).items():
                i = index.get((n - 1, tmon))
                if i is None:
                    raise AxiomError(
                        f"differential of {monomial_label(mon)} leaves the "
                        f"enumerated basis in degree {n - 1}")
                M[i, j] = (M[i, j] + coeff) % q
                nontrivial = True
        if nontrivial:
            diff[n] = RingMatrix(M, p, N)

    product: Dict[Tuple[int, int, int, int], Tuple[Tuple[int, int], ...]] = {}
    drops = 0
    degs = sorted(by_degree)
    for da in degs:
        for db in degs:
            target = da + db
            for ia, ma in enumerate(by_degree[da]):
                for ib, mb in enumerate(by_degree[db]):
                    r = koszul_mul(ma, mb, degrees)
                    if r is None:
                        continue
                    sign, mon = r
                    if target not in window:
                        drops += 1
                        continue
                    idx = index.get((target, mon))
                    if idx is None:
                        raise AxiomError("product escaped enumerated basis")
                    product[(da, ia, db, ib)] = ((idx, sign % q),)

    basis = {d: tuple(monomial_label(m) for m in mons) for d, mons in by_degree.items()}
    A = DgaPresentation(p, N, window, basis, diff, product,
                        unit_index=by_degree[0].index(UNIT_MONOMIAL),
                        clip_drop_count=drops)
    report = check_dga_axioms(A)
    if not report.ok:
        raise AxiomError("free cdga failed axiom check: " + report.violations[0][1])
    return A


def build_test_dga_C(p: int, N: int, window: DegreeWindow) -> DgaPresentation:
    """The Laurent-exterior test dga: x invertible in degree 2p-2, e in
    degree 2p-3, d(x) = p*e.  Basis has at most one monomial per degree."""
    require_precision(p, N, window.min_degree, window.max_degree)
    gens = [
        GeneratorSpec("e", 2 * p - 3),
        GeneratorSpec("x", 2 * p - 2, invertible=True,
                      differential={(("e", 1),): p}),
    ]
    return build_free_cdga(gens, p, N, window)


# -- axiom checking ----------------------------------------------------------


@dataclass
class AxiomReport:
    violations: List[Tuple[str, str]] = field(default_factory=list)
    skipped_clipped: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def render(self) -> str:
        if self.ok:
            return "axioms: all pass"
        return "\n".join(f"{kind}: {msg}" for kind, msg in self.violations)


def check_dga_axioms(A: DgaPresentation) -> AxiomReport:
    """Quantified sweep over the window: d^2 = 0, Leibniz, graded
    commutativity, unit law.  Violations are report content."""
    rep = AxiomReport()
    w = A.window
    q = A.modulus

    for n in range(w.min_degree + 2, w.max_degree + 1):
        if A.dim(n) == 0 or A.dim(n - 2) == 0:
            continue
        comp = (A.diff_matrix(n - 1) @ A.diff_matrix(n))
        if np.any(comp.data):
            j = int(np.argwhere(comp.data)[0][1])
            rep.violations.append(
                ("d_squared", f"d∘d != 0 on degree {n} basis element "
                              f"{A.labels(n)[j]}"))

    degs = sorted(A.basis)
    unit = A.unit_element()
    for n in degs:
        for i in range(A.dim(n)):
            u = A.element_from_label(n, A.labels(n)[i])
            if multiply(A, unit, u).coords != u.coords or \
               multiply(A, u, unit).coords != u.coords:
                rep.violations.append(("unit", f"unit law fails on ({n},{i})"))

    for da in degs:
        for db in degs:
            target = da + db
            if target not in w:
                continue
            sign = -1 if (da % 2 and db % 2) else 1
            for ia in range(A.dim(da)):
                for ib in range(A.dim(db)):
                    if (da, ia, db, ib) in A.clipped or (db, ib, da, ia) in A.clipped:
                        rep.skipped_clipped += 1
                        continue
                    uv = A.product.get((da, ia, db, ib), ())
                    vu = A.product.get((db, ib, da, ia), ())
                    lhs = {idx: c % q for idx, c in uv}
                    rhs = {idx: (sign * c) % q for idx, c in vu}
                    lhs = {k: v for k, v in lhs.items() if v}
                    rhs = {k: v for k, v in rhs.items() if v}
                    if lhs != rhs:
                        rep.violations.append(
                            ("commutativity",
                             f"u*v != (-1)^|u||v| v*u at ({da},{ia}),({db},{ib})"))

    # Leibniz needs d on both factors and on the product
    for da in degs:
        if da - 1 < w.min_degree:
            continue
        for db in degs:
            if db - 1 < w.min_degree:
                continue
            target = da + db
            if target not in w or target - 1 < w.min_degree:
                continue
            sign = -1 if da % 2 else 1
            for ia in range(A.dim(da)):
                u = A.element_from_label(da, A.labels(da)[ia])
                du = differential(A, u)
                for ib in range(A.dim(db)):
                    v = A.element_from_label(db, A.labels(db)[ib])
                    try:
                        lhs = differential(A, multiply(A, u, v))
                        rhs = A.add(multiply(A, du, v),
                                    A.scale(sign, multiply(A, u, differential(A, v))))
                    except WindowError:
                        rep.skipped_clipped += 1
                        continue
                    if lhs.coords != rhs.coords:
                        rep.violations.append(
                            ("leibniz",
                             f"Leibniz fails at pair ({A.labels(da)[ia]}, "
                             f"{A.labels(db)[ib]}) degrees ({da},{db})"))
    return rep


# -- cell attachment ---------------------------------------------------------


def is_grounded(A: DgaPresentation) -> bool:
    """True when the bottom window degree has empty basis.  Extensions of a
    grounded presentation have exact differentials at every inner degree;
    extending a non-grounded one would fake d = 0 on bottom basis elements
    whose products climb back into the inner window and break Leibniz."""
    return A.dim(A.window.min_degree) == 0


def _require_grounded(A: DgaPresentation, what: str):
    if not is_grounded(A):
        raise ValueError(
            f"{what} needs a grounded presentation (empty basis in the "
            f"bottom window degree {A.window.min_degree}); widen the window "
            "to an empty degree")


def _fresh_name(A: DgaPresentation, stem: str) -> str:
    existing = {lbl for labels in A.basis.values() for lbl in labels}
    k = 0
    while True:
        name = f"{stem}{k}"
        if not any(name in lbl.split("*") or lbl.startswith(name + "^")
                   or lbl == name for lbl in existing):
            return name
        k += 1


def adjoin_cell(A: DgaPresentation, n: int, z: Element,
                name: Optional[str] = None) -> DgaPresentation:
    """Freely adjoin a generator y of degree n with d(y) = z, truncated to
    the window.  z must be a cycle of degree n - 1.

    New basis elements are y^k * b over the existing basis; the window
    bounds k, so the extension stays finite.  The window's homology away
    from the top boundary is the model's own; see module docstring.
    """
    if n < 1:
        raise ValueError("cells must sit in positive degrees")
    if z.degree != n - 1:
        raise ValueError(f"boundary value must have degree {n - 1}, got {z.degree}")
    if not is_cycle(A, z):
        raise ValueError("attachment boundary is not a cycle")
    _require_grounded(A, "adjoin_cell")

    p, N, q = A.prime, A.precision, A.modulus
    w = A.window
    yname = name or _fresh_name(A, "y")
    max_k = 1 if n % 2 else (w.max_degree - w.min_degree) // n

    # basis: (k, old_index) per degree; k = 0 keeps the old ordering
    new_basis: Dict[int, List[Tuple[int, int]]] = {}
    for deg in range(w.min_degree, w.max_degree + 1):
        items: List[Tuple[int, int]] = [(0, i) for i in range(A.dim(deg))]
        for k in range(1, max_k + 1):
            bdeg = deg - k * n
            for i in range(A.dim(bdeg)):
                items.append((k, i))
        if items:
            new_basis[deg] = items
    index: Dict[Tuple[int, int, int], int] = {}
    labels: Dict[int, Tuple[str, ...]] = {}
    for deg, items in new_basis.items():
        lbls = []
        for pos, (k, i) in enumerate(items):
            index[(deg, k, i)] = pos
            base = A.labels(deg - k * n)[i]
            if k == 0:
                lbls.append(base)
            else:
                head = yname if k == 1 else f"{yname}^{k}"
                lbls.append(head if base == "1" else f"{head}*{base}")
        labels[deg] = tuple(lbls)

    def old_product(da, ia, db, ib):
        key = (da, ia, db, ib)
        if key in A.clipped:
            return None  # poisoned
        return A.product.get(key, ())

    # differential: d(y^k b) = k y^(k-1) (z b) + (-1)^(k n) y^k (d b)
    diff: Dict[int, RingMatrix] = {}
    clipped = set(A.clipped)
    for deg, items in new_basis.items():
        if deg - 1 < w.min_degree or (deg - 1) not in new_basis:
            continue
        M = np.zeros((len(new_basis[deg - 1]), len(items)), dtype=np.int64)
        nontrivial = False
        for col, (k, i) in enumerate(items):
            bdeg = deg - k * n
            if k > 0:
                # z * b expanded in the old algebra
                for zi, zc in enumerate(z.coords):
                    if zc == 0:
                        continue
                    ent = old_product(n - 1, zi, bdeg, i)
                    if ent is None:
                        raise WindowError(
                            "cell attachment needs a clipped product of the base")
                    for idx, coeff in ent:
                        row = index[(deg - 1, k - 1, idx)]
                        M[row, col] = (M[row, col] + k * zc * coeff) % q
                        nontrivial = True
            if bdeg - 1 >= w.min_degree:
                dcol = A.diff_matrix(bdeg).data[:, i] if A.dim(bdeg - 1) else []
                sgn = -1 if (k * n) % 2 else 1
                for row_i, coeff in enumerate(dcol):
                    if coeff:
                        row = index[(deg - 1, k, row_i)]
                        M[row, col] = (M[row, col] + sgn * int(coeff)) % q
                        nontrivial = True
        if nontrivial:
            diff[deg] = RingMatrix(M, p, N)

    # products: (y^i a)(y^j b) = sign * y^(i+j) (a b); y even commutes freely,
    # y odd forces i = j = 1 to vanish and contributes (-1)^|a| on crossing
    product: Dict[Tuple[int, int, int, int], Tuple[Tuple[int, int], ...]] = {}
    drops = A.clip_drop_count
    degs = sorted(new_basis)
    for da in degs:
        for db in degs:
            target = da + db
            in_window = target in w
            for pa, (ka, ia) in enumerate(new_basis[da]):
                adeg = da - ka * n
                for pb, (kb, ib) in enumerate(new_basis[db]):
                    bdeg = db - kb * n
                    kk = ka + kb
                    if n % 2 and kk > 1:
                        continue  # odd cell squares to zero
                    base_deg = adeg + bdeg
                    if base_deg not in w:
                        # base product already outside the old window
                        if in_window:
                            clipped.add((da, pa, db, pb))
                        else:
                            drops += 1
                        continue
                    ent = old_product(adeg, ia, bdeg, ib)
                    if ent is None:
                        if in_window:
                            clipped.add((da, pa, db, pb))
                        else:
                            drops += 1
                        continue
                    if not ent:
                        continue
                    if not in_window or kk > max_k:
                        drops += 1
                        continue
                    sgn = 1
                    if n % 2 and kb == 1:
                        sgn = -1 if adeg % 2 else 1
                    entries = [
                        (index[(target, kk, idx)], (sgn * coeff) % q)
                        for idx, coeff in ent
                    ]
                    if entries:
                        product[(da, pa, db, pb)] = tuple(entries)

    return DgaPresentation(p, N, w, labels, diff, product,
                           unit_index=index[(0, 0, A.unit_index)],
                           clipped=clipped, clip_drop_count=drops)


def tensor_acyclic_pair(A: DgaPresentation, n: int,
                        names: Optional[Tuple[str, str]] = None) -> DgaPresentation:
    """Tensor with the three-dimensional acyclic cdga {1, y, w}: |y| = n
    (even), |w| = n + 1, d(w) = y, and y^2 = yw = w^2 = 0.

    The factor is exactly acyclic with free homology Z_p * 1, so the tensor
    preserves every homology group on the inner window; no product is ever
    clipped inside the factor.
    """
    if n < 2 or n % 2:
        raise ValueError("acyclic pair wants an even bottom degree >= 2")
    _require_grounded(A, "tensor_acyclic_pair")
    p, N, q = A.prime, A.precision, A.modulus
    w = A.window
    if names is None:
        y = _fresh_name(A, "u")
        wn = _fresh_name(A, "v")
        if y == wn:
            wn = y + "t"
    else:
        y, wn = names

    eps = [("", 0), (y, n), (wn, n + 1)]  # (label, degree); rank order
    new_basis: Dict[int, List[Tuple[int, int]]] = {}
    for deg in range(w.min_degree, w.max_degree + 1):
        items = []
        for r, (_, edeg) in enumerate(eps):
            bdeg = deg - edeg
            for i in range(A.dim(bdeg)):
                items.append((r, i))
        if items:
            new_basis[deg] = items
    index = {}
    labels = {}
    for deg, items in new_basis.items():
        lbls = []
        for pos, (r, i) in enumerate(items):
            index[(deg, r, i)] = pos
            base = A.labels(deg - eps[r][1])[i]
            if r == 0:
                lbls.append(base)
            else:
                head = eps[r][0]
                lbls.append(head if base == "1" else f"{base}*{head}")
        labels[deg] = tuple(lbls)

    # d(b ⊗ 1) = db; d(b ⊗ y) = db ⊗ y; d(b ⊗ w) = db ⊗ w + (-1)^|b| b ⊗ y
    diff: Dict[int, RingMatrix] = {}
    for deg, items in new_basis.items():
        if deg - 1 < w.min_degree or (deg - 1) not in new_basis:
            continue
        M = np.zeros((len(new_basis[deg - 1]), len(items)), dtype=np.int64)
        nontrivial = False
        for col, (r, i) in enumerate(items):
            bdeg = deg - eps[r][1]
            if bdeg - 1 >= w.min_degree and A.dim(bdeg - 1):
                for row_i, coeff in enumerate(A.diff_matrix(bdeg).data[:, i]):
                    if coeff:
                        row = index[(deg - 1, r, row_i)]
                        M[row, col] = (M[row, col] + int(coeff)) % q
                        nontrivial = True
            if r == 2:
                sgn = -1 if bdeg % 2 else 1
                row = index[(deg - 1, 1, i)]
                M[row, col] = (M[row, col] + sgn) % q
                nontrivial = True
        if nontrivial:
            diff[deg] = RingMatrix(M, p, N)

    # (a ⊗ ε)(b ⊗ ε') = (-1)^(|ε||b|) (a b) ⊗ (ε ε'); εε' vanishes unless
    # one factor is 1 (y², yw, w² all zero structurally)
    product = {}
    clipped = set(A.clipped)
    drops = A.clip_drop_count
    degs = sorted(new_basis)
    for da in degs:
        for db in degs:
            target = da + db
            in_window = target in w
            for pa, (ra, ia) in enumerate(new_basis[da]):
                adeg = da - eps[ra][1]
                for pb, (rb, ib) in enumerate(new_basis[db]):
                    if ra and rb:
                        continue  # structural zero in the factor
                    bdeg = db - eps[rb][1]
                    base_deg = adeg + bdeg
                    key = (adeg, ia, bdeg, ib)
                    if base_deg not in w or key in A.clipped:
                        if in_window:
                            clipped.add((da, pa, db, pb))
                        else:
                            drops += 1
                        continue
                    ent = A.product.get(key, ())
                    if not ent:
                        continue
                    if not in_window:
                        drops += 1
                        continue
                    r = ra + rb
                    sgn = 1
                    if ra and eps[ra][1] % 2 and bdeg % 2:
                        sgn = -1
                    entries = [
                        (index[(target, r, idx)], (sgn * coeff) % q)
                        for idx, coeff in ent
                    ]
                    product[(da, pa, db, pb)] = tuple(entries)

    return DgaPresentation(p, N, w, labels, diff, product,
                           unit_index=index[(0, 0, A.unit_index)],
                           clipped=clipped, clip_drop_count=drops)
