"""Exact linear algebra over Z/p^N.

Z/p^N is a local principal ideal ring, so a single minimal-valuation pivot
clears its row and column in one pass and Smith normal form needs no
divisibility repair loop.  Diagonal entries come out as p-powers with
non-decreasing exponents; a zero diagonal entry is recorded with exponent N.

Matrices are stored as int64 numpy arrays of reduced residues.  All row and
column operations are unimodular, and U, V (with their inverses) are
accumulated so that U @ M @ V = D exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .padics import PAdicInt, int_valuation, is_odd_prime


class RingMatrix:
    """Matrix over Z/p^N; entries share one (p, N)."""

    __slots__ = ("data", "prime", "precision", "modulus")

    def __init__(self, data, p: int, N: int):
        if not is_odd_prime(p):
            raise ValueError(f"prime must be an odd prime, got {p}")
        if N < 1:
            raise ValueError("precision must be >= 1")
        q = p ** N
        arr = np.array(
            [[self._entry_value(e, p, N) for e in row] for row in data],
            dtype=np.int64,
        ) if not isinstance(data, np.ndarray) else data.astype(np.int64, copy=True)
        if arr.ndim != 2:
            raise ValueError("matrix data must be two-dimensional")
        # int64 overflow guard for A @ B followed by reduction
        if q * q * max(arr.shape + (1,)) >= 2 ** 62:
            raise ValueError("modulus too large for int64 matrix arithmetic")
        self.data = arr % q
        self.prime = p
        self.precision = N
        self.modulus = q

    @staticmethod
    def _entry_value(e, p, N) -> int:
        if isinstance(e, PAdicInt):
            if (e.prime, e.precision) != (p, N):
                raise ValueError("mixed (p, N) entries rejected")
            return e.residue
        return int(e)

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int, N: int) -> "RingMatrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), p, N)

    @classmethod
    def identity(cls, n: int, p: int, N: int) -> "RingMatrix":
        return cls(np.eye(n, dtype=np.int64), p, N)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def entry(self, i: int, j: int) -> PAdicInt:
        return PAdicInt(int(self.data[i, j]), self.prime, self.precision)

    def copy(self) -> "RingMatrix":
        return RingMatrix(self.data, self.prime, self.precision)

    def __matmul__(self, other: "RingMatrix") -> "RingMatrix":
        self._check(other)
        return RingMatrix((self.data @ other.data) % self.modulus,
                          self.prime, self.precision)

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return (self.data @ (np.asarray(vec, dtype=np.int64) % self.modulus)) % self.modulus

    def _check(self, other: "RingMatrix"):
        if (self.prime, self.precision) != (other.prime, other.precision):
            raise ValueError("mixed (p, N) matrices")

    def __eq__(self, other):
        return (isinstance(other, RingMatrix)
                and (self.prime, self.precision) == (other.prime, other.precision)
                and self.data.shape == other.data.shape
                and bool(np.all(self.data == other.data)))

    def __repr__(self):
        return f"RingMatrix({self.data.tolist()}, p={self.prime}, N={self.precision})"


@dataclass(frozen=True)
class SnfDecomposition:
    """U @ M @ V = D with U, V invertible and D = diag(p^e_1, ..., 0, ...).

    diagonal_exponents holds one value per diagonal slot; exponent == N marks
    a zero entry (annihilator-free at this precision).
    """

    U: RingMatrix
    D: RingMatrix
    V: RingMatrix
    U_inv: RingMatrix
    V_inv: RingMatrix
    diagonal_exponents: tuple

    @property
    def rank_slots(self) -> int:
        return len(self.diagonal_exponents)


def _val(x: int, p: int, N: int) -> int:
    return N if x == 0 else min(int_valuation(x, p), N)


def smith_normal_form(M: RingMatrix) -> SnfDecomposition:
    """Smith normal form over Z/p^N with deterministic pivoting.

    Pivot rule: entry of minimal valuation in the active submatrix, ties
    broken by lowest (row, col) lexicographically.
    """
    p, N, q = M.prime, M.precision, M.modulus
    A = M.data.copy()
    r, c = A.shape
    U = np.eye(r, dtype=np.int64)
    Ui = np.eye(r, dtype=np.int64)
    V = np.eye(c, dtype=np.int64)
    Vi = np.eye(c, dtype=np.int64)

    def row_swap(i, j):
        A[[i, j], :] = A[[j, i], :]
        U[[i, j], :] = U[[j, i], :]
        Ui[:, [i, j]] = Ui[:, [j, i]]

    def col_swap(i, j):
        A[:, [i, j]] = A[:, [j, i]]
        V[:, [i, j]] = V[:, [j, i]]
        Vi[[i, j], :] = Vi[[j, i], :]

    def row_scale(i, u):
        uinv = pow(int(u), -1, q)
        A[i, :] = (A[i, :] * u) % q
        U[i, :] = (U[i, :] * u) % q
        Ui[:, i] = (Ui[:, i] * uinv) % q

    def row_addmul(i, j, m):
        # R_i += m * R_j
        A[i, :] = (A[i, :] + m * A[j, :]) % q
        U[i, :] = (U[i, :] + m * U[j, :]) % q
        Ui[:, j] = (Ui[:, j] - m * Ui[:, i]) % q

    def col_addmul(i, j, m):
        # C_i += m * C_j
        A[:, i] = (A[:, i] + m * A[:, j]) % q
        V[:, i] = (V[:, i] + m * V[:, j]) % q
        Vi[j, :] = (Vi[j, :] - m * Vi[i, :]) % q

    slots = min(r, c)
    exponents = []
    for t in range(slots):
        # locate minimal-valuation pivot in A[t:, t:]
        best = None
        best_val = N
        for i in range(t, r):
            for j in range(t, c):
                x = int(A[i, j])
                if x == 0:
                    continue
                v = _val(x, p, N)
                if v < best_val:
                    best_val, best = v, (i, j)
                    if v == 0:
                        break
            if best is not None and best_val == 0:
                break
        if best is None:
            exponents.extend([N] * (slots - t))
            break
        bi, bj = best
        if bi != t:
            row_swap(t, bi)
        if bj != t:
            col_swap(t, bj)
        v = best_val
        unit = int(A[t, t]) // p ** v
        row_scale(t, pow(unit, -1, q))
        # every remaining entry has valuation >= v, so quotients are exact
        pv = p ** v
        for i in range(t + 1, r):
            x = int(A[i, t])
            if x:
                row_addmul(i, t, -(x // pv))
        for j in range(t + 1, c):
            x = int(A[t, j])
            if x:
                col_addmul(j, t, -(x // pv))
        exponents.append(v)

    D = RingMatrix(A, p, N)
    return SnfDecomposition(
        U=RingMatrix(U, p, N), D=D, V=RingMatrix(V, p, N),
        U_inv=RingMatrix(Ui, p, N), V_inv=RingMatrix(Vi, p, N),
        diagonal_exponents=tuple(exponents),
    )


def kernel_generators(M: RingMatrix, snf: Optional[SnfDecomposition] = None) -> "RingMatrix":
    """Columns generating ker(M) over Z/p^N.

    The kernel of multiplication by p^e on Z/p^N is p^(N-e) Z/p^N, so each
    diagonal slot with exponent e in (0, N] contributes p^(N-e) * (V column);
    columns beyond the diagonal contribute V columns directly.
    """
    p, N = M.prime, M.precision
    snf = snf or smith_normal_form(M)
    cols = []
    exps = snf.diagonal_exponents
    for j in range(M.cols):
        e = exps[j] if j < len(exps) else N
        if e == 0:
            continue
        scale = p ** (N - e)
        cols.append((snf.V.data[:, j] * scale) % M.modulus)
    if not cols:
        return RingMatrix.zeros(M.cols, 0, p, N)
    return RingMatrix(np.stack(cols, axis=1), p, N)


def kernel_annihilator_exponents(M: RingMatrix, snf: Optional[SnfDecomposition] = None) -> tuple:
    """Annihilator exponent a_j of each kernel generator: p^a_j * gen = 0."""
    p, N = M.prime, M.precision
    snf = snf or smith_normal_form(M)
    exps = snf.diagonal_exponents
    out = []
    for j in range(M.cols):
        e = exps[j] if j < len(exps) else N
        if e == 0:
            continue
        out.append(e)
    return tuple(out)


def solve_linear(M: RingMatrix, b, snf: Optional[SnfDecomposition] = None):
    """One x with M @ x = b over Z/p^N, or None if there is no solution.

    The returned witness is the SNF-canonical particular solution; the full
    solution set is x + ker(M) (see kernel_generators).
    """
    p, N, q = M.prime, M.precision, M.modulus
    b = np.asarray(b, dtype=np.int64) % q
    if b.shape != (M.rows,):
        raise ValueError(f"rhs length {b.shape} does not match {M.rows} rows")
    snf = snf or smith_normal_form(M)
    ub = snf.U.apply(b)
    y = np.zeros(M.cols, dtype=np.int64)
    exps = snf.diagonal_exponents
    for i in range(M.rows):
        rhs = int(ub[i])
        e = exps[i] if i < len(exps) else N
        if e >= N:
            if rhs != 0:
                return None
            continue
        if rhs == 0:
            continue
        if _val(rhs, p, N) < e:
            return None
        y[i] = rhs // p ** e
    return snf.V.apply(y)


def matrix_is_invertible(M: RingMatrix) -> bool:
    """Invertible over Z/p^N iff invertible mod p (unit determinant)."""
    if M.rows != M.cols:
        return False
    snf = smith_normal_form(M)
    return all(e == 0 for e in snf.diagonal_exponents)
