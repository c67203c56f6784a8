"""Exact linear algebra over the prime field Z_p.

Scalars are plain ``int`` values kept in the canonical range ``[0, p-1]``.
Vectors and matrices are immutable wrappers that carry their modulus, so
mixing moduli is caught instead of silently producing garbage.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class FieldError(ValueError):
    """Bad modulus, mismatched dimensions or mixed moduli."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def check_modulus(p: int) -> int:
    """Return ``p`` if it is an odd prime, raise ``FieldError`` otherwise."""
    if not isinstance(p, (int, np.integer)) or isinstance(p, bool):
        raise FieldError(f"modulus must be an integer, got {p!r}")
    p = int(p)
    if p == 2:
        raise FieldError("p = 2 is not supported; an odd prime is required")
    if not is_prime(p):
        raise FieldError(f"modulus {p} is not prime")
    return p


def inv(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError(f"0 has no inverse mod {p}")
    return pow(a, p - 2, p)


@dataclass(frozen=True)
class FpVec:
    coords: tuple[int, ...]
    p: int

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) % self.p for c in self.coords))

    @classmethod
    def of(cls, coords: Iterable[int], p: int) -> "FpVec":
        return cls(tuple(coords), check_modulus(p))

    @classmethod
    def zero(cls, dim: int, p: int) -> "FpVec":
        return cls((0,) * dim, p)

    @classmethod
    def basis(cls, i: int, dim: int, p: int) -> "FpVec":
        return cls(tuple(int(j == i) for j in range(dim)), p)

    @classmethod
    def indicator(cls, idx: Iterable[int], dim: int, p: int) -> "FpVec":
        s = set(idx)
        return cls(tuple(int(j in s) for j in range(dim)), p)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def _same(self, other: "FpVec"):
        if self.p != other.p:
            raise FieldError(f"moduli differ: {self.p} vs {other.p}")
        if self.dim != other.dim:
            raise FieldError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "FpVec") -> "FpVec":
        self._same(other)
        return FpVec(tuple(a + b for a, b in zip(self.coords, other.coords)), self.p)

    def __sub__(self, other: "FpVec") -> "FpVec":
        self._same(other)
        return FpVec(tuple(a - b for a, b in zip(self.coords, other.coords)), self.p)

    def __neg__(self) -> "FpVec":
        return FpVec(tuple(-a for a in self.coords), self.p)

    def scale(self, c: int) -> "FpVec":
        return FpVec(tuple(c * a for a in self.coords), self.p)

    def __getitem__(self, i):
        return self.coords[i]

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __repr__(self):
        return f"FpVec({list(self.coords)}, p={self.p})"


def fp_dot(a: FpVec, b: FpVec) -> int:
    """The standard bilinear form sum(a_i * b_i) mod p."""
    a._same(b)
    return sum(x * y for x, y in zip(a.coords, b.coords)) % a.p


@dataclass(frozen=True)
class FpMat:
    rows: tuple[tuple[int, ...], ...]
    p: int

    def __post_init__(self):
        rows = tuple(tuple(int(x) % self.p for x in r) for r in self.rows)
        if rows and len({len(r) for r in rows}) != 1:
            raise FieldError("ragged matrix")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def of(cls, rows: Iterable[Iterable[int]], p: int) -> "FpMat":
        return cls(tuple(tuple(r) for r in rows), check_modulus(p))

    @classmethod
    def identity(cls, n: int, p: int) -> "FpMat":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), p)

    @classmethod
    def zeros(cls, r: int, c: int, p: int) -> "FpMat":
        return cls(tuple((0,) * c for _ in range(r)), p)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def to_array(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.int64).reshape(self.nrows, self.ncols)

    def row(self, i: int) -> FpVec:
        return FpVec(self.rows[i], self.p)

    def col(self, j: int) -> FpVec:
        return FpVec(tuple(r[j] for r in self.rows), self.p)

    def transpose(self) -> "FpMat":
        return FpMat(tuple(zip(*self.rows)), self.p)

    def __matmul__(self, other):
        if isinstance(other, FpVec):
            if other.dim != self.ncols or other.p != self.p:
                raise FieldError("matrix/vector shape or modulus mismatch")
            return FpVec(tuple(sum(a * b for a, b in zip(r, other.coords)) for r in self.rows), self.p)
        if other.p != self.p or other.nrows != self.ncols:
            raise FieldError("matrix shape or modulus mismatch")
        prod = (self.to_array() @ other.to_array()) % self.p
        return FpMat(tuple(map(tuple, prod.tolist())), self.p)

    def block(self, r0: int, r1: int, c0: int, c1: int) -> "FpMat":
        return FpMat(tuple(r[c0:c1] for r in self.rows[r0:r1]), self.p)


def mat_rank(A: FpMat | Sequence[Sequence[int]], p: int | None = None) -> int:
    if isinstance(A, FpMat):
        p = A.p
        arr = A.to_array()
    else:
        arr = np.array(A, dtype=np.int64)
        if arr.ndim != 2:
            arr = arr.reshape(len(A), -1)
    if arr.size == 0:
        return 0
    return len(_rref(arr % p, p, arr.shape[1]))


@dataclass(frozen=True)
class Solution:
    x: FpVec

    feasible = True


@dataclass(frozen=True)
class Infeasible:
    """No solution; ``witness`` is a row combination with wA = 0, wb != 0."""

    witness: FpVec

    feasible = False


def check_infeasibility_witness(A: FpMat, b: FpVec, lam: FpVec) -> bool:
    """Independent recheck of a left-kernel certificate, pure Python ints."""
    if lam.dim != A.nrows or b.dim != A.nrows:
        return False
    p = A.p
    for j in range(A.ncols):
        if sum(l * r[j] for l, r in zip(lam.coords, A.rows)) % p:
            return False
    return sum(l * y for l, y in zip(lam.coords, b.coords)) % p != 0


def solve_linear(A: FpMat, b: FpVec) -> Solution | Infeasible:
    """Solve ``A x = b`` over Z_p.

    Returns one solution (free variables set to 0) or an ``Infeasible``
    carrying a combination of the equations that reads ``0 = nonzero``.
    """
    if A.nrows != b.dim:
        raise FieldError(f"A has {A.nrows} rows but b has dimension {b.dim}")
    if A.p != b.p:
        raise FieldError("moduli differ")
    p = A.p
    m, n = A.nrows, A.ncols
    # augment with [b | I] so the row operations are recorded
    aug = np.zeros((m, n + 1 + m), dtype=np.int64)
    if n:
        aug[:, :n] = A.to_array()
    aug[:, n] = b.coords
    aug[:, n + 1:] = np.eye(m, dtype=np.int64)
    pivots = _rref(aug, p, n)
    rank = len(pivots)
    for i in range(rank, m):
        if aug[i, n] % p:
            lam = FpVec(tuple(int(v) for v in aug[i, n + 1:]), p)
            if not check_infeasibility_witness(A, b, lam):
                raise AssertionError("elimination produced an invalid certificate")
            return Infeasible(lam)
    x = [0] * n
    for i, c in enumerate(pivots):
        x[c] = int(aug[i, n])
    sol = FpVec(tuple(x), p)
    if A @ sol != b:
        raise AssertionError("elimination produced a wrong solution")
    return Solution(sol)


def _rref(a: np.ndarray, p: int, ncols: int):
    """In-place Gauss-Jordan on an int64 array; returns the pivot columns.

    Pivots are sought only in the first ``ncols`` columns, the rest ride
    along. The first nonzero entry (top to bottom) is the pivot, so results
    are deterministic.
    """
    nr = a.shape[0]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nr:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        a[r] = (a[r] * inv(int(a[r, c]), p)) % p
        factors = a[:, c].copy()
        factors[r] = 0
        hit = np.nonzero(factors)[0]
        if hit.size:
            a[hit] = (a[hit] - np.outer(factors[hit], a[r])) % p
        pivots.append(c)
        r += 1
    return pivots


def hyperplane_basis(w: FpVec) -> list[FpVec]:
    """A basis of the kernel {v : <v, w> = 0} of a nonzero functional."""
    if w.is_zero():
        raise FieldError("zero functional has no hyperplane")
    p = w.p
    t = next(i for i, c in enumerate(w.coords) if c)
    scale = inv(w[t], p)
    out = []
    for j in range(w.dim):
        if j == t:
            continue
        v = [0] * w.dim
        v[j] = 1
        v[t] = (-w[j] * scale) % p
        out.append(FpVec(tuple(v), p))
    return out


def normalize_functional(w: FpVec, c: int) -> tuple[FpVec, int]:
    """Scale (w, c) so the first nonzero entry of w is 1.

    {v : <v,w> = c} and {v : <v,aw> = ac} are the same set for a != 0.
    """
    t = next(i for i, x in enumerate(w.coords) if x)
    s = inv(w[t], w.p)
    return w.scale(s), (s * c) % w.p
