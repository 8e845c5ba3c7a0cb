"""Exact integer-lattice toolkit.

Normal forms (Smith, Hermite), saturation, quotients as finite abelian
groups, finite-order points of tori, and finite group actions on lattices.

Conventions used across the package:

- vectors are tuples of ints (or Fractions where noted);
- matrices are tuples of rows and act on column vectors,
  ``mat_vec(M, v)[i] == sum_j M[i][j] * v[j]``;
- a lattice is a subgroup of some Z^n, stored by its canonical Hermite
  basis, so equality of values is equality of lattices.

All arithmetic is exact; no floating point anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Vec = tuple[int, ...]
Mat = tuple[Vec, ...]


class LatticeError(ValueError):
    """Base class for lattice-domain failures."""


class ContainmentError(LatticeError):
    """A lattice is not contained in the claimed ambient lattice."""


class ModuleActionError(LatticeError):
    """A group action matrix does not preserve the designated lattice."""


class DomainError(LatticeError):
    """A vector lies outside the domain of a homomorphism."""


# ---------------------------------------------------------------------------
# vector and matrix helpers (ints or Fractions)
# ---------------------------------------------------------------------------


def vec(*xs) -> Vec:
    return tuple(int(x) for x in xs)


def mat(rows) -> Mat:
    return tuple(tuple(int(x) for x in row) for row in rows)


def identity_mat(n: int) -> Mat:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def zero_vec(n: int) -> Vec:
    return (0,) * n


def vec_add(u, v):
    return tuple(a + b for a, b in zip(u, v, strict=True))


def vec_sub(u, v):
    return tuple(a - b for a, b in zip(u, v, strict=True))


def vec_neg(u):
    return tuple(-a for a in u)


def vec_scale(c, u):
    return tuple(c * a for a in u)


def dot(u, v):
    if len(u) != len(v):
        raise DomainError(f"dimension mismatch: {len(u)} vs {len(v)}")
    return sum(a * b for a, b in zip(u, v))


def mat_vec(M, v):
    """Matrix times column vector."""
    return tuple(sum(row[j] * v[j] for j in range(len(v))) for row in M)


def vec_mat(v, M):
    """Row vector times matrix: sum_i v[i] * row_i."""
    if not M:
        return ()
    n = len(M[0])
    return tuple(sum(v[i] * M[i][j] for i in range(len(M))) for j in range(n))


def mat_mul(A, B):
    n = len(B[0]) if B else 0
    return tuple(
        tuple(sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(n))
        for i in range(len(A))
    )


def mat_transpose(M):
    if not M:
        return ()
    return tuple(tuple(M[i][j] for i in range(len(M))) for j in range(len(M[0])))


def mat_det(M):
    """Exact determinant; int for integer input, Fraction otherwise."""
    n = len(M)
    if n == 0:
        return 1
    A = [[Fraction(x) for x in row] for row in M]
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            A[c], A[p] = A[p], A[c]
            det = -det
        det *= A[c][c]
        inv = A[c][c]
        for r in range(c + 1, n):
            if A[r][c]:
                f = A[r][c] / inv
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return int(det) if det.denominator == 1 else det


def mat_rank(M) -> int:
    rows = [[Fraction(x) for x in row] for row in M]
    cols = len(rows[0]) if rows else 0
    rank = 0
    for c in range(cols):
        p = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if p is None:
            continue
        rows[rank], rows[p] = rows[p], rows[rank]
        inv = rows[rank][c]
        for r in range(len(rows)):
            if r != rank and rows[r][c]:
                f = rows[r][c] / inv
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def mat_inverse(M) -> tuple[tuple[Fraction, ...], ...]:
    """Exact inverse over Q; raises LatticeError on singular input."""
    n = len(M)
    A = [
        [Fraction(M[i][j]) for j in range(n)]
        + [Fraction(int(i == j)) for j in range(n)]
        for i in range(n)
    ]
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c] != 0), None)
        if p is None:
            raise LatticeError("matrix is singular")
        A[c], A[p] = A[p], A[c]
        inv = A[c][c]
        A[c] = [x / inv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c]:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return tuple(tuple(row[n:]) for row in A)


def mat_inverse_int(M) -> Mat:
    inv = mat_inverse(M)
    if any(x.denominator != 1 for row in inv for x in row):
        raise LatticeError("matrix is not unimodular")
    return tuple(tuple(int(x) for x in row) for row in inv)


# ---------------------------------------------------------------------------
# normal forms
# ---------------------------------------------------------------------------


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> Mat:
    """Canonical row-style Hermite form of the row span.

    Pivots positive, entries above each pivot reduced into [0, pivot),
    zero rows dropped.  Two generating sets span the same lattice iff
    their Hermite forms are identical.
    """
    A = [[int(x) for x in row] for row in rows]
    m = len(A)
    n = len(A[0]) if m else 0
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        for i in range(r + 1, m):
            # euclid on column c between rows r and i
            while A[i][c] != 0:
                q = A[r][c] // A[i][c]
                A[r] = [a - q * b for a, b in zip(A[r], A[i])]
                A[r], A[i] = A[i], A[r]
        if A[r][c] < 0:
            A[r] = [-x for x in A[r]]
        for i in range(r):
            q = A[i][c] // A[r][c]
            if q:
                A[i] = [a - q * b for a, b in zip(A[i], A[r])]
        r += 1
        if r == m:
            break
    return tuple(tuple(row) for row in A[:r])


def smith_normal_form(M: Sequence[Sequence[int]]) -> tuple[Mat, Mat, Mat]:
    """Return (D, U, V) with U*M*V = D, D diagonal with d1 | d2 | ...,
    U and V unimodular.  Total on all integer matrices."""
    m = len(M)
    n = len(M[0]) if m else 0
    A = [[int(x) for x in row] for row in M]
    U = [list(row) for row in identity_mat(m)]
    V = [list(row) for row in identity_mat(n)]

    def row_sub(i, j, q):
        A[i] = [a - q * b for a, b in zip(A[i], A[j])]
        U[i] = [a - q * b for a, b in zip(U[i], U[j])]

    def col_sub(j, k, q):
        for row in A:
            row[j] -= q * row[k]
        for row in V:
            row[j] -= q * row[k]

    def row_swap(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def col_swap(j, k):
        for row in A:
            row[j], row[k] = row[k], row[j]
        for row in V:
            row[j], row[k] = row[k], row[j]

    t = 0
    while t < min(m, n):
        while True:
            # pivot on the minimal-magnitude nonzero entry: keeps quotients
            # small, so entries stay desk-sized instead of exploding
            piv = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] != 0 and (piv is None or abs(A[i][j]) < abs(A[piv[0]][piv[1]])):
                        piv = (i, j)
            if piv is None:
                break
            if piv[0] != t:
                row_swap(t, piv[0])
            if piv[1] != t:
                col_swap(t, piv[1])
            p = A[t][t]
            k = next((i for i in range(t + 1, m) if A[i][t] % p != 0), None)
            if k is not None:
                row_sub(k, t, A[k][t] // p)  # leaves a smaller remainder
                continue
            k = next((j for j in range(t + 1, n) if A[t][j] % p != 0), None)
            if k is not None:
                col_sub(k, t, A[t][k] // p)
                continue
            # everything in the cross divides the pivot: clear it exactly
            for i in range(t + 1, m):
                if A[i][t]:
                    row_sub(i, t, A[i][t] // p)
            for j in range(t + 1, n):
                if A[t][j]:
                    col_sub(j, t, A[t][j] // p)
            viol = next(
                (
                    i
                    for i in range(t + 1, m)
                    for j in range(t + 1, n)
                    if A[i][j] % p != 0
                ),
                None,
            )
            if viol is not None:
                # pull a non-divisible row into the working row and redo
                row_sub(t, viol, -1)
                continue
            break
        if all(A[i][j] == 0 for i in range(t, m) for j in range(t, n)):
            break
        t += 1
    for i in range(min(m, n)):
        if A[i][i] < 0:
            A[i] = [-x for x in A[i]]
            U[i] = [-x for x in U[i]]
    return mat(A), mat(U), mat(V)


def integral_kernel(M: Sequence[Sequence[int]]) -> Mat:
    """Basis, as rows, of the integer null space {x in Z^n : M x = 0}."""
    m = len(M)
    n = len(M[0]) if m else 0
    if m == 0:
        return identity_mat(n)
    D, _U, V = smith_normal_form(M)
    r = sum(1 for i in range(min(m, n)) if D[i][i] != 0)
    cols = mat_transpose(V)
    return tuple(cols[j] for j in range(r, n))


# ---------------------------------------------------------------------------
# lattices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntLattice:
    """Sublattice of Z^ambient_dim, stored as canonical Hermite basis rows."""

    ambient_dim: int
    rows: Mat

    @staticmethod
    def from_rows(ambient_dim: int, gens: Iterable[Sequence[int]]) -> "IntLattice":
        gl = [tuple(int(x) for x in g) for g in gens]
        for g in gl:
            if len(g) != ambient_dim:
                raise DomainError(
                    f"generator length {len(g)} != ambient dimension {ambient_dim}"
                )
        return IntLattice(ambient_dim, hermite_normal_form(gl))

    @staticmethod
    def standard(n: int) -> "IntLattice":
        return IntLattice(n, identity_mat(n))

    @property
    def rank(self) -> int:
        return len(self.rows)

    def coords(self, v: Sequence[int]) -> Vec | None:
        """Integer coordinates of v in the basis rows, or None if outside."""
        if len(v) != self.ambient_dim:
            raise DomainError("vector length != ambient dimension")
        res = [int(x) for x in v]
        cs = []
        for row in self.rows:
            p = next(j for j, x in enumerate(row) if x != 0)
            if res[p] % row[p] != 0:
                return None
            c = res[p] // row[p]
            if c:
                res = [a - c * b for a, b in zip(res, row)]
            cs.append(c)
        if any(res):
            return None
        return tuple(cs)

    def q_coords(self, v) -> tuple[Fraction, ...] | None:
        """Rational coordinates in the basis rows, or None if outside Q-span."""
        if len(v) != self.ambient_dim:
            raise DomainError("vector length != ambient dimension")
        res = [Fraction(x) for x in v]
        cs = []
        for row in self.rows:
            p = next(j for j, x in enumerate(row) if x != 0)
            c = res[p] / row[p]
            if c:
                res = [a - c * b for a, b in zip(res, row)]
            cs.append(c)
        if any(res):
            return None
        return tuple(cs)

    def contains(self, v) -> bool:
        return self.coords(v) is not None

    def contains_lattice(self, other: "IntLattice") -> bool:
        if other.ambient_dim != self.ambient_dim:
            raise DomainError("ambient dimensions differ")
        return all(self.contains(row) for row in other.rows)

    def member_from_coords(self, cs: Sequence[int]) -> Vec:
        return vec_mat(tuple(cs), self.rows) if self.rows else zero_vec(self.ambient_dim)


def lattice_sum(L1: IntLattice, L2: IntLattice) -> IntLattice:
    if L1.ambient_dim != L2.ambient_dim:
        raise DomainError("ambient dimensions differ")
    return IntLattice.from_rows(L1.ambient_dim, L1.rows + L2.rows)


def intersect(L1: IntLattice, L2: IntLattice) -> IntLattice:
    """Intersection of two sublattices of the same Z^n."""
    if L1.ambient_dim != L2.ambient_dim:
        raise DomainError("ambient dimensions differ")
    n = L1.ambient_dim
    if L1.rank == 0 or L2.rank == 0:
        return IntLattice.from_rows(n, ())
    # x = c*B1 = d*B2: solve [B1^T | -B2^T] (c,d)^T = 0 over Z
    rows = tuple(
        tuple(L1.rows[i][coord] for i in range(L1.rank))
        + tuple(-L2.rows[j][coord] for j in range(L2.rank))
        for coord in range(n)
    )
    ker = integral_kernel(rows)
    gens = [vec_mat(row[: L1.rank], L1.rows) for row in ker]
    return IntLattice.from_rows(n, gens)


def _coords_matrix(ambient: IntLattice, sub: IntLattice) -> list[Vec]:
    if ambient.ambient_dim != sub.ambient_dim:
        raise ContainmentError("ambient dimensions differ")
    out = []
    for g in sub.rows:
        c = ambient.coords(g)
        if c is None:
            raise ContainmentError(f"generator {g} is not in the ambient lattice")
        out.append(c)
    return out


def saturate(L: IntLattice, ambient: IntLattice) -> IntLattice:
    """(L tensor Q) cap ambient, the saturation of L inside ambient."""
    if L.rank == 0:
        return IntLattice.from_rows(ambient.ambient_dim, ())
    C = _coords_matrix(ambient, L)
    D, _U, V = smith_normal_form(C)
    r = sum(1 for i in range(min(len(C), ambient.rank)) if D[i][i] != 0)
    Vinv = mat_inverse_int(V)
    gens = [vec_mat(Vinv[i], ambient.rows) for i in range(r)]
    return IntLattice.from_rows(ambient.ambient_dim, gens)


@dataclass(frozen=True)
class FinAbGroup:
    """Finite abelian group as invariant factors d1 | d2 | ..., all >= 2."""

    invariant_factors: tuple[int, ...]
    generator_lifts: Mat = ()

    def __post_init__(self):
        if any(d < 2 for d in self.invariant_factors):
            raise LatticeError("invariant factors must be >= 2")
        for a, b in zip(self.invariant_factors, self.invariant_factors[1:]):
            if b % a != 0:
                raise LatticeError("invariant factors must form a divisibility chain")

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    @property
    def is_trivial(self) -> bool:
        return not self.invariant_factors


@dataclass(frozen=True)
class LatticeQuotient:
    """ambient/sub: torsion part plus free rank, with generator lifts."""

    torsion: FinAbGroup
    free_rank: int
    free_lifts: Mat = ()

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def order(self) -> int:
        if self.free_rank:
            raise LatticeError("quotient is infinite")
        return self.torsion.order


def quotient(ambient: IntLattice, sub: IntLattice) -> LatticeQuotient:
    """The abelian group ambient/sub."""
    k = ambient.rank
    if sub.rank == 0:
        return LatticeQuotient(FinAbGroup((), ()), k, ambient.rows)
    C = _coords_matrix(ambient, sub)
    D, _U, V = smith_normal_form(C)
    diag = [D[i][i] for i in range(min(len(C), k)) if D[i][i] != 0]
    r = len(diag)
    Vinv = mat_inverse_int(V)
    tor, lifts = [], []
    for i, d in enumerate(diag):
        if d >= 2:
            tor.append(d)
            lifts.append(vec_mat(Vinv[i], ambient.rows))
    free_lifts = tuple(vec_mat(Vinv[i], ambient.rows) for i in range(r, k))
    return LatticeQuotient(
        FinAbGroup(tuple(tor), tuple(lifts)), k - r, free_lifts
    )


def sublattice_with_integrality(
    L: IntLattice, functionals: Sequence[Sequence[Fraction]]
) -> IntLattice:
    """{x in L : f(x) in Z for every functional}, f as rational covectors."""
    if not functionals or L.rank == 0:
        return L
    r = L.rank
    vals = [
        [
            sum(Fraction(f[j]) * b[j] for j in range(L.ambient_dim))
            for b in L.rows
        ]
        for f in functionals
    ]
    N = math.lcm(*[x.denominator for row in vals for x in row])
    m = len(vals)
    # {c : vals*c integral} = projection of ker [N*vals | -N*I] to c-block
    big = [
        [int(N * vals[i][k]) for k in range(r)]
        + [-N if j == i else 0 for j in range(m)]
        for i in range(m)
    ]
    ker = integral_kernel(big)
    gens = [vec_mat(row[:r], L.rows) for row in ker]
    return IntLattice.from_rows(L.ambient_dim, gens)


# ---------------------------------------------------------------------------
# finite-order torus points
# ---------------------------------------------------------------------------


def _mod1(x: Fraction) -> Fraction:
    return x - math.floor(x)


@dataclass(frozen=True)
class TorusTorsionPoint:
    """Homomorphism Z^n -> Q/Z given by its values on the standard basis."""

    values: tuple[Fraction, ...]

    @staticmethod
    def from_values(vals) -> "TorusTorsionPoint":
        return TorusTorsionPoint(tuple(_mod1(Fraction(v)) for v in vals))

    @staticmethod
    def zero(n: int) -> "TorusTorsionPoint":
        return TorusTorsionPoint((Fraction(0),) * n)

    @property
    def order(self) -> int:
        if not self.values:
            return 1
        return math.lcm(*(v.denominator for v in self.values))

    def eval(self, v) -> Fraction:
        if len(v) != len(self.values):
            raise DomainError("vector is outside the domain lattice")
        return _mod1(sum((Fraction(x) * a for x, a in zip(v, self.values)), Fraction(0)))

    def compose(self, M) -> "TorusTorsionPoint":
        """Pullback along v -> M v (values on columns of M)."""
        n = len(self.values)
        if len(M) != n:
            raise DomainError("matrix does not map into the domain lattice")
        cols = len(M[0]) if M else 0
        vals = [
            _mod1(sum((Fraction(M[j][i]) * self.values[j] for j in range(n)), Fraction(0)))
            for i in range(cols)
        ]
        return TorusTorsionPoint(tuple(vals))

    def add(self, other: "TorusTorsionPoint") -> "TorusTorsionPoint":
        return TorusTorsionPoint.from_values(
            tuple(a + b for a, b in zip(self.values, other.values, strict=True))
        )


def torsion_point_eval(kappa: TorusTorsionPoint, v) -> Fraction:
    """Evaluate kappa at a lattice vector; additive in v."""
    return kappa.eval(v)


# ---------------------------------------------------------------------------
# finite group actions
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FiniteActionModule:
    """Finite group E with a multiplication table, acting by integer
    matrices that preserve a designated lattice."""

    labels: tuple[str, ...]
    table: Mapping[tuple[str, str], str]
    matrices: Mapping[str, Mat]
    lattice: IntLattice

    @staticmethod
    def from_generators(
        gens: Mapping[str, Mat], lattice: IntLattice, max_order: int = 48
    ) -> "FiniteActionModule":
        n = lattice.ambient_dim
        items = []
        for name, g in gens.items():
            g = mat(g)
            if len(g) != n or any(len(row) != n for row in g):
                raise ModuleActionError(f"generator {name} has wrong shape")
            if mat_det(g) not in (1, -1):
                raise ModuleActionError(f"generator {name} is not invertible over Z")
            items.append((name, g))
        e = identity_mat(n)
        elems: dict[Mat, str] = {e: "e"}
        order = ["e"]
        frontier = [e]
        while frontier:
            new = []
            for a in frontier:
                for name, g in items:
                    b = mat_mul(g, a)
                    if b not in elems:
                        label = name if a == e else name + "*" + elems[a]
                        elems[b] = label
                        order.append(label)
                        new.append(b)
                        if len(elems) > max_order:
                            raise ModuleActionError("group closure exceeds maximum order")
            frontier = new
        mats = {lab: m for m, lab in elems.items()}
        table = {
            (la, lb): elems[mat_mul(mats[la], mats[lb])]
            for la in order
            for lb in order
        }
        mod = FiniteActionModule(tuple(order), table, mats, lattice)
        mod.check_preserves(lattice)
        return mod

    @property
    def order(self) -> int:
        return len(self.labels)

    def check_preserves(self, L: IntLattice) -> None:
        for lab in self.labels:
            m = self.matrices[lab]
            for b in L.rows:
                if not L.contains(mat_vec(m, b)):
                    raise ModuleActionError(
                        f"action of {lab!r} does not preserve the lattice"
                    )


def invariants_rank(mod: FiniteActionModule, L: IntLattice) -> int:
    """Rank of the fixed sublattice L^E."""
    mod.check_preserves(L)
    r = L.rank
    if r == 0:
        return 0
    rows = []
    for lab in mod.labels:
        m = mod.matrices[lab]
        images = [vec_sub(mat_vec(m, b), b) for b in L.rows]
        for coord in range(L.ambient_dim):
            rows.append(tuple(images[i][coord] for i in range(r)))
    return r - mat_rank(rows)


def invariant_sublattice(mod: FiniteActionModule, L: IntLattice) -> IntLattice:
    """The fixed sublattice L^E itself."""
    mod.check_preserves(L)
    r = L.rank
    if r == 0:
        return L
    rows = []
    for lab in mod.labels:
        m = mod.matrices[lab]
        images = [vec_sub(mat_vec(m, b), b) for b in L.rows]
        for coord in range(L.ambient_dim):
            rows.append(tuple(images[i][coord] for i in range(r)))
    ker = integral_kernel(rows)
    gens = [vec_mat(c, L.rows) for c in ker]
    return IntLattice.from_rows(L.ambient_dim, gens)
