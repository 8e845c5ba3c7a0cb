"""Based root data, Weyl groups, restricted root systems, and folding.

A based root datum lives on X = Y = Z^dim with the dot pairing; roots are
vectors in X, coroots index-aligned vectors in Y.  Semisimple rank may be
smaller than dim (general-linear and torus factors).  Cartan matrices use
the convention C[i][j] = <alpha_j, coroot_i>, so column j of C holds the
fundamental-weight coordinates of alpha_j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .lattice import (
    DomainError,
    IntLattice,
    Mat,
    Vec,
    dot,
    identity_mat,
    mat,
    mat_mul,
    mat_transpose,
    mat_vec,
    vec_add,
    vec_neg,
    vec_scale,
    vec_sub,
)


class RootDataError(ValueError):
    """Base class for root-datum failures."""


class ConstructionError(RootDataError):
    """Invalid constructor input (lattice not between root and weight)."""


class AxiomError(RootDataError):
    """Input violates a named root-system axiom."""


class InvolutionError(RootDataError):
    """A matrix is not an involutive automorphism of the datum."""


class FoldError(RootDataError):
    """A fold orbit is not swapped by the designated involution."""


class OrbitSizeError(RootDataError):
    """Orbit enumeration exceeded its size cap."""


ORBIT_CAP = 10**7


# ---------------------------------------------------------------------------
# Cartan matrices, Bourbaki numbering
# ---------------------------------------------------------------------------

_FAMILIES = ("A", "B", "C", "D", "E", "F", "G", "BC")


def cartan_matrix(family: str, rank: int) -> Mat:
    """Bourbaki Cartan matrix; C[i][j] = <alpha_j, coroot_i>."""
    fam, n = family, rank
    if fam == "A" and n >= 1:
        edges = [(i, i + 1) for i in range(1, n)]
        special = {}
    elif fam == "B" and n >= 2:
        edges = [(i, i + 1) for i in range(1, n)]
        special = {(n, n - 1): -2}  # short alpha_n: <alpha_{n-1}, coroot_n> = -2
    elif fam == "C" and n >= 2:
        edges = [(i, i + 1) for i in range(1, n)]
        special = {(n - 1, n): -2}  # long alpha_n: <alpha_n, coroot_{n-1}> = -2
    elif fam == "D" and n >= 3:
        edges = [(i, i + 1) for i in range(1, n - 1)] + [(n - 2, n)]
        special = {}
    elif fam == "E" and n in (6, 7, 8):
        edges = [(1, 3), (3, 4), (4, 5), (2, 4)] + [(i, i + 1) for i in range(5, n)]
        special = {}
    elif fam == "F" and n == 4:
        edges = [(1, 2), (2, 3), (3, 4)]
        special = {(3, 2): -2}  # short alpha_3: <alpha_2, coroot_3> = -2
    elif fam == "G" and n == 2:
        edges = [(1, 2)]
        special = {(1, 2): -3}  # short alpha_1: <alpha_2, coroot_1> = -3
    else:
        raise ConstructionError(f"no Cartan matrix for {family}{rank}")
    C = [[0] * n for _ in range(n)]
    for i in range(n):
        C[i][i] = 2
    for a, b in edges:
        C[a - 1][b - 1] = -1
        C[b - 1][a - 1] = -1
    for (a, b), v in special.items():
        C[a - 1][b - 1] = v
    return mat(C)


@dataclass(frozen=True)
class CartanType:
    """Decomposition into irreducible components with Bourbaki permutations.

    Each component is (family, rank, perm) where perm[k] is the index of
    Bourbaki node k+1 inside the base the type was recognized from.
    """

    components: tuple[tuple[str, int, tuple[int, ...]], ...]

    @staticmethod
    def parse(name: str) -> "CartanType":
        comps = []
        for part in name.split("x"):
            part = part.strip()
            fam = "BC" if part.startswith("BC") else part[0]
            rank = int(part[len(fam):])
            comps.append((fam, rank, tuple(range(rank))))
        return CartanType(tuple(comps))

    @property
    def name(self) -> str:
        """Canonical display name; components sorted, e.g. 'A1xD4'."""
        keys = sorted((fam, rank) for fam, rank, _ in self.components)
        if not keys:
            return "T0"
        return "x".join(f"{fam}{rank}" for fam, rank in keys)

    @property
    def rank(self) -> int:
        return sum(rank for _fam, rank, _p in self.components)

    def families(self) -> tuple[tuple[str, int], ...]:
        return tuple(sorted((fam, rank) for fam, rank, _ in self.components))


# ---------------------------------------------------------------------------
# based root data
# ---------------------------------------------------------------------------


def _reflection_on_x(root: Vec, coroot: Vec) -> Mat:
    n = len(root)
    return tuple(
        tuple((1 if i == j else 0) - root[i] * coroot[j] for j in range(n))
        for i in range(n)
    )


def _reflection_on_y(root: Vec, coroot: Vec) -> Mat:
    n = len(root)
    return tuple(
        tuple((1 if i == j else 0) - coroot[i] * root[j] for j in range(n))
        for i in range(n)
    )


@dataclass(frozen=True)
class BasedRootDatum:
    """Based root datum on X = Y = Z^dim with the dot pairing."""

    dim: int
    roots: tuple[Vec, ...]
    coroots: tuple[Vec, ...]
    base: tuple[Vec, ...]

    # -- construction ------------------------------------------------------

    @staticmethod
    def from_base(dim: int, simple_roots, simple_coroots) -> "BasedRootDatum":
        """Close the simple system under reflections and validate."""
        simples = [tuple(int(x) for x in r) for r in simple_roots]
        cosimples = [tuple(int(x) for x in c) for c in simple_coroots]
        pairs = set(zip(simples, cosimples))
        frontier = list(pairs)
        while frontier:
            new = []
            for a, ac in frontier:
                for s, sc in zip(simples, cosimples):
                    b = vec_sub(a, vec_scale(dot(a, sc), s))
                    bc = vec_sub(ac, vec_scale(dot(s, ac), sc))
                    if (b, bc) not in pairs:
                        pairs.add((b, bc))
                        new.append((b, bc))
            frontier = new
        ordered = sorted(pairs)
        datum = BasedRootDatum(
            dim,
            tuple(p[0] for p in ordered),
            tuple(p[1] for p in ordered),
            tuple(simples),
        )
        datum.validate()
        return datum

    def validate(self) -> None:
        lookup = dict(zip(self.roots, self.coroots))
        if len(lookup) != len(self.roots):
            raise AxiomError("duplicate roots")
        for a, ac in zip(self.roots, self.coroots):
            if dot(a, ac) != 2:
                raise AxiomError(f"<alpha, coroot> != 2 at {a}")
            if vec_neg(a) not in lookup or lookup[vec_neg(a)] != vec_neg(ac):
                raise AxiomError(f"root set not symmetric at {a}")
        rootset = set(self.roots)
        for s, sc in zip(self.base, (lookup[b] for b in self.base)):
            for a in self.roots:
                if vec_sub(a, vec_scale(dot(a, sc), s)) not in rootset:
                    raise AxiomError(f"reflection at {s} does not preserve roots")
        for a in self.roots:
            if self.base_coords(a) is None:
                raise AxiomError(f"root {a} is not an integral base combination")

    # -- lookups -----------------------------------------------------------

    @property
    def char_lattice(self) -> IntLattice:
        return IntLattice.standard(self.dim)

    @property
    def cochar_lattice(self) -> IntLattice:
        return IntLattice.standard(self.dim)

    @property
    def semisimple_rank(self) -> int:
        return len(self.base)

    def coroot_of(self, root: Vec) -> Vec:
        try:
            return self.coroots[self.roots.index(tuple(root))]
        except ValueError:
            raise DomainError(f"{root} is not a root") from None

    @property
    def simple_coroots(self) -> tuple[Vec, ...]:
        return tuple(self.coroot_of(a) for a in self.base)

    def cartan_of_base(self) -> Mat:
        """C[i][j] = <alpha_j, coroot_i> over the base."""
        cs = self.simple_coroots
        return tuple(
            tuple(dot(a, cs[i]) for a in self.base) for i in range(len(self.base))
        )

    def base_coords(self, v) -> tuple | None:
        """Integral same-sign coordinates of a root over the base, else None."""
        cs = _solve_in_span(self.base, v)
        if cs is None:
            return None
        if any(c.denominator != 1 for c in cs):
            return None
        ints = tuple(int(c) for c in cs)
        if all(c >= 0 for c in ints) or all(c <= 0 for c in ints):
            return ints
        return None

    def is_positive(self, root: Vec) -> bool:
        cs = self.base_coords(root)
        if cs is None:
            raise DomainError(f"{root} is not a root of the datum")
        return any(c > 0 for c in cs)

    @property
    def positive_roots(self) -> tuple[Vec, ...]:
        return tuple(a for a in self.roots if self.is_positive(a))

    def reflection_x(self, root: Vec) -> Mat:
        return _reflection_on_x(tuple(root), self.coroot_of(root))

    def reflection_y(self, root: Vec) -> Mat:
        return _reflection_on_y(tuple(root), self.coroot_of(root))

    def cartan_type(self) -> CartanType:
        return recognize_type(self.roots, self.base, cartan=self.cartan_of_base())

    def canonical_form(self) -> Mat:
        """The symmetric form sum over coroots of (x . cv)(y . cv).

        Weyl- and theta-invariant; kernel is the central direction space.
        """
        n = self.dim
        G = [[0] * n for _ in range(n)]
        for cv in self.coroots:
            for i in range(n):
                if cv[i]:
                    for j in range(n):
                        G[i][j] += cv[i] * cv[j]
        return mat(G)

    def is_automorphism(self, m: Mat) -> bool:
        rootset = set(self.roots)
        lookup = dict(zip(self.roots, self.coroots))
        mt = mat_transpose(m)
        for a, ac in zip(self.roots, self.coroots):
            img = mat_vec(m, a)
            if img not in rootset:
                return False
            if mat_vec(mt, lookup[img]) != ac:
                return False
        return True


def _solve_in_span(rows: Sequence[Vec], v) -> tuple[Fraction, ...] | None:
    """Solve c . rows = v over Q; None when v is outside the span."""
    if not rows:
        return () if not any(v) else None
    k = len(rows)
    n = len(rows[0])
    # augmented system over the transpose: rows^T c = v
    A = [[Fraction(rows[i][coord]) for i in range(k)] + [Fraction(v[coord])] for coord in range(n)]
    pivots = []
    r = 0
    for c in range(k):
        p = next((i for i in range(r, n) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = A[r][c]
        A[r] = [x / inv for x in A[r]]
        for i in range(n):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    for i in range(r, n):
        if A[i][k] != 0:
            return None
    sol = [Fraction(0)] * k
    for row_idx, c in enumerate(pivots):
        sol[c] = A[row_idx][k]
    return tuple(sol)


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def build_datum(cartan_type, lattice_choice="simply_connected") -> BasedRootDatum:
    """Datum for a semisimple type in fundamental-weight or root coordinates.

    lattice_choice: "simply_connected" (X = weight lattice, coordinates are
    fundamental weights), "adjoint" (X = root lattice, coordinates are the
    simple roots), or an explicit IntLattice whose rows are a basis of X
    written in fundamental-weight coordinates.
    """
    ct = CartanType.parse(cartan_type) if isinstance(cartan_type, str) else cartan_type
    blocks = [cartan_matrix(fam, rank) for fam, rank, _ in ct.components]
    n = sum(len(b) for b in blocks)
    C = [[0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                C[off + i][off + j] = x
        off += len(b)
    C = mat(C)
    if lattice_choice == "simply_connected":
        simples = [tuple(C[i][j] for i in range(n)) for j in range(n)]  # columns
        cosimples = list(identity_mat(n))
        return BasedRootDatum.from_base(n, simples, cosimples)
    if lattice_choice == "adjoint":
        simples = list(identity_mat(n))
        cosimples = [C[i] for i in range(n)]  # rows pair correctly under dot
        return BasedRootDatum.from_base(n, simples, cosimples)
    if isinstance(lattice_choice, IntLattice):
        B = lattice_choice
        if B.ambient_dim != n or B.rank != n:
            raise ConstructionError("explicit lattice must have full rank n")
        # roots in X-coordinates: solve c*B = root(weight coords)
        simples = []
        for j in range(n):
            w = tuple(C[i][j] for i in range(n))
            c = B.coords(w)
            if c is None:
                raise ConstructionError(
                    "lattice does not contain the root lattice"
                )
            simples.append(c)
        # coroot pairing transforms by y -> B y
        cosimples = [mat_vec(B.rows, e) for e in identity_mat(n)]
        return BasedRootDatum.from_base(n, simples, cosimples)
    raise ConstructionError(f"unknown lattice choice {lattice_choice!r}")


def classical_datum(kind: str, n: int) -> BasedRootDatum:
    """Classical group data in coordinate (e-basis) form on X = Z^n.

    kind: "GL" (A_{n-1} plus center), "SO_odd" (B-type, X = Z^n),
    "Sp" (C-type, X = Z^n), "SO_even" (D-type, X = Z^n), "T" (torus).
    """
    if kind == "T":
        return BasedRootDatum(n, (), (), ())
    if kind == "GL":
        simples = [
            tuple(1 if k == i else -1 if k == i + 1 else 0 for k in range(n))
            for i in range(n - 1)
        ]
        return BasedRootDatum.from_base(n, simples, simples)
    if kind == "SO_odd":
        simples = [
            tuple(1 if k == i else -1 if k == i + 1 else 0 for k in range(n))
            for i in range(n - 1)
        ] + [tuple(1 if k == n - 1 else 0 for k in range(n))]
        cosimples = simples[:-1] + [tuple(2 if k == n - 1 else 0 for k in range(n))]
        return BasedRootDatum.from_base(n, simples, cosimples)
    if kind == "Sp":
        simples = [
            tuple(1 if k == i else -1 if k == i + 1 else 0 for k in range(n))
            for i in range(n - 1)
        ] + [tuple(2 if k == n - 1 else 0 for k in range(n))]
        cosimples = simples[:-1] + [tuple(1 if k == n - 1 else 0 for k in range(n))]
        return BasedRootDatum.from_base(n, simples, cosimples)
    if kind == "SO_even":
        if n < 2:
            raise ConstructionError("SO_even needs rank >= 2")
        simples = [
            tuple(1 if k == i else -1 if k == i + 1 else 0 for k in range(n))
            for i in range(n - 1)
        ] + [tuple(1 if k in (n - 2, n - 1) else 0 for k in range(n))]
        return BasedRootDatum.from_base(n, simples, simples)
    raise ConstructionError(f"unknown classical kind {kind!r}")


def datum_direct_sum(*data: BasedRootDatum) -> BasedRootDatum:
    """Block direct sum of data on the concatenated coordinate space."""
    dim = sum(d.dim for d in data)

    def pad(v, off, k):
        return (0,) * off + tuple(v) + (0,) * (dim - off - k)

    roots, coroots, base = [], [], []
    off = 0
    for d in data:
        roots += [pad(a, off, d.dim) for a in d.roots]
        coroots += [pad(c, off, d.dim) for c in d.coroots]
        base += [pad(a, off, d.dim) for a in d.base]
        off += d.dim
    order = sorted(range(len(roots)), key=lambda i: roots[i])
    return BasedRootDatum(
        dim,
        tuple(roots[i] for i in order),
        tuple(coroots[i] for i in order),
        tuple(base),
    )


# ---------------------------------------------------------------------------
# type recognition
# ---------------------------------------------------------------------------


def _primitive(v: Vec) -> Vec:
    g = math.gcd(*[abs(x) for x in v]) if any(v) else 1
    w = tuple(x // g for x in v)
    for x in w:
        if x != 0:
            return w if x > 0 else vec_neg(w)
    return w


def _string_cartan(rootset: frozenset, beta: Vec, alpha: Vec) -> int:
    """Cartan integer <beta, coroot(alpha)> from the alpha-string through beta."""
    p = 0
    v = vec_sub(beta, alpha)
    while v in rootset:
        p += 1
        v = vec_sub(v, alpha)
    q = 0
    v = vec_add(beta, alpha)
    while v in rootset:
        q += 1
        v = vec_add(v, alpha)
    return p - q


def _components_of(C: Mat) -> list[list[int]]:
    n = len(C)
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        comp = [s]
        seen[s] = True
        stack = [s]
        while stack:
            i = stack.pop()
            for j in range(n):
                if not seen[j] and C[i][j] != 0:
                    seen[j] = True
                    comp.append(j)
                    stack.append(j)
        comps.append(sorted(comp))
    return comps


def _match_bourbaki(Csub: Mat, fam: str, rank: int) -> tuple[int, ...] | None:
    """Backtracking search for perm with Cb[a][b] == Csub[perm[a]][perm[b]]."""
    Cb = cartan_matrix(fam, rank)
    n = rank
    perm: list[int] = []
    used = [False] * n

    def extend(k: int) -> bool:
        if k == n:
            return True
        for p in range(n):
            if used[p]:
                continue
            ok = all(
                Cb[k][j] == Csub[p][perm[j]] and Cb[j][k] == Csub[perm[j]][p]
                for j in range(k)
            )
            if ok:
                used[p] = True
                perm.append(p)
                if extend(k + 1):
                    return True
                perm.pop()
                used[p] = False
        return False

    return tuple(perm) if extend(0) else None


def _candidates(rank: int) -> list[tuple[str, int]]:
    out = [("A", rank)]
    if rank >= 2:
        out.append(("B", rank))
    if rank >= 2:
        out.append(("C", rank))
    if rank >= 4:
        out.append(("D", rank))
    if rank in (6, 7, 8):
        out.append(("E", rank))
    if rank == 4:
        out.append(("F", rank))
    if rank == 2:
        out.append(("G", rank))
    return out


def _match_component(sub: Mat) -> tuple[str, int, tuple[int, ...]] | None:
    """Match a connected Cartan block; a label whose Bourbaki matrix equals
    the block in the given order wins over permuted matches (so a rank-2
    block keeps its natural B/C reading)."""
    rank = len(sub)
    for fam, r in _candidates(rank):
        if cartan_matrix(fam, r) == sub:
            return (fam, r, tuple(range(rank)))
    for fam, r in _candidates(rank):
        if fam == "C" and r == 2:
            continue  # permuted C2 is B2
        perm = _match_bourbaki(sub, fam, r)
        if perm is not None:
            return (fam, r, perm)
    return None


def recognize_type(roots: Iterable[Vec], base: Sequence[Vec], cartan: Mat | None = None) -> CartanType:
    """Recognize the Cartan type of a (possibly non-reduced) root system.

    Rank-2 B/C ambiguity is reported canonically as B2.  BC is detected
    from non-reduced rays.  The permutation in each component maps
    Bourbaki node positions to indices into the supplied base.
    """
    rootset = frozenset(tuple(v) for v in roots)
    base = tuple(tuple(v) for v in base)
    if not base:
        return CartanType(())
    if any(not any(v) for v in rootset):
        raise AxiomError("zero vector among roots")
    for v in rootset:
        if vec_neg(v) not in rootset:
            raise AxiomError(f"root set not symmetric at {v}")
    for b in base:
        if b not in rootset:
            raise AxiomError(f"base member {b} is not a root")

    # ray analysis: non-reduced rays carry {v, 2v}
    rays: dict[Vec, list[Vec]] = {}
    for v in rootset:
        rays.setdefault(_primitive(v), []).append(v)
    doubled_shorts = set()
    reduced = set()
    for members in rays.values():
        pos = sorted(
            (m for m in members if _pos_sign(m)), key=lambda m: sum(abs(x) for x in m)
        )
        if len(pos) == 1:
            reduced.update(pos)
            reduced.add(vec_neg(pos[0]))
        elif len(pos) == 2 and pos[1] == vec_scale(2, pos[0]):
            doubled_shorts.add(pos[0])
            reduced.add(pos[0])
            reduced.add(vec_neg(pos[0]))
        else:
            raise AxiomError(f"ray through {pos[0]} is not of the form {{v}} or {{v, 2v}}")
    for b in base:
        if all(x % 2 == 0 for x in b) and tuple(x // 2 for x in b) in rootset:
            raise AxiomError(f"base member {b} is a doubled root")
    for v in rootset:
        cs = _solve_in_span(base, v)
        if cs is None or any(c.denominator != 1 for c in cs):
            raise AxiomError(f"root {v} is not an integral base combination")
        ints = [int(c) for c in cs]
        if not (all(c >= 0 for c in ints) or all(c <= 0 for c in ints)):
            raise AxiomError(f"root {v} has mixed signs over the base")

    reduced_frozen = frozenset(reduced)
    k = len(base)
    if cartan is None or doubled_shorts:
        C = tuple(
            tuple(
                2 if i == j else _string_cartan(reduced_frozen, base[j], base[i])
                for j in range(k)
            )
            for i in range(k)
        )
    else:
        C = mat(cartan)
    for i in range(k):
        for j in range(k):
            if i != j and C[i][j] > 0:
                raise AxiomError("positive off-diagonal Cartan entry; base is not a base")
            if i != j and (C[i][j] == 0) != (C[j][i] == 0):
                raise AxiomError("Cartan matrix zero pattern is not symmetric")

    comps = _components_of(C)
    out = []
    for comp in comps:
        sub = tuple(tuple(C[i][j] for j in comp) for i in comp)
        match = _match_component(sub)
        if match is None:
            raise AxiomError(f"component of rank {len(comp)} matches no Cartan type")
        fam, r, perm = match
        perm = tuple(comp[p] for p in perm)
        comp_base = tuple(base[i] for i in comp)
        has_doubled = any(
            _solve_in_span(comp_base, s) is not None for s in doubled_shorts
        )
        if has_doubled:
            if not (fam == "B" or (fam == "A" and r == 1) or (fam == "C" and r == 2)):
                raise AxiomError("non-reduced rays outside a B/BC-shaped component")
            fam = "BC"
        out.append((fam, r, perm))
    return CartanType(tuple(out))


def _pos_sign(v: Vec) -> bool:
    for x in v:
        if x != 0:
            return x > 0
    return False


# ---------------------------------------------------------------------------
# orbits, strong orthogonality, longest elements
# ---------------------------------------------------------------------------


def weyl_orbit(v, generators: Sequence[Mat], cap: int = ORBIT_CAP) -> tuple:
    """Closure of v under the given linear maps; sorted for determinism."""
    start = tuple(Fraction(x) for x in v)
    seen = {start}
    frontier = [start]
    while frontier:
        new = []
        for x in frontier:
            for g in generators:
                y = tuple(
                    sum(Fraction(g[i][j]) * x[j] for j in range(len(x)))
                    for i in range(len(g))
                )
                if y not in seen:
                    seen.add(y)
                    new.append(y)
                    if len(seen) > cap:
                        raise OrbitSizeError("orbit exceeds enumeration cap")
        frontier = new
    out = sorted(seen)
    if all(x.denominator == 1 for pt in out for x in pt):
        return tuple(tuple(int(x) for x in pt) for pt in out)
    return tuple(out)


def strongly_orthogonal(alpha, beta, roots: Iterable[Vec]) -> bool:
    """True iff alpha != +-beta and neither sum nor difference is a root."""
    rootset = set(tuple(v) for v in roots)
    a, b = tuple(alpha), tuple(beta)
    if a not in rootset or b not in rootset:
        raise DomainError("inputs must be roots")
    if a == b or a == vec_neg(b):
        return False
    return vec_add(a, b) not in rootset and vec_sub(a, b) not in rootset


def longest_element(datum: BasedRootDatum, subset: Sequence[Vec] | None = None) -> Mat:
    """Longest element of the Weyl group of the given simple subset, on X."""
    simples = tuple(tuple(v) for v in (datum.base if subset is None else subset))
    w = identity_mat(datum.dim)
    if not simples:
        return w
    refs = {s: datum.reflection_x(s) for s in simples}
    while True:
        movable = next((s for s in simples if datum.is_positive(mat_vec(w, s))), None)
        if movable is None:
            return w
        w = mat_mul(w, refs[movable])


# ---------------------------------------------------------------------------
# restricted root systems
# ---------------------------------------------------------------------------


def form_value(G: Mat, x, y) -> Fraction:
    return sum(Fraction(G[i][j]) * x[i] * y[j] for i in range(len(G)) for j in range(len(G)))


@dataclass(frozen=True)
class RestrictedRootSystem:
    """Restricted system {alpha - theta(alpha)}, kept unhalved inside X."""

    ambient_dim: int
    restricted: tuple[Vec, ...]
    reduced: tuple[Vec, ...]
    base: tuple[Vec, ...]
    form: Mat  # ambient invariant form restricting to the system

    def cartan_pair(self, beta, gamma) -> int:
        """<beta, restricted coroot of gamma> = 2 (beta,gamma)/(gamma,gamma)."""
        num = 2 * form_value(self.form, beta, gamma)
        den = form_value(self.form, gamma, gamma)
        val = num / den
        if val.denominator != 1:
            raise AxiomError("non-integral restricted Cartan number")
        return int(val)

    def reflection(self, gamma) -> tuple:
        """Reflection matrix in gamma on the ambient space, over Q."""
        n = self.ambient_dim
        gg = form_value(self.form, gamma, gamma)
        rows = []
        for i in range(n):
            e = tuple(1 if k == i else 0 for k in range(n))
            coef = 2 * form_value(self.form, e, gamma) / gg
            rows.append(
                tuple(Fraction(int(i == j)) - coef * gamma[j] for j in range(n))
            )
        # entries of the row describe images of basis vectors: transpose
        return mat_transpose(tuple(rows))

    @property
    def rank(self) -> int:
        return len(self.base)

    @property
    def weyl_generators(self) -> tuple:
        return tuple(self.reflection(g) for g in self.base)

    def weyl_group(self, cap: int = 10**6) -> tuple:
        """All little-Weyl elements as matrices on the ambient space."""
        gens = self.weyl_generators
        n = self.ambient_dim
        ident = tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))
        seen = {ident}
        frontier = [ident]
        while frontier:
            new = []
            for w in frontier:
                for g in gens:
                    prod = tuple(
                        tuple(
                            sum(g[i][k] * w[k][j] for k in range(n)) for j in range(n)
                        )
                        for i in range(n)
                    )
                    if prod not in seen:
                        seen.add(prod)
                        new.append(prod)
                        if len(seen) > cap:
                            raise OrbitSizeError("little Weyl group exceeds cap")
            frontier = new
        return tuple(sorted(seen))


def restricted_system(datum: BasedRootDatum, theta: Mat) -> RestrictedRootSystem:
    """Restricted roots {alpha - theta(alpha)} with base from the simples.

    Requires theta to be an involutive automorphism and the base to be a
    theta-basis (positive non-fixed roots go negative).
    """
    _check_involution(datum, theta)
    diffs = []
    for a in datum.roots:
        d = vec_sub(a, mat_vec(theta, a))
        if any(d):
            diffs.append(d)
    restricted = tuple(sorted(set(diffs)))
    base = []
    for a in datum.base:
        d = vec_sub(a, mat_vec(theta, a))
        if any(d) and d not in base:
            base.append(d)
    rays: dict[Vec, list[Vec]] = {}
    for v in restricted:
        rays.setdefault(_primitive(v), []).append(v)
    reduced = []
    for members in rays.values():
        pos = sorted((m for m in members if _pos_sign(m)), key=lambda m: sum(abs(x) for x in m))
        if pos:
            reduced.append(pos[0])
            reduced.append(vec_neg(pos[0]))
    sys = RestrictedRootSystem(
        datum.dim,
        restricted,
        tuple(sorted(reduced)),
        tuple(base),
        datum.canonical_form(),
    )
    if restricted:
        _check_restricted_base(sys)
    return sys


def _check_involution(datum: BasedRootDatum, theta: Mat) -> None:
    if mat_mul(theta, theta) != identity_mat(datum.dim):
        raise InvolutionError("theta is not an involution")
    if not datum.is_automorphism(theta):
        raise InvolutionError("theta does not preserve the root datum")


def _check_restricted_base(sys: RestrictedRootSystem) -> None:
    for v in sys.restricted:
        cs = _solve_in_span(sys.base, v)
        if cs is None or any(c.denominator != 1 for c in cs):
            raise AxiomError(f"restricted root {v} is not integral over the base")
        ints = [int(c) for c in cs]
        if not (all(c >= 0 for c in ints) or all(c <= 0 for c in ints)):
            raise AxiomError(f"restricted root {v} has mixed signs over the base")
    for g in sys.base:
        ref = sys.reflection(g)
        image = {
            tuple(sum(ref[i][j] * v[j] for j in range(sys.ambient_dim)) for i in range(sys.ambient_dim))
            for v in sys.restricted
        }
        if image != {tuple(map(Fraction, v)) for v in sys.restricted}:
            raise AxiomError(f"restricted reflection at {g} does not preserve the system")


# ---------------------------------------------------------------------------
# folding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FoldResult:
    """Result of folding root/coroot orbits under an involution."""

    folded_coroots: tuple[Vec, ...]  # orbit sums
    folded_roots: tuple[tuple, ...]  # orbit averages, possibly fractional
    cartan: Mat
    orbits: tuple[tuple[int, ...], ...]  # index orbits into the inputs


def fold(
    orbits: Sequence[Sequence[int]],
    roots: Sequence[Vec],
    coroots: Sequence[Vec],
    involution_on_coroots: Mat,
) -> FoldResult:
    """Fold coroot orbits of an involution: sums on the coroot side,
    averages on the root side, with the folded Cartan matrix.

    Each orbit is a set of indices of size 1 or 2; a pair must consist of
    mutually orthogonal coroots swapped by the involution.
    """
    for orb in orbits:
        if len(orb) == 1:
            i = orb[0]
            if mat_vec(involution_on_coroots, coroots[i]) != tuple(coroots[i]):
                raise FoldError(f"singleton coroot {coroots[i]} is not fixed")
        elif len(orb) == 2:
            i, j = orb
            if mat_vec(involution_on_coroots, coroots[i]) != tuple(coroots[j]):
                raise FoldError(
                    f"pair {coroots[i]}, {coroots[j]} is not swapped by the involution"
                )
            if dot(roots[i], coroots[j]) != 0 or dot(roots[j], coroots[i]) != 0:
                raise FoldError("pair members are not orthogonal")
        else:
            raise FoldError("orbits must have size 1 or 2")
    sums = []
    avgs = []
    for orb in orbits:
        s = (0,) * len(coroots[orb[0]])
        for i in orb:
            s = vec_add(s, coroots[i])
        sums.append(s)
        a = tuple(
            Fraction(sum(roots[i][k] for i in orb), len(orb))
            for k in range(len(roots[orb[0]]))
        )
        avgs.append(a)
    cart = []
    for i, cv in enumerate(sums):
        row = []
        for j, av in enumerate(avgs):
            val = sum(Fraction(cv[k]) * av[k] for k in range(len(cv)))
            if val.denominator != 1:
                raise FoldError("folded Cartan number is not integral")
            row.append(int(val))
        cart.append(tuple(row))
    return FoldResult(
        tuple(sums), tuple(avgs), tuple(cart), tuple(tuple(o) for o in orbits)
    )
