"""Involutions of based root data and their indices.

Frames bundle a datum, a lattice involution theta whose base is a
theta-basis, and a finite *-action commuting with theta.  On top of them:
theta-indices, the rank-1 admissibility catalog, the full admissibility
check by rank-1 reduction, and ASCII Satake diagrams.

Sign conventions: theta acts on X; the action on Y is by the transpose.
The diagram involution is theta_star = -w_theta . theta with w_theta the
longest element of the Weyl group of the fixed simples Delta_0(theta).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .lattice import (
    FiniteActionModule,
    IntLattice,
    Mat,
    Vec,
    identity_mat,
    mat,
    mat_inverse_int,
    mat_mul,
    mat_vec,
    vec_add,
    vec_neg,
    vec_sub,
)
from .rootdata import (
    AxiomError,
    BasedRootDatum,
    InvolutionError,
    RestrictedRootSystem,
    RootDataError,
    _check_involution,
    cartan_matrix,
    longest_element,
    restricted_system,
)


class BasisError(RootDataError):
    """The base is not a theta-basis; the message names a violating root."""


class RankError(RootDataError):
    """An operation required restricted rank 1."""


class QuasiSplitViolation(RootDataError):
    """Some root has vanishing *-orbit sum (anisotropic kernel meets roots)."""


def _neg_mat(m: Mat) -> Mat:
    return tuple(tuple(-x for x in row) for row in m)


def _madic_functional(vectors: Sequence[Vec]):
    big = max((abs(x) for v in vectors for x in v), default=0)
    M = 2 * big + 2

    def ell(v) -> int:
        s = 0
        for x in reversed(v):
            s = s * M + x
        return s

    return ell


# ---------------------------------------------------------------------------
# theta-bases
# ---------------------------------------------------------------------------


def make_theta_basis(datum: BasedRootDatum, theta: Mat) -> tuple[tuple[Vec, ...], Mat]:
    """A base Delta' that is a theta-basis, with the Weyl element w mapping
    the datum's base onto it.

    Positivity is rebuilt from the lexicographic key (l(alpha - theta alpha),
    height(alpha)) where l is an exact generic functional on the anti-fixed
    projection; additivity of the key makes the positive set closed, and
    the first component forces positive non-fixed roots to go negative.
    When the existing base already works it is returned with w = identity.
    """
    _check_involution(datum, theta)
    if all(
        mat_vec(theta, a) == a or not datum.is_positive(mat_vec(theta, a))
        for a in datum.positive_roots
    ):
        return datum.base, identity_mat(datum.dim)
    diffs = [vec_sub(a, mat_vec(theta, a)) for a in datum.roots]
    ell = _madic_functional(diffs)
    height = _height_functional(datum)

    def key(a: Vec) -> tuple[int, int]:
        return (ell(vec_sub(a, mat_vec(theta, a))), height(a))

    pos = [a for a in datum.roots if key(a) > (0, 0)]
    if len(pos) * 2 != len(datum.roots):
        raise InvolutionError("positivity key failed to split the roots")
    posset = set(pos)
    base = []
    for a in pos:
        if not any(
            vec_sub(a, b) in posset for b in pos if b != a
        ):
            base.append(a)
    base_t = tuple(sorted(base))
    w = _weyl_mapping_positives(datum, posset)
    if {mat_vec(w, a) for a in datum.base} != set(base_t):
        raise InvolutionError("chamber walk did not land on the new base")
    return base_t, w


def _height_functional(datum: BasedRootDatum):
    coords = {a: datum.base_coords(a) for a in datum.roots}

    def h(a: Vec) -> int:
        return sum(coords[a])

    return h


def _weyl_mapping_positives(datum: BasedRootDatum, target_pos: set) -> Mat:
    """Weyl element w with w(standard positives) = target positives."""
    # walk from the target chamber down to the standard one, then invert
    v = identity_mat(datum.dim)
    current = set(target_pos)
    std_pos = set(datum.positive_roots)
    guard = len(datum.roots) ** 2 + 4
    while current != std_pos:
        guard -= 1
        if guard < 0:
            raise InvolutionError("chamber walk failed to terminate")
        alpha = next(a for a in datum.base if vec_neg(a) in current)
        s = datum.reflection_x(alpha)
        current = {mat_vec(s, a) for a in current}
        v = mat_mul(s, v)
    return mat_inverse_int(v)


def rebase_datum(datum: BasedRootDatum, new_base: Sequence[Vec]) -> BasedRootDatum:
    """The same root datum presented on a different base."""
    out = BasedRootDatum(
        datum.dim, datum.roots, datum.coroots, tuple(tuple(b) for b in new_base)
    )
    out.validate()
    return out


def frame_from_raw(
    datum: BasedRootDatum,
    theta: Mat,
    star_gens: "Mapping[str, Mat] | FiniteActionModule | None" = None,
    cocycle: Mapping | None = None,
) -> GammaThetaFrame:
    """Build a frame from a raw involution and raw *-generators: move the
    base to a theta-basis, then Weyl-correct each *-generator to it.  A
    prebuilt FiniteActionModule is passed through uncorrected."""
    new_base, _w = make_theta_basis(datum, theta)
    based = datum if set(new_base) == set(datum.base) else rebase_datum(datum, new_base)
    if isinstance(star_gens, FiniteActionModule):
        return GammaThetaFrame.build(based, theta, star_gens, cocycle)
    corrected = {
        lab: weyl_correct_to_base(based, mat(m)) for lab, m in (star_gens or {}).items()
    }
    return GammaThetaFrame.build(based, theta, corrected, cocycle)


def quadratic_galois_module(dim: int, matrix: Mat | None = None) -> FiniteActionModule:
    """Symbolic order-2 Galois module with generator label "s".

    The generator may act trivially on X (an inner twist); building it
    from generators instead would collapse it into the identity."""
    m = identity_mat(dim) if matrix is None else mat(matrix)
    if mat_mul(m, m) != identity_mat(dim):
        raise InvolutionError("quadratic generator must square to the identity")
    table = {("e", "e"): "e", ("e", "s"): "s", ("s", "e"): "s", ("s", "s"): "e"}
    mats = {"e": identity_mat(dim), "s": m}
    return FiniteActionModule(("e", "s"), table, mats, IntLattice.standard(dim))


def weyl_correct_to_base(datum: BasedRootDatum, m: Mat) -> Mat:
    """w . m stabilizing the base, for an automorphism m (the *-action)."""
    if not datum.is_automorphism(m):
        raise InvolutionError("matrix is not a datum automorphism")
    target = {mat_vec(m, a) for a in datum.positive_roots}
    # find u with u(target) = std positives; then (u m) stabilizes the base
    v = identity_mat(datum.dim)
    current = set(target)
    std_pos = set(datum.positive_roots)
    guard = len(datum.roots) ** 2 + 4
    while current != std_pos:
        guard -= 1
        if guard < 0:
            raise InvolutionError("chamber walk failed to terminate")
        alpha = next(a for a in datum.base if vec_neg(a) in current)
        s = datum.reflection_x(alpha)
        current = {mat_vec(s, a) for a in current}
        v = mat_mul(s, v)
    out = mat_mul(v, m)
    if {mat_vec(out, a) for a in datum.base} != set(datum.base):
        raise InvolutionError("base correction failed")
    return out


# ---------------------------------------------------------------------------
# frames and indices
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GammaThetaFrame:
    """Datum + commuting (*-action, involution) with a theta-basis base."""

    datum: BasedRootDatum
    theta: Mat
    star: FiniteActionModule
    delta0_theta: tuple[Vec, ...]
    w_theta: Mat
    theta_star: Mat
    cocycle: Mapping | None = None

    @staticmethod
    def build(
        datum: BasedRootDatum,
        theta: Mat,
        star_gens: "Mapping[str, Mat] | FiniteActionModule | None" = None,
        cocycle: Mapping | None = None,
    ) -> "GammaThetaFrame":
        """star_gens may be a prebuilt FiniteActionModule; this admits
        group elements acting trivially on X (inner twists) that matrix
        generation would collapse into the identity."""
        theta = mat(theta)
        _check_involution(datum, theta)
        for a in datum.positive_roots:
            img = mat_vec(theta, a)
            if img != a and datum.is_positive(img):
                raise BasisError(f"base is not a theta-basis: theta({a}) = {img} > 0")
        delta0 = tuple(a for a in datum.base if mat_vec(theta, a) == a)
        w_theta = longest_element(datum, delta0)
        theta_star = mat_mul(_neg_mat(w_theta), theta)
        if {mat_vec(theta_star, a) for a in datum.base} != set(datum.base):
            raise BasisError("theta_star does not stabilize the base")
        if isinstance(star_gens, FiniteActionModule):
            star = star_gens
            if star.lattice.ambient_dim != datum.dim:
                raise InvolutionError("*-module lattice has the wrong dimension")
        else:
            star = FiniteActionModule.from_generators(
                dict(star_gens or {}), IntLattice.standard(datum.dim)
            )
        for lab in star.labels:
            m = star.matrices[lab]
            if not datum.is_automorphism(m):
                raise InvolutionError(f"*-action {lab!r} is not a datum automorphism")
            if mat_mul(m, theta) != mat_mul(theta, m):
                raise InvolutionError(f"*-action {lab!r} does not commute with theta")
        for a in datum.roots:
            total = (0,) * datum.dim
            for lab in star.labels:
                total = vec_add(total, mat_vec(star.matrices[lab], a))
            if not any(total):
                raise QuasiSplitViolation(
                    f"root {a} has vanishing *-orbit sum; frame is not quasi-split"
                )
        for lab in star.labels:
            m = star.matrices[lab]
            if {mat_vec(m, a) for a in datum.base} != set(datum.base):
                raise InvolutionError(f"*-action {lab!r} does not stabilize the base")
        return GammaThetaFrame(datum, theta, star, delta0, w_theta, theta_star, cocycle)

    @property
    def phi0_theta(self) -> tuple[Vec, ...]:
        return tuple(a for a in self.datum.roots if mat_vec(self.theta, a) == a)

    def restricted(self) -> RestrictedRootSystem:
        return restricted_system(self.datum, self.theta)

    def theta_check(self) -> Mat:
        """theta on Y (the transpose)."""
        from .lattice import mat_transpose

        return mat_transpose(self.theta)

    def index(self) -> "GammaThetaIndex":
        return build_index(self)

    def satake(self) -> str:
        return satake_string(self.datum, self.delta0_theta, self.theta_star)


@dataclass(frozen=True, eq=False)
class GammaThetaIndex:
    """The sextuple (Y, Delta, Delta_0(Gamma), Delta_0(theta), sigma*, theta*).

    Under the quasi-split normalization Delta_0(Gamma) is empty.
    """

    datum: BasedRootDatum
    delta0_gamma: tuple[Vec, ...]
    delta0_theta: tuple[Vec, ...]
    sigma_star: Mapping[str, Mat]
    theta_star: Mat
    theta: Mat
    w_theta: Mat

    def rebuild_theta(self) -> Mat:
        """theta = -w_theta . theta_star; must agree with the stored theta."""
        return mat_mul(_neg_mat(self.w_theta), self.theta_star)


def build_index(frame: GammaThetaFrame) -> GammaThetaIndex:
    idx = GammaThetaIndex(
        datum=frame.datum,
        delta0_gamma=(),
        delta0_theta=frame.delta0_theta,
        sigma_star={lab: frame.star.matrices[lab] for lab in frame.star.labels},
        theta_star=frame.theta_star,
        theta=frame.theta,
        w_theta=frame.w_theta,
    )
    if idx.rebuild_theta() != frame.theta:
        raise InvolutionError("index does not determine theta")
    return idx


# ---------------------------------------------------------------------------
# basic Gamma_theta conditions
# ---------------------------------------------------------------------------


def check_basic_gamma_theta(index) -> tuple[bool, str | None]:
    """Conditions for a basic index under the quasi-split normalization:
    (i) every root whose *-orbit trace is theta-fixed is itself theta-fixed
    (the Gamma-side alternative is vacuous), and (iv) Delta_0(theta) is
    sigma*-stable.  Conditions (ii)-(iii) are vacuous."""
    if isinstance(index, GammaThetaFrame):
        index = build_index(index)
    datum = index.datum
    theta = index.theta
    # close the recorded *-maps into the full group before tracing
    group = FiniteActionModule.from_generators(
        dict(index.sigma_star), IntLattice.standard(datum.dim)
    )
    mats = [group.matrices[lab] for lab in group.labels]
    for a in datum.roots:
        trace = (0,) * datum.dim
        for m in mats:
            trace = vec_add(trace, mat_vec(m, a))
        if mat_vec(theta, trace) == trace and mat_vec(theta, a) != a:
            return False, "condition (i)"
    d0 = set(index.delta0_theta)
    for lab, m in index.sigma_star.items():
        if {mat_vec(m, a) for a in d0} != d0:
            return False, "condition (iv)"
    return True, None


# ---------------------------------------------------------------------------
# rank-1 admissibility catalog
# ---------------------------------------------------------------------------

# each entry: label family, rank predicate, components builder returning
# (list of (family, rank), black node set, arc set) with global 1-based
# Bourbaki numbering across the listed components
def _entry_a1(l):
    return [("A", 1)], set(), set()


def _entry_al(l):
    return [("A", l)], set(range(2, l)), {(1, l)}


def _entry_bl(l):
    return [("B", l)], set(range(2, l + 1)), set()


def _entry_cl(l):
    return [("C", l)], {1} | set(range(3, l + 1)), set()


def _entry_dl(l):
    return [("D", l)], set(range(2, l + 1)), set()


def _entry_f4(l):
    return [("F", 4)], {1, 2, 3}, set()


def _entry_d2(l):
    return [("A", 1), ("A", 1)], set(), {(1, 2)}


RANK1_CATALOG = (
    ("A1", lambda l: l == 1, _entry_a1),
    ("Al", lambda l: l >= 2, _entry_al),
    ("Bl", lambda l: l >= 2, _entry_bl),
    ("Cl", lambda l: l >= 3, _entry_cl),
    ("Dl", lambda l: l >= 3, _entry_dl),
    ("F4", lambda l: l == 4, _entry_f4),
    ("D2", lambda l: l == 2, _entry_d2),
)


def _diagram_of(components, blacks, arcs):
    """Cartan matrix of a multi-component Bourbaki diagram, plus colors/arcs."""
    mats = [cartan_matrix(f, r) for f, r in components]
    n = sum(len(m) for m in mats)
    C = [[0] * n for _ in range(n)]
    off = 0
    for m in mats:
        for i, row in enumerate(m):
            for j, x in enumerate(row):
                C[off + i][off + j] = x
        off += len(m)
    return mat(C), frozenset(b - 1 for b in blacks), frozenset(
        (a - 1, b - 1) for a, b in arcs
    )


def _iso_match(C1, black1, arcs1, C2, black2, arcs2) -> bool:
    """Does a bijection of nodes carry (C1, black1, arcs1) to (C2, ...)?"""
    n = len(C1)
    if len(C2) != n or len(black1) != len(black2) or len(arcs1) != len(arcs2):
        return False
    arcset2 = {frozenset(p) for p in arcs2}
    perm: list[int] = []
    used = [False] * n

    def extend(k: int) -> bool:
        if k == n:
            mapped = {frozenset((perm[a], perm[b])) for a, b in arcs1}
            return mapped == arcset2
        for p in range(n):
            if used[p]:
                continue
            if (k in black1) != (p in black2):
                continue
            if all(
                C1[k][j] == C2[p][perm[j]] and C1[j][k] == C2[perm[j]][p]
                for j in range(k)
            ):
                used[p] = True
                perm.append(p)
                if extend(k + 1):
                    return True
                perm.pop()
                used[p] = False
        return False

    return extend(0)


def _support_diagram(sub: BasedRootDatum, theta: Mat):
    """Diagram of the non-compact part of a(lambda) support system: Cartan
    matrix, black positions, theta*-arcs between white nodes.  Components
    consisting entirely of theta-fixed roots are dropped (compact pieces)."""
    delta0 = tuple(a for a in sub.base if mat_vec(theta, a) == a)
    w = longest_element(sub, delta0)
    theta_star = mat_mul(_neg_mat(w), theta)
    C = sub.cartan_of_base()
    k = len(sub.base)
    # connected components of the base diagram
    seen = [False] * k
    comps = []
    for s in range(k):
        if seen[s]:
            continue
        comp = [s]
        seen[s] = True
        stack = [s]
        while stack:
            i = stack.pop()
            for j in range(k):
                if not seen[j] and C[i][j] != 0:
                    seen[j] = True
                    comp.append(j)
                    stack.append(j)
        comps.append(sorted(comp))
    blackset = {i for i, a in enumerate(sub.base) if a in set(delta0)}
    keep = [c for c in comps if not set(c) <= blackset]
    nodes = [i for c in keep for i in c]
    index_of = {i: t for t, i in enumerate(nodes)}
    Csub = tuple(tuple(C[i][j] for j in nodes) for i in nodes)
    blacks = frozenset(index_of[i] for i in nodes if i in blackset)
    star_img = {}
    for i in nodes:
        img = mat_vec(theta_star, sub.base[i])
        if img not in sub.base:
            raise InvolutionError("theta* does not permute the support base")
        j = sub.base.index(img)
        if j in index_of:
            star_img[index_of[i]] = index_of[j]
    arcs = frozenset(
        (a, b)
        for a, b in ((i, star_img[i]) for i in range(len(nodes)))
        if a < b and a not in blacks and b not in blacks
    )
    return Csub, blacks, arcs


def rank1_admissible(sub: BasedRootDatum, theta: Mat) -> tuple[bool, str | None]:
    """Match a restricted-rank-1 system against the admissible catalog.

    Returns (True, concrete label like "B3") on a match, (False, None)
    otherwise.  Raises RankError unless the restricted rank is exactly 1.
    """
    rs = restricted_system(sub, theta)
    rays = {_ray_key(g) for g in rs.base}
    if len(rays) != 1:
        raise RankError(f"restricted rank is {len(rays)}, not 1")
    Csub, blacks, arcs = _support_diagram(sub, theta)
    n = len(Csub)
    for label, pred, builder in RANK1_CATALOG:
        for l in range(1, n + 1):
            if not pred(l):
                continue
            comps, bl, ar = builder(l)
            if sum(r for _f, r in comps) != n:
                continue
            C2, b2, a2 = _diagram_of(comps, bl, ar)
            if _iso_match(Csub, blacks, arcs, C2, b2, a2):
                if label == "D2":
                    return True, "D2"
                fam = comps[0][0]
                return True, f"{fam}{comps[0][1]}"
    return False, None


def _ray_key(v: Vec) -> Vec:
    import math as _math

    g = _math.gcd(*[abs(x) for x in v]) if any(v) else 1
    w = tuple(x // g for x in v)
    for x in w:
        if x:
            return w if x > 0 else vec_neg(w)
    return w


# ---------------------------------------------------------------------------
# full admissibility by rank-1 reduction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RayCertificate:
    ray: Vec  # restricted base member (unhalved)
    label: str | None
    ok: bool
    support_base: tuple[Vec, ...]


@dataclass(frozen=True)
class AdmissibilityReport:
    ok: bool
    witness: Vec | None
    certificates: tuple[RayCertificate, ...]


def support_subsystem(datum: BasedRootDatum, theta: Mat, ray: Vec) -> BasedRootDatum:
    """Closed subsystem of roots projecting into the ray, plus fixed roots."""
    members = []
    for a in datum.roots:
        d = vec_sub(a, mat_vec(theta, a))
        if not any(d):
            members.append(a)
            continue
        k = _ratio(d, ray)
        if k is not None:
            members.append(a)
    memberset = set(members)
    pos = [a for a in members if datum.is_positive(a)]
    indec = [
        a for a in pos if not any(vec_sub(a, b) in memberset and datum.is_positive(vec_sub(a, b)) for b in pos if b != a)
    ]
    sub = BasedRootDatum.from_base(
        datum.dim, indec, [datum.coroot_of(a) for a in indec]
    )
    if set(sub.roots) != memberset:
        raise InvolutionError("support subsystem is not closed over its base")
    return sub


def _ratio(d: Vec, ray: Vec):
    """d = k * ray for a nonzero rational k -> k, else None."""
    from fractions import Fraction

    k = None
    for a, b in zip(d, ray):
        if b == 0:
            if a != 0:
                return None
            continue
        f = Fraction(a, b)
        if k is None:
            k = f
        elif k != f:
            return None
    return k if k not in (None, 0) else None


def check_admissible(frame: GammaThetaFrame) -> AdmissibilityReport:
    """Rank-1 reduction: every restricted base ray's support must match the
    admissible catalog; integral-multiple projections define the support.

    A frame whose restricted set is not a root system at all is reported
    inadmissible rather than raised out of."""
    try:
        rs = frame.restricted()
    except AxiomError:
        return AdmissibilityReport(False, None, ())
    seen_rays = []
    certs = []
    ok = True
    witness = None
    for g in rs.base:
        key = _ray_key(g)
        if key in seen_rays:
            continue
        seen_rays.append(key)
        sub = support_subsystem(frame.datum, frame.theta, g)
        good, label = rank1_admissible(sub, frame.theta)
        certs.append(RayCertificate(g, label, good, sub.base))
        if not good and ok:
            ok = False
            witness = g
    return AdmissibilityReport(ok, witness, tuple(certs))


# ---------------------------------------------------------------------------
# Satake diagrams as ASCII
# ---------------------------------------------------------------------------


def satake_string(datum: BasedRootDatum, delta0: Sequence[Vec], theta_star: Mat) -> str:
    """Render (Delta, Delta_0, theta*) as e.g. "A3:ooo|arcs=1<->3"; white
    node arcs use global 1-based positions after canonical component sort.
    A torus factor of rank r appends "+Tr"."""
    ct = datum.cartan_type()
    d0 = {tuple(a) for a in delta0}
    comps = []
    for fam, rank, perm in ct.components:
        colors = "".join("*" if datum.base[perm[k]] in d0 else "o" for k in range(rank))
        comps.append((fam, rank, colors, perm))
    comps.sort(key=lambda c: (c[0], c[1], c[2]))
    order = [perm[k] for _f, r, _c, perm in comps for k in range(r)]
    pos_of = {base_idx: t for t, base_idx in enumerate(order)}
    arcs = []
    for t, base_idx in enumerate(order):
        img = mat_vec(theta_star, datum.base[base_idx])
        if img not in datum.base:
            raise InvolutionError("theta* does not permute the base")
        u = pos_of[datum.base.index(img)]
        if t < u and datum.base[base_idx] not in d0:
            arcs.append((t + 1, u + 1))
    out = " x ".join(f"{f}{r}:{c}" for f, r, c, _p in comps)
    if arcs:
        out += "|arcs=" + ";".join(f"{a}<->{b}" for a, b in sorted(arcs))
    torus = datum.dim - len(datum.base)
    if torus or not comps:
        out = (out + f"+T{torus}") if out else f"T{torus}"
    return out


def parse_satake(s: str):
    """Inverse of satake_string: (components, arcs, torus_rank) with
    components = tuple of (family, rank, colors string)."""
    torus = 0
    if s.startswith("T") and ":" not in s:
        return (), (), int(s[1:])
    if "+T" in s:
        s, t = s.rsplit("+T", 1)
        torus = int(t)
    arcs = ()
    if "|arcs=" in s:
        s, a = s.split("|arcs=", 1)
        arcs = tuple(
            tuple(int(x) for x in part.split("<->")) for part in a.split(";")
        )
    comps = []
    for part in s.split(" x "):
        head, colors = part.split(":")
        fam = "BC" if head.startswith("BC") else head[0]
        rank = int(head[len(fam):])
        if len(colors) != rank or any(ch not in "o*" for ch in colors):
            raise ValueError(f"bad node string {colors!r}")
        comps.append((fam, rank, colors))
    return tuple(comps), arcs, torus
