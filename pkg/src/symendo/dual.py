"""Dual-side constructions derived from a spherical datum.

Bottom up: the dual root datum living on the normalized weight lattice,
the associated coroots in the ambient cocharacter lattice with their
singleton/pair partition, the associated subdatum with its dual
involution and the index of the dual symmetric variety, the torsion
heart conditions where descent is permitted, the symplectic
representation data carried by distinguished roots, and a functoriality
check against the derived-subgroup model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .lattice import (
    FiniteActionModule,
    IntLattice,
    LatticeError,
    Mat,
    TorusTorsionPoint,
    Vec,
    integral_kernel,
    intersect,
    lattice_sum,
    mat_inverse_int,
    mat_transpose,
    mat_vec,
    quotient,
    saturate,
    vec_add,
    vec_mat,
    vec_neg,
    vec_sub,
)
from .rootdata import (
    BasedRootDatum,
    RootDataError,
    strongly_orthogonal,
    weyl_orbit,
)
from .involution import GammaThetaFrame, GammaThetaIndex, frame_from_raw, satake_string
from .spherical import (
    ModelError,
    SphericalDatum,
    SphericalRoot,
    SymmetricVarietyModel,
    build_model,
    spherical_roots,
)


class DualityError(RootDataError):
    """A dual-side construction failed."""


class AssociatedRootsError(DualityError):
    """The strongly orthogonal coroot pair of a type-G root is not pinned
    down by the simple-coroot-difference condition."""


class FoldingError(DualityError):
    """The dual involution or the restriction map is inconsistent with
    the associated coroots."""


class FunctorialityError(DualityError):
    """The derived-subgroup comparison cannot be set up."""


def _dot(u, v) -> Fraction:
    return sum((Fraction(a) * Fraction(b) for a, b in zip(u, v, strict=True)), Fraction(0))


def _neg_mat(m: Mat) -> Mat:
    return tuple(tuple(-x for x in row) for row in m)


def _int(x: Fraction) -> int:
    if x.denominator != 1:
        raise FunctorialityError("non-integral pairing in the derived projection")
    return int(x)


# ---------------------------------------------------------------------------
# associated coroots
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AssociatedCoroots:
    """Associated coroots grouped per restricted ray.

    members[i] is a singleton (coroot of the sv-root) on a ray whose
    sv-root is a root, and the pinned strongly orthogonal pair of
    coroots on a type-G ray.  roots_of[i] holds the roots the members
    are coroots of, in the same order.
    """

    members: tuple[tuple[Vec, ...], ...]
    roots_of: tuple[tuple[Vec, ...], ...]

    @property
    def flat(self) -> tuple[Vec, ...]:
        return tuple(m for grp in self.members for m in grp)

    @property
    def flat_roots(self) -> tuple[Vec, ...]:
        return tuple(r for grp in self.roots_of for r in grp)


def pinned_pair(datum: BasedRootDatum, gamma_sv: Vec) -> tuple[Vec, Vec]:
    """The unique strongly orthogonal pair of positive roots summing to
    gamma_sv whose coroot difference is a difference of two simple
    coroots."""
    simple_cs = datum.simple_coroots
    diffs = set()
    for i in range(len(simple_cs)):
        for j in range(i + 1, len(simple_cs)):
            d = vec_sub(simple_cs[i], simple_cs[j])
            diffs.add(d)
            diffs.add(vec_neg(d))
    pos = datum.positive_roots
    matches = []
    for i, b1 in enumerate(pos):
        for b2 in pos[i + 1 :]:
            if vec_add(b1, b2) != tuple(gamma_sv):
                continue
            if not strongly_orthogonal(b1, b2, datum.roots):
                continue
            if vec_sub(datum.coroot_of(b1), datum.coroot_of(b2)) in diffs:
                matches.append((b1, b2))
    if len(matches) != 1:
        raise AssociatedRootsError(
            f"{len(matches)} strongly orthogonal pairs for {tuple(gamma_sv)} satisfy "
            "the simple-coroot-difference condition; expected exactly one"
        )
    return matches[0]


def associated_coroots(sd: SphericalDatum) -> AssociatedCoroots:
    """T/N rays contribute the coroot of their sv-root; a type-G ray
    contributes the pinned pair.  Pair members must restrict to the same
    functional on the normalized weight lattice."""
    return _dual_from(sd.model, sd.roots)[2]


# ---------------------------------------------------------------------------
# the dual group
# ---------------------------------------------------------------------------


def _dual_from(
    model: SymmetricVarietyModel, roots: Sequence[SphericalRoot]
) -> tuple[BasedRootDatum, IntLattice, AssociatedCoroots]:
    ext = IntLattice.from_rows(model.datum.dim, [r.gamma_sv for r in roots])
    sv = lattice_sum(model.weight_lattice, ext)
    basis = sv.rows
    datum = model.datum
    members: list[tuple[Vec, ...]] = []
    droots: list[Vec] = []
    dcoroots: list[Vec] = []
    roots_of: list[tuple[Vec, ...]] = []
    for r in roots:
        if r.root_type == "G":
            g1, g2 = pinned_pair(datum, r.gamma_sv)
            c1, c2 = datum.coroot_of(g1), datum.coroot_of(g2)
            f1 = tuple(_dot(c1, b) for b in basis)
            f2 = tuple(_dot(c2, b) for b in basis)
            if f1 != f2:
                raise FoldingError(
                    f"pair coroots at ray {r.ray} restrict differently on the "
                    "normalized weight lattice"
                )
            members.append((c1, c2))
            roots_of.append((g1, g2))
            f = f1
        else:
            cv = datum.coroot_of(r.gamma_sv)
            members.append((cv,))
            roots_of.append((r.gamma_sv,))
            f = tuple(_dot(cv, b) for b in basis)
        if any(x.denominator != 1 for x in f):
            raise FoldingError(
                f"associated coroot at ray {r.ray} is not integral on the "
                "normalized weight lattice"
            )
        droots.append(tuple(int(x) for x in f))
        cs = sv.coords(r.gamma_sv)
        if cs is None:
            raise FoldingError(f"sv-root at ray {r.ray} escapes its own lattice")
        dcoroots.append(cs)
    dual = BasedRootDatum.from_base(sv.rank, droots, dcoroots)
    assoc = AssociatedCoroots(tuple(members), tuple(roots_of))
    return dual, sv, assoc


def dual_group(sd: SphericalDatum) -> BasedRootDatum:
    """Dual datum on the normalized weight lattice: simple roots are the
    restricted associated coroots, simple coroots the sv-roots in the
    basis coordinates."""
    return _dual_from(sd.model, sd.roots)[0]


# ---------------------------------------------------------------------------
# associated group and dual involution
# ---------------------------------------------------------------------------


def associated_group_and_involution(
    sd: SphericalDatum, assoc: AssociatedCoroots | None = None
) -> tuple[BasedRootDatum, Mat, GammaThetaIndex]:
    """The subdatum of the dual side generated by the associated coroots,
    the dual involution (minus theta transposed), and the index of the
    dual symmetric variety it defines.

    The involution must fix every singleton member and swap every pair;
    the index is computed after moving the associated base to a basis
    adapted to the dual involution.
    """
    model = sd.model
    if assoc is None:
        assoc = associated_coroots(sd)
    ahat = BasedRootDatum.from_base(model.datum.dim, assoc.flat, assoc.flat_roots)
    vth = _neg_mat(mat_transpose(model.frame.theta))
    for grp in assoc.members:
        if len(grp) == 1:
            if mat_vec(vth, grp[0]) != grp[0]:
                raise FoldingError(
                    f"dual involution moves the singleton associated coroot {grp[0]}"
                )
        else:
            if mat_vec(vth, grp[0]) != grp[1] or mat_vec(vth, grp[1]) != grp[0]:
                raise FoldingError(
                    f"dual involution does not swap the associated pair {grp}"
                )
    if not ahat.is_automorphism(vth):
        raise FoldingError("dual involution does not preserve the associated datum")
    index = frame_from_raw(ahat, vth).index()
    return ahat, vth, index


def levi_datum(frame: GammaThetaFrame) -> BasedRootDatum:
    """Subdatum generated by the fixed simple roots on the same lattice."""
    datum = frame.datum
    return BasedRootDatum.from_base(
        datum.dim,
        frame.delta0_theta,
        tuple(datum.coroot_of(a) for a in frame.delta0_theta),
    )


# ---------------------------------------------------------------------------
# heart conditions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HeartConditions:
    """Constraints cutting out the torsion points where descent is done:
    fixed under the dual involution, trivial on the coroots of all fixed
    roots (the center of the dual Levi), and fixed under the finite
    Galois action."""

    theta_transpose: Mat
    fixed_coroots: tuple[Vec, ...]
    star_transposes: tuple[Mat, ...]

    def holds(self, kappa: TorusTorsionPoint) -> bool:
        k = TorusTorsionPoint.from_values(kappa.values)
        if k.compose(self.theta_transpose) != k:
            return False
        if any(k.eval(cv) != 0 for cv in self.fixed_coroots):
            return False
        return all(k.compose(m) == k for m in self.star_transposes)


def heart_conditions(frame: GammaThetaFrame) -> HeartConditions:
    datum = frame.datum
    return HeartConditions(
        theta_transpose=mat_transpose(frame.theta),
        fixed_coroots=tuple(datum.coroot_of(a) for a in frame.phi0_theta),
        star_transposes=tuple(
            mat_transpose(frame.star.matrices[lab]) for lab in frame.star.labels
        ),
    )


def heart_predicate(pkg: "DualPackage", kappa: TorusTorsionPoint) -> bool:
    return pkg.heart.holds(kappa)


# ---------------------------------------------------------------------------
# the aggregate package
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DualPackage:
    """Dual datum, associated coroots and group, dual involution with the
    index of the dual symmetric variety, the Levi of the fixed simples,
    and the heart conditions."""

    spherical: SphericalDatum
    sv_lattice: IntLattice
    dual_datum: BasedRootDatum
    associated: AssociatedCoroots
    associated_datum: BasedRootDatum
    vartheta: Mat
    levi: BasedRootDatum
    dual_variety_index: GammaThetaIndex
    heart: HeartConditions

    @property
    def dual_satake(self) -> str:
        idx = self.dual_variety_index
        return satake_string(idx.datum, idx.delta0_theta, idx.theta_star)

    def report(self) -> dict:
        dual = self.dual_datum
        return {
            "ambient_dim": self.spherical.model.datum.dim,
            "sv_basis": [list(r) for r in self.sv_lattice.rows],
            "dual": {
                "cartan": [list(r) for r in dual.cartan_of_base()],
                "simple_roots": [list(r) for r in dual.base],
                "simple_coroots": [list(r) for r in dual.simple_coroots],
                "type": [[f, r] for f, r in dual.cartan_type().families()],
            },
            "associated": [[list(m) for m in grp] for grp in self.associated.members],
            "vartheta": [list(r) for r in self.vartheta],
            "levi_roots": [list(r) for r in self.levi.base],
            "dual_satake": self.dual_satake,
            "heart_fixed_coroots": [list(r) for r in self.heart.fixed_coroots],
        }


def dual_package(sd: SphericalDatum) -> DualPackage:
    """Assemble the dual side and verify the folding consistency: every
    associated member restricts to its dual simple root."""
    dual, sv, assoc = _dual_from(sd.model, sd.roots)
    ahat, vth, index = associated_group_and_involution(sd, assoc)
    for i, grp in enumerate(assoc.members):
        for m in grp:
            f = tuple(_dot(m, b) for b in sv.rows)
            if f != tuple(Fraction(x) for x in dual.base[i]):
                raise FoldingError(
                    f"member {m} of ray {i} does not fold onto the dual simple root"
                )
    return DualPackage(
        spherical=sd,
        sv_lattice=sv,
        dual_datum=dual,
        associated=assoc,
        associated_datum=ahat,
        vartheta=vth,
        levi=levi_datum(sd.model.frame),
        dual_variety_index=index,
        heart=heart_conditions(sd.model.frame),
    )


# ---------------------------------------------------------------------------
# the symplectic representation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SRepSummand:
    """One summand of the distinguished representation.

    highest_weight  dominant weight in the sv-basis coordinates
    orbit           the Galois orbit of distinguished rays it comes from
    multiplicity    number of colors whose valuation lies on the orbit's
                    Weyl-translates
    character       +-1 values of the Galois stabilizer on the summand
    minuscule       all coroot pairings of the weight lie in {-1, 0, 1}
    symplectic      the weight orbit is negation-stable of even size
    factor_type     Cartan type of the dual factor supporting the weight
    """

    highest_weight: Vec
    orbit: tuple[int, ...]
    multiplicity: int
    character: tuple[tuple[str, int], ...]
    minuscule: bool
    symplectic: bool
    factor_type: tuple[str, int]


@dataclass(frozen=True)
class SRepData:
    summands: tuple[SRepSummand, ...]
    warnings: tuple[str, ...]


def _dominant(dual: BasedRootDatum, lam: Vec) -> Vec:
    v = tuple(lam)
    cs = dual.simple_coroots
    while True:
        for i, a in enumerate(dual.base):
            p = _dot(v, cs[i])
            if p < 0:
                v = tuple(x - int(p) * y for x, y in zip(v, a))
                break
        else:
            return v


def _components_of(dual: BasedRootDatum) -> tuple[tuple[tuple[str, int], set], ...]:
    return tuple(
        ((fam, rank), set(perm)) for fam, rank, perm in dual.cartan_type().components
    )


def s_rep(sd: SphericalDatum, pkg: DualPackage, outer_data=None) -> SRepData:
    """Summands of the distinguished representation, one per Galois orbit
    of distinguished rays.

    The weight is the dominant translate of the ray coroot rescaled to
    the smallest multiple integral on the normalized weight lattice; the
    multiplicity counts colors Weyl-equivalent to the representative.
    Orbits on Chevalley-type factors are skipped with a warning; a
    summand whose supporting dual factor is not of type C is an
    invariant violation.
    """
    if outer_data is None:
        outer_data = sd.outer
    dual = pkg.dual_datum
    basis = pkg.sv_lattice.rows
    chev_rays = {
        i for f in sd.out.factors if f.kind == "chevalley" for i in f.rays
    }
    refl = [dual.reflection_x(a) for a in dual.base]
    comps = _components_of(dual)
    by_ray = {r.ray: r for r in sd.roots}

    def raw_weight(ray: int) -> tuple[Fraction, ...]:
        f = tuple(_dot(by_ray[ray].coroot, b) for b in basis)
        c = math.lcm(*(x.denominator for x in f)) if f else 1
        return tuple(Fraction(c) * x for x in f)

    warnings: list[str] = []
    summands: list[SRepSummand] = []
    for ch in outer_data:
        rep = min(ch.orbit)
        if any(r in chev_rays for r in ch.orbit):
            warnings.append(
                f"distinguished orbit at ray {rep} lies on a Chevalley-type "
                "factor; summand omitted"
            )
            continue
        w = raw_weight(rep)
        lam = _dominant(dual, tuple(int(x) for x in w))
        orbit_vecs = set(weyl_orbit(lam, refl))
        mult = 0
        for c in sd.colors:
            r = by_ray[c.ray]
            if r.distinguished not in ("a", "b", "c"):
                continue
            if raw_weight(c.ray) in orbit_vecs:
                mult += 1
        minuscule = all(abs(_dot(lam, cv)) <= 1 for cv in dual.coroots)
        symplectic = (
            any(lam)
            and len(orbit_vecs) % 2 == 0
            and {tuple(-x for x in v) for v in orbit_vecs} == orbit_vecs
        )
        support = {
            i for i in range(len(dual.base)) if _dot(lam, dual.simple_coroots[i]) != 0
        }
        homes = [ct for ct, nodes in comps if support & nodes]
        if len(homes) != 1:
            raise DualityError(
                f"weight {lam} is not supported on a single dual factor"
            )
        fam, rank = homes[0]
        c_like = fam == "C" or rank == 1 or (fam == "B" and rank == 2)
        if not c_like:
            raise DualityError(
                f"dual factor of type {fam}{rank} supporting {lam} is not of type C"
            )
        summands.append(
            SRepSummand(
                highest_weight=lam,
                orbit=ch.orbit,
                multiplicity=mult,
                character=ch.values,
                minuscule=minuscule,
                symplectic=symplectic,
                factor_type=(fam, rank),
            )
        )
    return SRepData(tuple(summands), tuple(warnings))


# ---------------------------------------------------------------------------
# functoriality against the derived subgroup
# ---------------------------------------------------------------------------


def _complete_basis(sub: IntLattice, dim: int) -> tuple[Mat, int]:
    """Rows of a unimodular matrix whose first block spans the saturated
    sublattice; returns (rows, block size)."""
    sat = saturate(sub, IntLattice.standard(dim))
    q = quotient(IntLattice.standard(dim), sat)
    rows = tuple(sat.rows) + tuple(q.free_lifts)
    if len(rows) != dim:
        raise FunctorialityError("sublattice basis does not complete")
    return rows, sat.rank


def central_lattice(datum: BasedRootDatum) -> IntLattice:
    """Characters vanishing on every coroot."""
    if not datum.coroots:
        return IntLattice.standard(datum.dim)
    return IntLattice.from_rows(datum.dim, integral_kernel(tuple(datum.coroots)))


def is_excellent(model: SymmetricVarietyModel) -> bool:
    """Whether the kernel of the Cartan quotient onto the canonical torus
    is connected: the weight lattice must be saturated in the character
    lattice."""
    dim = model.datum.dim
    return quotient(IntLattice.standard(dim), model.weight_lattice).torsion.is_trivial


def derived_restriction_check(
    model: SymmetricVarietyModel, derived_lattice: IntLattice | None = None
) -> bool:
    """Whether the dual datum built from the derived-subgroup model is
    the one obtained by quotienting out the central character lattice.

    Verifies the short exact lattice sequence realizing the derived
    weight lattice and transports the dual simple roots through the
    sv-basis change.  Passing an explicit derived lattice replaces the
    projected one; a mismatching choice yields False.
    """
    datum, theta = model.datum, model.frame.theta
    dim = datum.dim
    rows, z = _complete_basis(central_lattice(datum), dim)
    inv = mat_inverse_int(rows)
    r = dim - z

    def proj(x: Vec) -> Vec:
        c = vec_mat(x, inv)
        return tuple(c[z:])

    if r == 0:
        return derived_lattice is None
    dbase = [proj(a) for a in datum.base]
    dcor = [
        tuple(_int(_dot(rows[z + i], cv)) for i in range(r))
        for cv in datum.simple_coroots
    ]
    try:
        dd = BasedRootDatum.from_base(r, dbase, dcor)
    except (RootDataError, LatticeError):
        return False
    th = tuple(
        tuple(proj(mat_vec(theta, rows[z + j]))[i] for j in range(r)) for i in range(r)
    )
    star = model.frame.star
    star_der = FiniteActionModule(
        labels=star.labels,
        table=star.table,
        matrices={
            lab: tuple(
                tuple(proj(mat_vec(star.matrices[lab], rows[z + j]))[i] for j in range(r))
                for i in range(r)
            )
            for lab in star.labels
        },
        lattice=IntLattice.standard(r),
    )
    projected = IntLattice.from_rows(r, [proj(x) for x in model.weight_lattice.rows])
    target = projected if derived_lattice is None else derived_lattice
    try:
        frame_der = GammaThetaFrame.build(dd, th, star_der)
        model_der = build_model(frame_der, target)
        roots_der = spherical_roots(model_der)
    except (RootDataError, LatticeError, ModelError):
        return False

    # exactness: the weight lattice surjects onto the target with the
    # central part as kernel
    central_part = intersect(model.weight_lattice, IntLattice.from_rows(dim, rows[:z]))
    q = quotient(model.weight_lattice, central_part)
    if not q.torsion.is_trivial:
        return False
    image = IntLattice.from_rows(r, [proj(x) for x in q.free_lifts])
    if image.rows != target.rows:
        return False

    roots_src = spherical_roots(model)
    try:
        d1, sv1, _ = _dual_from(model, roots_src)
        d2, sv2, _ = _dual_from(model_der, roots_der)
    except DualityError:
        return False

    # match rays through the projection of their sv-roots
    der_index = {r.gamma_sv: i for i, r in enumerate(roots_der)}
    try:
        perm = [der_index[proj(r.gamma_sv)] for r in roots_src]
    except KeyError:
        return False
    if sorted(perm) != list(range(len(roots_der))):
        return False
    c1, c2 = d1.cartan_of_base(), d2.cartan_of_base()
    if any(
        c1[i][j] != c2[perm[i]][perm[j]]
        for i in range(len(perm))
        for j in range(len(perm))
    ):
        return False
    transport = []
    for b in sv1.rows:
        cs = sv2.coords(proj(b))
        if cs is None:
            return False
        transport.append(cs)
    for i in range(len(d1.base)):
        carried = tuple(
            sum(transport[j][k] * d2.base[perm[i]][k] for k in range(len(d2.base[perm[i]])))
            for j in range(len(sv1.rows))
        )
        if carried != d1.base[i]:
            return False
    return True
