"""Spherical data of a symmetric variety.

From a Galois-involution frame and a choice of weight lattice this module
derives the combinatorial spherical datum: restricted weight lattices,
minimal/normalized spherical roots with their type and distinguished
classification, colors with their coroot and moving-simple data, the
doubling-automorphism group, the outer-automorphism group of the dual
datum, and the restricted Weyl group.

Conventions.  The ambient character lattice is X = Z^dim with the dot
pairing against Y = Z^dim; matrices act on column vectors.  All derived
objects are realized inside X: restricted roots as honest integer
vectors, restricted coroots as rational covectors on X.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .involution import GammaThetaFrame
from .lattice import (
    FinAbGroup,
    IntLattice,
    dot,
    intersect,
    lattice_sum,
    mat_transpose,
    mat_vec,
    quotient,
    saturate,
    smith_normal_form,
    sublattice_with_integrality,
    vec_add,
    vec_neg,
    vec_scale,
    vec_sub,
)
from .rootdata import (
    BasedRootDatum,
    RootDataError,
    recognize_type,
    strongly_orthogonal,
)

Vec = tuple[int, ...]
Mat = tuple[Vec, ...]
QVec = tuple[Fraction, ...]


class ModelError(RootDataError):
    """The frame or weight lattice violates a model axiom."""


class ClassificationError(ModelError):
    """A derived root or factor matches no recognized pattern."""


class CocycleError(ModelError):
    """Outer character data is inconsistent with the Galois action."""


# ---------------------------------------------------------------------------
# small vector helpers
# ---------------------------------------------------------------------------


def _primitive(v) -> Vec:
    g = 0
    for x in v:
        g = math.gcd(g, int(x))
    if g == 0:
        raise ModelError("zero vector has no primitive direction")
    return tuple(int(x) // g for x in v)


def _same_ray(v, w) -> bool:
    """True iff w is a positive rational multiple of v."""
    n = len(v)
    for i in range(n):
        for j in range(i + 1, n):
            if v[i] * w[j] != v[j] * w[i]:
                return False
    return dot(v, w) > 0


def _contains(L: IntLattice, v) -> bool:
    return L.coords(v) is not None


def _lattice_leq(sub: IntLattice, sup: IntLattice) -> bool:
    return all(_contains(sup, r) for r in sub.rows)


def _line_generator(direction: Vec, L: IntLattice) -> Vec:
    """Positive primitive generator of (Q . direction) intersected with L."""
    n = len(direction)
    line = saturate(IntLattice.from_rows(n, [direction]), IntLattice.standard(n))
    T = intersect(line, L)
    if T.rank != 1:
        raise ModelError(f"lattice meets the ray through {direction} in rank {T.rank}")
    g = T.rows[0]
    return g if dot(g, direction) > 0 else vec_neg(g)


def _rational_coords(rows, v) -> QVec | None:
    """Coordinates of v in the Q-span of rows, or None if outside."""
    if not rows:
        return None
    n = len(rows[0])
    aug = [[Fraction(rows[i][j]) for i in range(len(rows))] + [Fraction(v[j])] for j in range(n)]
    m, k = n, len(rows)
    piv = []
    r = 0
    for c in range(k):
        p = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if p is None:
            continue
        aug[r], aug[p] = aug[p], aug[r]
        aug[r] = [x / aug[r][c] for x in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                aug[i] = [a - aug[i][c] * b for a, b in zip(aug[i], aug[r])]
        piv.append(c)
        r += 1
    if any(all(aug[i][c] == 0 for c in range(k)) and aug[i][k] != 0 for i in range(m)):
        return None
    out = [Fraction(0)] * k
    for i, c in enumerate(piv):
        out[c] = aug[i][k]
    return tuple(out)


def _finab_direct_sum(parts) -> FinAbGroup:
    """Invariant-factor form of a direct sum of cyclic groups."""
    ds = [d for p in parts for d in p if d > 1]
    if not ds:
        return FinAbGroup(())
    diag = [tuple(d if i == j else 0 for j in range(len(ds))) for i, d in enumerate(ds)]
    D, _u, _v = smith_normal_form(diag)
    inv = [D[i][i] for i in range(len(ds)) if D[i][i] > 1]
    return FinAbGroup(tuple(inv))


# ---------------------------------------------------------------------------
# weight lattices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightLattices:
    """The lattice frame for weight-lattice choices.

    image           (1 - theta) X, the character lattice of the maximal
                    split torus realized inside X.
    connected       the largest admissible weight lattice: saturation of
                    the image made integral against every restricted
                    coroot.  Every model lattice sits between
                    root_lattice and connected.
    restricted_base the nonzero differences delta - theta(delta) over the
                    base, deduplicated in base order.
    root_lattice    the Z-span of restricted_base.
    """

    image: IntLattice
    connected: IntLattice
    restricted_base: tuple[Vec, ...]
    root_lattice: IntLattice


@dataclass(frozen=True)
class _Ray:
    """Geometry of one restricted-root ray, independent of the lattice choice."""

    index: int
    direction: Vec
    base_members: tuple[Vec, ...]
    coroot: QVec
    gamma_n: Vec
    root_on_ray: Vec | None
    gamma_sv: Vec
    gamma_conn: Vec
    nonreduced: bool
    conn_type: str
    conn_distinguished: str | None
    component: int
    factor: int


@dataclass(frozen=True)
class _Geometry:
    frame: GammaThetaFrame
    lattices: WeightLattices
    rays: tuple[_Ray, ...]
    components: tuple[tuple[int, ...], ...]
    factors: tuple[tuple[int, ...], ...]
    swap_factor: tuple[bool, ...]
    ray_perms: Mapping[str, tuple[int, ...]]
    orbit_of_ray: tuple[int, ...]
    orbits: tuple[tuple[int, ...], ...]


def weight_lattices(frame: GammaThetaFrame) -> WeightLattices:
    """Image, connected-model, restricted-base and root lattices of a frame."""
    return _geometry(frame).lattices


def _base_index_perm(datum: BasedRootDatum, m: Mat) -> tuple[int, ...]:
    out = []
    for b in datum.base:
        img = mat_vec(m, b)
        if img not in datum.base:
            raise ModelError("automorphism does not permute the base")
        out.append(datum.base.index(img))
    return tuple(out)


def _geometry(frame: GammaThetaFrame) -> _Geometry:
    datum, theta = frame.datum, frame.theta
    dim = datum.dim
    theta_t = mat_transpose(theta)
    ident = tuple(tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim))

    # maximal-split adaptation: every fixed root lies over the fixed simples
    span0 = IntLattice.from_rows(dim, frame.delta0_theta)
    for a in frame.phi0_theta:
        if not _contains(span0, a):
            raise ModelError(
                f"fixed root {a} escapes the fixed simple roots; "
                "the torus is not maximally split"
            )

    image = IntLattice.from_rows(dim, [vec_sub(e, mat_vec(theta, e)) for e in ident])
    rbase: list[Vec] = []
    for b in datum.base:
        r = vec_sub(b, mat_vec(theta, b))
        if any(r) and r not in rbase:
            rbase.append(r)
    if not rbase:
        raise ModelError("involution is trivial on the base: restricted rank 0")
    root_lattice = IntLattice.from_rows(dim, rbase)

    # rays and per-simple-root restricted coroot functionals
    directions: list[Vec] = []
    members: dict[Vec, list[Vec]] = {}
    for b in datum.base:
        r = vec_sub(b, mat_vec(theta, b))
        if not any(r):
            continue
        d = _primitive(r)
        if d not in members:
            directions.append(d)
            members[d] = []
        members[d].append(b)

    functional: dict[Vec, QVec] = {}
    for b in datum.base:
        r = vec_sub(b, mat_vec(theta, b))
        if not any(r):
            continue
        cv = datum.coroot_of(b)
        c = dot(mat_vec(theta, b), cv)
        if c not in (-2, -1, 0, 1):
            raise ModelError(f"pairing <theta(a), coroot(a)> = {c} is outside [-2, 1]")
        tcv = mat_vec(theta_t, cv)
        functional[b] = tuple(Fraction(cv[i] - tcv[i], 2 - c) for i in range(dim))

    coroots: list[QVec] = []
    gammas_n: list[Vec] = []
    for d in directions:
        pairs = [(sum(functional[b][i] * d[i] for i in range(dim)), b) for b in members[d]]
        pmin = min(p for p, _b in pairs)
        if pmin <= 0:
            raise ModelError("restricted coroot pairs nonpositively with its own ray")
        chosen = {functional[b] for p, b in pairs if p == pmin}
        if len(chosen) != 1:
            raise ModelError("ambiguous restricted coroot on a ray")
        n_min = chosen.pop()
        gn = tuple(Fraction(2 * x, 1) / pmin for x in d)
        if any(f.denominator != 1 for f in gn):
            raise ModelError(f"normalized root on ray {d} is not integral")
        gamma_n = tuple(int(f) for f in gn)
        if not _contains(image, gamma_n):
            raise ModelError(f"normalized root {gamma_n} is outside the image lattice")
        coroots.append(n_min)
        gammas_n.append(gamma_n)

    connected = sublattice_with_integrality(saturate(image, IntLattice.standard(dim)), coroots)
    if not _lattice_leq(root_lattice, connected):
        raise ModelError("restricted root lattice escapes the connected-model lattice")
    lat = WeightLattices(image, connected, tuple(rbase), root_lattice)

    # base components and k-simple factors under <theta*, sigma*>
    C = datum.cartan_of_base()
    k = len(datum.base)
    comp_of = list(range(k))

    def find(i):
        while comp_of[i] != i:
            comp_of[i] = comp_of[comp_of[i]]
            i = comp_of[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            comp_of[max(ri, rj)] = min(ri, rj)

    for i in range(k):
        for j in range(i + 1, k):
            if C[i][j] != 0:
                union(i, j)
    comp_ids = sorted({find(i) for i in range(k)})
    components = tuple(tuple(i for i in range(k) if find(i) == c) for c in comp_ids)
    comp_index = {i: ci for ci, comp in enumerate(components) for i in comp}

    theta_perm = _base_index_perm(datum, frame.theta_star)
    star_perms = {
        lab: _base_index_perm(datum, m)
        for lab, m in frame.star.matrices.items()
        if lab != "e"
    }
    fac_of = list(range(len(components)))

    def ffind(i):
        while fac_of[i] != i:
            fac_of[i] = fac_of[fac_of[i]]
            i = fac_of[i]
        return i

    def funion(i, j):
        ri, rj = ffind(i), ffind(j)
        if ri != rj:
            fac_of[max(ri, rj)] = min(ri, rj)

    for perm in [theta_perm, *star_perms.values()]:
        for i in range(k):
            funion(comp_index[i], comp_index[perm[i]])
    fac_ids = sorted({ffind(c) for c in range(len(components))})
    factors = tuple(
        tuple(c for c in range(len(components)) if ffind(c) == f) for f in fac_ids
    )
    fac_index = {c: fi for fi, fac in enumerate(factors) for c in fac}
    swap_factor = tuple(
        any(comp_index[theta_perm[i]] != comp_index[i] for c in fac for i in components[c])
        for fac in factors
    )

    zphi = IntLattice.from_rows(dim, datum.base)
    rsys = frame.restricted()
    positive = datum.positive_roots
    delta_p = frame.delta0_theta

    rays = []
    for idx, d in enumerate(directions):
        on_ray = [b for b in positive if _same_ray(d, b)]
        if len(on_ray) > 1:
            raise ModelError(f"ambient system is non-reduced along {d}")
        root = on_ray[0] if on_ray else None
        if root is not None and mat_vec(theta, root) != vec_neg(root):
            raise ModelError(f"root {root} on a restricted ray is not anti-fixed")
        gamma_sv = _line_generator(d, zphi)
        gamma_conn = _line_generator(d, connected)
        pos_restricted = [r for r in rsys.restricted if _same_ray(d, r)]
        nonreduced = len(pos_restricted) == 2
        if root is None:
            conn_type = "G"
        elif _contains(connected, root):
            conn_type = "T"
        else:
            conn_type = "N"
        conn_dist = None
        if gammas_n[idx] == vec_scale(2, gamma_conn):
            conn_dist = _classify_distinguished(
                datum, theta, delta_p, zphi, gamma_conn, symmetric=False
            )
        fac = {fac_index[comp_index[datum.base.index(b)]] for b in members[d]}
        if len(fac) != 1:
            raise ModelError(f"ray {d} mixes distinct k-simple factors")
        rays.append(
            _Ray(
                index=idx,
                direction=d,
                base_members=tuple(members[d]),
                coroot=coroots[idx],
                gamma_n=gammas_n[idx],
                root_on_ray=root,
                gamma_sv=gamma_sv,
                gamma_conn=gamma_conn,
                nonreduced=nonreduced,
                conn_type=conn_type,
                conn_distinguished=conn_dist,
                component=comp_index[datum.base.index(members[d][0])],
                factor=fac.pop(),
            )
        )

    # the *-action permutes rays; orbits give the Galois grouping
    ray_of_dir = {r.direction: r.index for r in rays}
    ray_perms = {}
    for lab, m in frame.star.matrices.items():
        perm = []
        for r in rays:
            img = _primitive(mat_vec(m, r.direction))
            if img not in ray_of_dir:
                raise ModelError("*-action does not permute the restricted rays")
            perm.append(ray_of_dir[img])
        ray_perms[lab] = tuple(perm)
    orbit_of = [-1] * len(rays)
    orbits = []
    for r in rays:
        if orbit_of[r.index] >= 0:
            continue
        orb = {r.index}
        frontier = [r.index]
        while frontier:
            nxt = []
            for i in frontier:
                for perm in ray_perms.values():
                    if perm[i] not in orb:
                        orb.add(perm[i])
                        nxt.append(perm[i])
            frontier = nxt
        for i in orb:
            orbit_of[i] = len(orbits)
        orbits.append(tuple(sorted(orb)))

    return _Geometry(
        frame=frame,
        lattices=lat,
        rays=tuple(rays),
        components=components,
        factors=factors,
        swap_factor=swap_factor,
        ray_perms=ray_perms,
        orbit_of_ray=tuple(orbit_of),
        orbits=tuple(orbits),
    )


# ---------------------------------------------------------------------------
# distinguished-root patterns
# ---------------------------------------------------------------------------


def _chain_members(datum: BasedRootDatum, delta_p, gamma) -> tuple[Vec, ...] | None:
    """Order gamma = a_1 + ... + a_k over a type-B chain with a_2..a_k fixed.

    Returns the members from the long end, or None when gamma is not such
    a sum.  The chain must carry exactly one double bond, at the short
    end, and every member except the long-end head must be theta-fixed.
    """
    coords = _rational_coords(datum.base, gamma)
    if coords is None or any(c not in (0, 1) for c in coords):
        return None
    idxs = [i for i, c in enumerate(coords) if c == 1]
    if len(idxs) < 2:
        return None
    C = datum.cartan_of_base()
    adj = {i: [j for j in idxs if j != i and C[i][j] != 0] for i in idxs}
    if any(len(v) > 2 for v in adj.values()):
        return None
    ends = [i for i in idxs if len(adj[i]) == 1]
    if len(ends) != 2 or any(len(adj[i]) == 0 for i in idxs):
        return None
    bonds = []
    for i in idxs:
        for j in adj[i]:
            if i < j:
                bonds.append((C[i][j] * C[j][i], i, j))
    if sorted(b[0] for b in bonds) != [1] * (len(bonds) - 1) + [2]:
        return None
    mult, i, j = next(b for b in bonds if b[0] == 2)
    short = i if C[i][j] == -2 else j
    if short not in ends:
        return None
    head = next(e for e in ends if e != short)
    order = [head]
    while len(order) < len(idxs):
        nxt = [j for j in adj[order[-1]] if j not in order]
        if not nxt:
            return None
        order.append(nxt[0])
    membs = tuple(datum.base[i] for i in order)
    if any(m not in delta_p for m in membs[1:]):
        return None
    return membs


def _g2_pattern(datum: BasedRootDatum, gamma) -> bool:
    """gamma = 2 a_1 + a_2 over a rank-2 triple-bond pair with a_1 short."""
    coords = _rational_coords(datum.base, gamma)
    if coords is None or sorted(c for c in coords if c) != [1, 2]:
        return False
    i2 = coords.index(2)
    i1 = coords.index(1)
    C = datum.cartan_of_base()
    return C[i1][i2] * C[i2][i1] == 3 and C[i2][i1] == -3


def _classify_distinguished(datum, theta, delta_p, zphi, gamma, symmetric=True) -> str:
    """Subtype of a distinguished minimal root: central (d), simple (a),
    type-B chain sum (b), or the rank-2 triple-bond pattern (c)."""
    if not _contains(zphi, gamma):
        return "d"
    if gamma in datum.base:
        if mat_vec(theta, gamma) != vec_neg(gamma):
            raise ClassificationError(f"distinguished simple root {gamma} is not anti-fixed")
        return "a"
    if _chain_members(datum, delta_p, gamma) is not None:
        return "b"
    if _g2_pattern(datum, gamma):
        if symmetric:
            raise ClassificationError(
                "triple-bond distinguished pattern cannot arise from an involution"
            )
        return "c"
    raise ClassificationError(f"distinguished root {gamma} matches no recognized pattern")


# ---------------------------------------------------------------------------
# the model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SymmetricVarietyModel:
    """A frame together with an admissible weight-lattice choice.

    weight_lattice is the character group of the model torus A_X realized
    inside X; it must contain the restricted root lattice and embed in
    the connected-model lattice.  cocycle_data optionally attaches outer
    characters to distinguished rays (see outer_data_of).
    """

    frame: GammaThetaFrame
    weight_lattice: IntLattice
    lattices: WeightLattices
    cocycle_data: Mapping | None = None

    @property
    def datum(self) -> BasedRootDatum:
        return self.frame.datum

    @property
    def rank(self) -> int:
        return self.weight_lattice.rank


def build_model(
    frame: GammaThetaFrame,
    weight_lattice: IntLattice | None = None,
    cocycle_data: Mapping | None = None,
) -> SymmetricVarietyModel:
    """Validate a weight-lattice choice against a frame.

    Defaults to the connected-model lattice.  Raises ModelError unless
    root_lattice <= weight_lattice <= connected holds inside X.
    """
    geo = _geometry(frame)
    lat = geo.lattices
    wl = lat.connected if weight_lattice is None else weight_lattice
    if wl.ambient_dim != frame.datum.dim:
        raise ModelError("weight lattice lives in the wrong ambient space")
    if not _lattice_leq(lat.root_lattice, wl):
        raise ModelError("weight lattice does not contain the restricted root lattice")
    if not _lattice_leq(wl, lat.connected):
        raise ModelError("weight lattice is not integral against the restricted coroots")
    if cocycle_data is None:
        cocycle_data = frame.cocycle
    return SymmetricVarietyModel(frame, wl, lat, cocycle_data)


def pi0_data(model: SymmetricVarietyModel) -> FinAbGroup:
    """Component group of the generic stabilizer: saturation over the
    weight lattice inside the connected-model lattice."""
    sat = saturate(model.weight_lattice, model.lattices.connected)
    q = quotient(sat, model.weight_lattice)
    return q.torsion


# ---------------------------------------------------------------------------
# spherical roots
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SphericalRoot:
    """One restricted ray of the model.

    gamma_min    primitive point of the weight lattice on the ray
    gamma_sv     primitive point of the ambient root lattice on the ray
    gamma_n      normalized root: pairs to 2 against the ray's coroot
    coroot       restricted coroot as a rational covector on X
    root_type    "T" | "N(aN)" | "N(bN)" | "G"
    so_pair      for type G, a strongly orthogonal positive pair summing
                 to gamma_sv
    distinguished  subtype "a" | "b" | "c" | "d" when gamma_n equals
                 2*gamma_min, else None
    galois_orbit index of the ray's orbit under the *-action
    """

    ray: int
    direction: Vec
    gamma_min: Vec
    gamma_sv: Vec
    gamma_n: Vec
    coroot: QVec
    root_type: str
    so_pair: tuple[Vec, Vec] | None
    distinguished: str | None
    galois_orbit: int


def spherical_roots(
    model: SymmetricVarietyModel, symmetric: bool = True
) -> tuple[SphericalRoot, ...]:
    """Classify every restricted ray against the model weight lattice."""
    geo = _geometry(model.frame)
    datum, theta = model.datum, model.frame.theta
    wl = model.weight_lattice
    zphi = IntLattice.from_rows(datum.dim, datum.base)
    delta_p = model.frame.delta0_theta
    out = []
    for r in geo.rays:
        gamma_min = _line_generator(r.direction, wl)
        root = r.root_on_ray
        so_pair = None
        if root is None:
            root_type = "G"
            so_pair = _so_pair(datum, theta, r.gamma_sv)
        elif _contains(wl, root):
            root_type = "T"
        else:
            if gamma_min != vec_scale(2, root):
                raise ModelError(
                    f"type-N ray at {r.direction}: minimal root is not twice the root"
                )
            if root in datum.base:
                root_type = "N(aN)"
            else:
                if _chain_members(datum, delta_p, root) is None:
                    raise ClassificationError(
                        f"type-N root {root} is neither simple nor a fixed-tail chain sum"
                    )
                root_type = "N(bN)"
        dist = None
        if r.gamma_n == vec_scale(2, gamma_min):
            dist = _classify_distinguished(
                datum, theta, delta_p, zphi, gamma_min, symmetric=symmetric
            )
        out.append(
            SphericalRoot(
                ray=r.index,
                direction=r.direction,
                gamma_min=gamma_min,
                gamma_sv=r.gamma_sv,
                gamma_n=r.gamma_n,
                coroot=r.coroot,
                root_type=root_type,
                so_pair=so_pair,
                distinguished=dist,
                galois_orbit=geo.orbit_of_ray[r.index],
            )
        )
    return tuple(out)


def _so_pair(datum: BasedRootDatum, theta: Mat, gamma_sv: Vec) -> tuple[Vec, Vec]:
    """Strongly orthogonal positive roots (b, -theta b) summing to gamma_sv."""
    found = []
    for b in datum.positive_roots:
        c = vec_neg(mat_vec(theta, b))
        if c == b or not datum.is_positive(c):
            continue
        if vec_add(b, c) != gamma_sv:
            continue
        if not strongly_orthogonal(b, c, datum.roots):
            continue
        found.append(tuple(sorted((b, c))))
    if not found:
        raise ClassificationError(
            f"no strongly orthogonal decomposition of {gamma_sv} on a rootless "
            "ray; the frame is not adapted to a maximally split torus "
            "(check_admissible rejects it)"
        )
    return min(found)


def sv_lattice(model: SymmetricVarietyModel) -> IntLattice:
    """Weight lattice enlarged by the root-lattice primitives of every ray."""
    roots = spherical_roots(model)
    ext = IntLattice.from_rows(model.datum.dim, [r.gamma_sv for r in roots])
    return lattice_sum(model.weight_lattice, ext)


def is_spherically_closed(model: SymmetricVarietyModel) -> bool:
    """Whether the weight lattice lies in the span halving only subtype-a
    normalized roots."""
    roots = spherical_roots(model)
    rows = [r.gamma_min if r.distinguished == "a" else r.gamma_n for r in roots]
    sharp = IntLattice.from_rows(model.datum.dim, rows)
    return _lattice_leq(model.weight_lattice, sharp)


# ---------------------------------------------------------------------------
# colors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Color:
    """A color of the model: its ray, coroot image rho, the simple roots
    moving it (varsigma), and the fiber size of (rho, varsigma) over it."""

    label: str
    ray: int
    rho: QVec
    varsigma: tuple[Vec, ...]
    fiber_size: int
    galois_orbit: int


@dataclass(frozen=True)
class ColorData:
    colors: tuple[Color, ...]
    omega1: tuple[QVec, ...]
    omega2: tuple[tuple[Vec, ...], ...]


def colors(model: SymmetricVarietyModel) -> ColorData:
    """Colors of the model with their Galois orbits.

    Each ray contributes colors by one of three patterns: a non-reduced
    ray splits by the moving simple root and its theta*-image; a ray
    whose primitive root is a doubled anti-fixed simple contributes an
    undetermined pair, merged into one color exactly when the relevant
    k-simple factor has disconnected generic stabilizer; every other ray
    contributes a single color moved by all its base members.
    """
    geo = _geometry(model.frame)
    datum = model.datum
    theta_star = model.frame.theta_star
    recs: list[dict] = []
    for r in geo.rays:
        rho = r.coroot
        if r.nonreduced:
            lam = r.base_members[0]
            lam2 = mat_vec(theta_star, lam)
            moved = [lam] if lam2 == lam else [lam, lam2]
            for s in moved:
                recs.append(
                    dict(ray=r.index, rho=rho, varsigma=(s,), fiber=1, sign="")
                )
        elif (
            r.root_on_ray is not None
            and r.root_on_ray in datum.base
            and r.gamma_n == vec_scale(2, r.gamma_sv)
            and r.root_on_ray == r.gamma_sv
        ):
            if _factor_merges(model, geo, r.factor):
                recs.append(
                    dict(ray=r.index, rho=rho, varsigma=(r.root_on_ray,), fiber=1, sign="")
                )
            else:
                for sign in ("+", "-"):
                    recs.append(
                        dict(
                            ray=r.index,
                            rho=rho,
                            varsigma=(r.root_on_ray,),
                            fiber=2,
                            sign=sign,
                        )
                    )
        else:
            recs.append(
                dict(ray=r.index, rho=rho, varsigma=r.base_members, fiber=1, sign="")
            )
    for rec in recs:
        rec["label"] = f"D{rec['ray']}{rec['sign']}" + (
            f":{datum.base.index(rec['varsigma'][0])}"
            if geo.rays[rec["ray"]].nonreduced
            else ""
        )

    orbit_tags = _color_orbits(model, geo, recs)
    cols = tuple(
        Color(
            label=rec["label"],
            ray=rec["ray"],
            rho=rec["rho"],
            varsigma=tuple(rec["varsigma"]),
            fiber_size=rec["fiber"],
            galois_orbit=tag,
        )
        for rec, tag in zip(recs, orbit_tags)
    )
    omega1 = tuple(sorted({c.rho for c in cols}))
    omega2 = tuple(sorted({c.varsigma for c in cols}))
    return ColorData(cols, omega1, omega2)


def _factor_merges(model: SymmetricVarietyModel, geo: _Geometry, factor: int) -> bool:
    """Disconnectedness of the generic stabilizer seen by one k-simple
    factor: the weight lattice restricted to the factor's span admits a
    proper superlattice integral against all simple coroots and all
    restricted coroots."""
    datum = model.datum
    dim = datum.dim
    fac_rays = [r for r in geo.rays if r.factor == factor]
    span = saturate(
        IntLattice.from_rows(dim, [r.direction for r in fac_rays]),
        IntLattice.standard(dim),
    )
    basis = span.rows
    k = len(basis)
    functionals: list[QVec] = [
        tuple(Fraction(x) for x in cv) for cv in datum.simple_coroots
    ]
    functionals += [r.coroot for r in geo.rays]
    F = [
        [sum(f[i] * b[i] for i in range(dim)) for b in basis] for f in functionals
    ]
    d = math.lcm(*(x.denominator for row in F for x in row)) if F else 1
    N = [[int(x * d) for x in row] for row in F]
    D, _u, _v = smith_normal_form(N)
    svals = [D[i][i] for i in range(min(len(N), k)) if D[i][i] != 0]
    if len(svals) != k:
        raise ModelError("restricted coroots do not span the factor's dual space")
    covol_m = math.prod(Fraction(d, s) for s in svals)
    xf = intersect(model.weight_lattice, span)
    if xf.rank != k:
        raise ModelError("weight lattice misses directions of a k-simple factor")
    cmat = [span.coords(row) for row in xf.rows]
    if any(c is None for c in cmat):
        raise ModelError("factor weight lattice escapes the factor span")
    det = _int_det([list(c) for c in cmat])
    index = Fraction(abs(det), 1) / covol_m
    if index.denominator != 1 or index < 1:
        raise ModelError("factor weight lattice is not integral against its coroots")
    return index > 1


def _int_det(rows) -> int:
    n = len(rows)
    m = [[Fraction(x) for x in row] for row in rows]
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        inv = 1 / m[c][c]
        for i in range(c + 1, n):
            f = m[i][c] * inv
            if f:
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    assert det.denominator == 1
    return int(det)


def _color_orbits(model, geo, recs) -> list[int]:
    """Galois orbit tags for color records; undetermined pairs over one
    ray are swapped by a stabilizer element exactly when the attached
    outer character takes -1 on it."""
    chars = {orb: ch for ch in outer_data_of(model) for orb in ch.orbit}
    star = model.frame.star
    key_of = {}
    for i, rec in enumerate(recs):
        key_of[(rec["ray"], tuple(rec["varsigma"]), rec["sign"])] = i

    def char_value(ray: int, lab: str) -> int:
        """Character of Stab(ray) transported from the orbit representative."""
        ch = chars.get(ray)
        if ch is None:
            return 1
        rep = min(ch.orbit)
        if ray == rep:
            return ch.value(lab)
        t = next(l for l in star.labels if geo.ray_perms[l][rep] == ray)
        tinv = next(l for l in star.labels if star.table[(t, l)] == "e")
        return ch.value(star.table[(tinv, star.table[(lab, t)])])

    def image(i: int, lab: str) -> int:
        rec = recs[i]
        m = star.matrices[lab]
        tray = geo.ray_perms[lab][rec["ray"]]
        tsig = tuple(mat_vec(m, s) for s in rec["varsigma"])
        tsig = tuple(sorted(tsig)) if len(tsig) > 1 else tsig
        sign = rec["sign"]
        if sign and tray == rec["ray"] and char_value(rec["ray"], lab) == -1:
            sign = "-" if sign == "+" else "+"
        key = (tray, tsig, sign)
        if key not in key_of:
            # match by content when varsigma ordering differs
            for (kr, ks, ksign), j in key_of.items():
                if kr == tray and ksign == sign and set(ks) == set(tsig):
                    return j
            raise ModelError("*-action does not permute the colors")
        return key_of[key]

    labs = [lab for lab in model.frame.star.labels if lab != "e"]
    tags = [-1] * len(recs)
    orbits = 0
    for i in range(len(recs)):
        if tags[i] >= 0:
            continue
        orb = {i}
        frontier = [i]
        while frontier:
            nxt = []
            for j in frontier:
                for lab in labs:
                    t = image(j, lab)
                    if t not in orb:
                        orb.add(t)
                        nxt.append(t)
            frontier = nxt
        for j in orb:
            tags[j] = orbits
        orbits += 1
    return tags


# ---------------------------------------------------------------------------
# outer characters on distinguished orbits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OuterCharacter:
    """A +-1 character of the stabilizer of one Galois orbit of
    distinguished rays, given by its values on the *-group labels."""

    orbit: tuple[int, ...]
    representative: Vec
    values: tuple[tuple[str, int], ...]

    def value(self, label: str) -> int:
        for lab, v in self.values:
            if lab == label:
                return v
        raise CocycleError(f"label {label!r} is outside the stabilizer")


def outer_data_of(model: SymmetricVarietyModel) -> tuple[OuterCharacter, ...]:
    """Validated outer characters, one per Galois orbit of distinguished
    rays; unspecified orbits carry the trivial character."""
    geo = _geometry(model.frame)
    roots = spherical_roots(model)
    dist = [r for r in roots if r.distinguished in ("a", "b", "c")]
    raw = dict(model.cocycle_data or {})
    star = model.frame.star
    seen_orbits = sorted({geo.orbit_of_ray[r.ray] for r in dist})
    by_ray = {r.ray: r for r in roots}
    out = []
    claimed = set()
    for ob in seen_orbits:
        members = geo.orbits[ob]
        rep = min(members)
        stab = [
            lab for lab in star.labels if geo.ray_perms[lab][rep] == rep
        ]
        vals = {lab: 1 for lab in stab}
        for ray in members:
            key = by_ray[ray].gamma_min
            if key in raw:
                given = raw[key]
                claimed.add(key)
                for lab, v in dict(given).items():
                    if lab not in stab:
                        raise CocycleError(
                            f"label {lab!r} does not stabilize the distinguished orbit"
                        )
                    if v not in (1, -1):
                        raise CocycleError(f"character value {v!r} is not +-1")
                    vals[lab] = int(v)
        for la in stab:
            for lb in stab:
                if vals[star.table[(la, lb)]] != vals[la] * vals[lb]:
                    raise CocycleError(
                        "character values do not define a homomorphism on the stabilizer"
                    )
        out.append(
            OuterCharacter(
                orbit=members,
                representative=by_ray[rep].gamma_min,
                values=tuple(sorted(vals.items())),
            )
        )
    unknown = set(raw) - claimed
    if unknown:
        raise CocycleError(
            f"character data attached to non-distinguished rays: {sorted(unknown)}"
        )
    return tuple(out)


# ---------------------------------------------------------------------------
# doubling automorphisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AutdData:
    """Character group of the doubling automorphisms, with the Galois
    orbits of doubled rays (computed against the connected model) and the
    generators of the halved span."""

    characters: FinAbGroup
    orbits: tuple[tuple[int, ...], ...]
    halved: tuple[Vec, ...]

    @property
    def residue_degrees(self) -> tuple[int, ...]:
        return tuple(len(o) for o in self.orbits)


def aut_d(model: SymmetricVarietyModel) -> AutdData:
    """X*(Aut_d) = (weight lattice  intersect  halved span) / root lattice.

    The halved span replaces the normalized root by its half on every
    ray distinguished for the connected model; central rays and
    non-distinguished rays keep the normalized root.
    """
    geo = _geometry(model.frame)
    rows = [
        r.gamma_conn if r.conn_distinguished in ("a", "b", "c") else r.gamma_n
        for r in geo.rays
    ]
    halved = IntLattice.from_rows(model.datum.dim, rows)
    num = intersect(model.weight_lattice, halved)
    if not _lattice_leq(model.lattices.root_lattice, num):
        raise ModelError("restricted root lattice escapes the halved span")
    q = quotient(num, model.lattices.root_lattice)
    if not q.is_finite:
        raise ModelError("doubling character group is not finite")
    dist_rays = [r.index for r in geo.rays if r.conn_distinguished in ("a", "b", "c")]
    orbits = tuple(
        orb for orb in geo.orbits if all(i in dist_rays for i in orb) and orb[0] in dist_rays
    )
    return AutdData(q.torsion, orbits, tuple(rows))


# ---------------------------------------------------------------------------
# outer automorphisms of the dual datum
# ---------------------------------------------------------------------------

_CENTER_SQUARE_TABLE = {
    "A": lambda r: (2,) if r % 2 == 1 else (),
    "B": lambda r: (2,),
    "C": lambda r: (2,),
    "D": lambda r: (2, 2) if r % 2 == 0 else (4,),
    "E": lambda r: {6: (), 7: (2,), 8: ()}[r],
    "F": lambda r: (),
    "G": lambda r: (),
}


def _center_mod_squares(fam: str, rank: int) -> tuple[int, ...]:
    # every nontrivial cyclic piece of Z(G_sc) contributes Z/2 modulo squares
    return tuple(2 for _d in _CENTER_SQUARE_TABLE[fam](rank))


_WEYL_ORDER = {
    "A": lambda r: math.factorial(r + 1),
    "B": lambda r: 2**r * math.factorial(r),
    "C": lambda r: 2**r * math.factorial(r),
    "BC": lambda r: 2**r * math.factorial(r),
    "D": lambda r: 2 ** (r - 1) * math.factorial(r),
    "E": lambda r: {6: 51840, 7: 2903040, 8: 696729600}[r],
    "F": lambda r: 1152,
    "G": lambda r: 12,
}


@dataclass(frozen=True)
class FactorOut:
    """Outer data of one k-simple factor: its rays, its kind (group /
    generic / chevalley), the table contribution of a chevalley factor,
    and whether the factor is well adapted."""

    rays: tuple[int, ...]
    kind: str
    table_part: tuple[int, ...]
    well_adapted: bool


@dataclass(frozen=True)
class OutData:
    characters: FinAbGroup
    lattice_part: FinAbGroup
    factors: tuple[FactorOut, ...]
    well_adapted: bool


def out_group(model: SymmetricVarietyModel) -> OutData:
    """Outer-automorphism character group of the dual datum.

    Group factors and generic factors contribute through the doubling
    lattice.  Chevalley factors, the k-simple factors of restricted rank
    above one with at most one Galois orbit of rays not of type N for
    the connected model, contribute instead through the ambient center:
    the full center modulo squares when the involution negates the
    factor's root span, or a single order-2 part from the eigenspace
    pattern on B/D components when it does not.
    """
    geo = _geometry(model.frame)
    datum, theta = model.datum, model.frame.theta
    dim = datum.dim
    factor_reports = []
    mix_rows: list[Vec] = []
    for fi, fac in enumerate(geo.factors):
        rays_f = [r for r in geo.rays if r.factor == fi]
        ray_ids = tuple(r.index for r in rays_f)
        if geo.swap_factor[fi]:
            factor_reports.append(FactorOut(ray_ids, "group", (), True))
            mix_rows += [_halved_row(r) for r in rays_f]
            continue
        orb_ids = sorted({geo.orbit_of_ray[i] for i in ray_ids})
        non_n = sum(1 for ob in orb_ids if geo.rays[geo.orbits[ob][0]].conn_type != "N")
        chev = len(ray_ids) > 1 and non_n <= 1
        if not chev:
            factor_reports.append(FactorOut(ray_ids, "generic", (), True))
            mix_rows += [_halved_row(r) for r in rays_f]
            continue
        mix_rows += [r.gamma_n for r in rays_f]
        table: list[int] = []
        was = []
        for ci in fac:
            comp = geo.components[ci]
            simples = [datum.base[i] for i in comp]
            if all(mat_vec(theta, s) == vec_neg(s) for s in simples):
                fam, rank = _component_family(datum, comp)
                part = _center_mod_squares(fam, rank)
                table += list(part)
                was.append(fam == "C" or not part)
            else:
                fam, rank = _component_family(datum, comp)
                if fam not in ("B", "D"):
                    raise ClassificationError(
                        f"chevalley factor of family {fam} has no eigenspace pattern"
                    )
                m = sum(1 for r in rays_f if r.component == ci)
                if _minus_eigendim(datum, theta, comp) != m:
                    raise ClassificationError(
                        "eigenspace pattern does not match the factor's restricted rank"
                    )
                inner = not (fam == "D" and m % 2 == 1)
                if inner:
                    table.append(2)
                was.append((fam == "B" and m == 2) or not inner)
        factor_reports.append(
            FactorOut(ray_ids, "chevalley", tuple(sorted(table)), all(was))
        )
    mix = IntLattice.from_rows(dim, mix_rows)
    num = intersect(model.weight_lattice, mix)
    if not _lattice_leq(model.lattices.root_lattice, num):
        raise ModelError("restricted root lattice escapes the mixed span")
    q = quotient(num, model.lattices.root_lattice)
    if not q.is_finite:
        raise ModelError("outer character group is not finite")
    lattice_part = q.torsion
    parts = [lattice_part.invariant_factors] + [f.table_part for f in factor_reports]
    return OutData(
        characters=_finab_direct_sum(parts),
        lattice_part=lattice_part,
        factors=tuple(factor_reports),
        well_adapted=all(f.well_adapted for f in factor_reports),
    )


def _halved_row(r: _Ray) -> Vec:
    return r.gamma_conn if r.conn_distinguished in ("a", "b", "c") else r.gamma_n


def _component_family(datum: BasedRootDatum, comp) -> tuple[str, int]:
    sub_base = [datum.base[i] for i in comp]
    compset = set(comp)
    sub_roots = []
    for rt in datum.roots:
        cs = datum.base_coords(rt)
        if cs is not None and all(c == 0 or i in compset for i, c in enumerate(cs)):
            sub_roots.append(rt)
    ct = recognize_type(sub_roots, sub_base)
    fams = ct.families()
    if len(fams) != 1:
        raise ClassificationError("base component is not irreducible")
    return fams[0]


def _minus_eigendim(datum: BasedRootDatum, theta: Mat, comp) -> int:
    simples = [datum.base[i] for i in comp]
    imgs = [mat_vec(theta, s) for s in simples]
    sums = [vec_add(s, i) for s, i in zip(simples, imgs)]
    plus_rank = IntLattice.from_rows(datum.dim, [s for s in sums if any(s)]).rank
    return len(comp) - plus_rank


# ---------------------------------------------------------------------------
# restricted Weyl group
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeylData:
    """Cartan matrix of the normalized restricted base, the group order,
    and the simple reflections as rational ambient matrices."""

    cartan: Mat
    order: int
    reflections: tuple[tuple[QVec, ...], ...]


def weyl_data(model: SymmetricVarietyModel) -> WeylData:
    geo = _geometry(model.frame)
    k = len(geo.rays)
    entries = []
    for i in range(k):
        row = []
        for j in range(k):
            v = sum(geo.rays[i].coroot[t] * geo.rays[j].gamma_n[t] for t in range(model.datum.dim))
            if v.denominator != 1:
                raise ModelError("restricted Cartan pairing is not integral")
            row.append(int(v))
        entries.append(tuple(row))
    cartan = tuple(entries)
    abstract = BasedRootDatum.from_base(
        k,
        [tuple(1 if i == j else 0 for j in range(k)) for i in range(k)],
        [cartan[i] for i in range(k)],
    )
    order = 1
    for fam, rank in abstract.cartan_type().families():
        order *= _WEYL_ORDER[fam](rank)
    rsys = model.frame.restricted()
    refl = tuple(rsys.reflection(r.gamma_n) for r in geo.rays)
    return WeylData(cartan, order, refl)


# ---------------------------------------------------------------------------
# the aggregate datum
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SphericalDatum:
    """Full spherical datum of a model."""

    model: SymmetricVarietyModel
    roots: tuple[SphericalRoot, ...]
    delta_p: tuple[Vec, ...]
    color_data: ColorData
    weyl: WeylData
    autd: AutdData
    out: OutData
    outer: tuple[OuterCharacter, ...]
    pi0: FinAbGroup

    @property
    def colors(self) -> tuple[Color, ...]:
        return self.color_data.colors

    @property
    def delta_min(self) -> tuple[Vec, ...]:
        return tuple(r.gamma_min for r in self.roots)

    @property
    def delta_sv(self) -> tuple[Vec, ...]:
        return tuple(r.gamma_sv for r in self.roots)

    @property
    def delta_n(self) -> tuple[Vec, ...]:
        return tuple(r.gamma_n for r in self.roots)

    @property
    def distinguished(self) -> tuple[tuple[Vec, str], ...]:
        return tuple(
            (r.gamma_min, r.distinguished) for r in self.roots if r.distinguished
        )

    @property
    def well_adapted(self) -> bool:
        return self.out.well_adapted

    def report(self) -> dict:
        """Plain serializable summary; each root and color carries both
        ambient coordinates and coordinates over the restricted base."""
        rb = self.model.lattices.restricted_base

        def restr(v) -> list[str] | None:
            cs = _rational_coords(rb, v)
            return None if cs is None else [str(c) for c in cs]

        return {
            "ambient_dim": self.model.datum.dim,
            "weight_lattice": [list(r) for r in self.model.weight_lattice.rows],
            "connected_lattice": [list(r) for r in self.model.lattices.connected.rows],
            "restricted_base": [list(r) for r in rb],
            "pi0": list(self.pi0.invariant_factors),
            "rank": self.model.weight_lattice.rank,
            "roots": [
                {
                    "ray": r.ray,
                    "type": r.root_type,
                    "distinguished": r.distinguished,
                    "galois_orbit": r.galois_orbit,
                    "min": {"ambient": list(r.gamma_min), "restricted": restr(r.gamma_min)},
                    "sv": {"ambient": list(r.gamma_sv), "restricted": restr(r.gamma_sv)},
                    "normalized": {
                        "ambient": list(r.gamma_n),
                        "restricted": restr(r.gamma_n),
                    },
                    "coroot": [str(x) for x in r.coroot],
                    "so_pair": None
                    if r.so_pair is None
                    else [list(r.so_pair[0]), list(r.so_pair[1])],
                }
                for r in self.roots
            ],
            "colors": [
                {
                    "label": c.label,
                    "ray": c.ray,
                    "rho": [str(x) for x in c.rho],
                    "varsigma": [list(s) for s in c.varsigma],
                    "fiber_size": c.fiber_size,
                    "galois_orbit": c.galois_orbit,
                }
                for c in self.colors
            ],
            "weyl": {"cartan": [list(r) for r in self.weyl.cartan], "order": self.weyl.order},
            "aut_d": {
                "invariant_factors": list(self.autd.characters.invariant_factors),
                "orbits": [list(o) for o in self.autd.orbits],
            },
            "out": {
                "invariant_factors": list(self.out.characters.invariant_factors),
                "well_adapted": self.out.well_adapted,
                "factors": [
                    {
                        "rays": list(f.rays),
                        "kind": f.kind,
                        "table_part": list(f.table_part),
                        "well_adapted": f.well_adapted,
                    }
                    for f in self.out.factors
                ],
            },
            "outer_characters": [
                {
                    "orbit": list(ch.orbit),
                    "representative": list(ch.representative),
                    "values": {lab: v for lab, v in ch.values},
                }
                for ch in self.outer
            ],
            "spherically_closed": is_spherically_closed(self.model),
        }


def spherical_datum(model: SymmetricVarietyModel, symmetric: bool = True) -> SphericalDatum:
    """Assemble the complete spherical datum of a model."""
    return SphericalDatum(
        model=model,
        roots=spherical_roots(model, symmetric=symmetric),
        delta_p=model.frame.delta0_theta,
        color_data=colors(model),
        weyl=weyl_data(model),
        autd=aut_d(model),
        out=out_group(model),
        outer=outer_data_of(model),
        pi0=pi0_data(model),
    )
