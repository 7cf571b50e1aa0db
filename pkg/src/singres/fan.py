"""Unimodular simplicial fans refining the vertex cones of a Newton polyhedron.

Also builds the section complex (rays as vertices, cones as simplices), its
Euler characteristics, the conjugate adjoint vectors across interior walls,
and an exact covering certificate for adjoint sectors.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .arith import Matrix, adjugate, det, dot, exterior_product, rank, solve
from .errors import DomainError, InvariantViolation, PreconditionError
from .polyhedron import NewtonPolyhedron, vertex_generators

Vector = tuple[int, ...]


@dataclass(frozen=True)
class Cone:
    generators: tuple[Vector, ...]

    @property
    def dim(self) -> int:
        return rank(list(self.generators)) if self.generators else 0


@dataclass(frozen=True)
class RefinedVertexCone:
    vertex: Vector
    generators: tuple[Vector, ...]
    matrix: Matrix

    def to_json(self) -> dict:
        return {
            "vertex": list(self.vertex),
            "generators": [list(g) for g in self.generators],
            "matrix": self.matrix.to_json(),
        }


def oriented(gens: Iterable[Vector]) -> tuple[Vector, ...]:
    """Sort generators lexicographically, then swap the first two if det < 0."""
    g = sorted(gens)
    d = det(Matrix.from_columns(g))
    if d < 0:
        g[0], g[1] = g[1], g[0]
    return tuple(g)


def make_refined(vertex: Sequence[int], gens: Iterable[Vector]) -> RefinedVertexCone:
    g = oriented(gens)
    return RefinedVertexCone(tuple(vertex), g, Matrix.from_columns(g))


# ----------------------------------------------------------------------------
# Triangulation of non-simplicial cones.


def _span_coordinates(gens: Sequence[Vector]) -> list[tuple]:
    """Coordinates of each generator in a basis of their span."""
    basis: list[Vector] = []
    for g in sorted(gens):
        if rank(basis + [g]) > len(basis):
            basis.append(g)
    b = Matrix.from_columns(basis)
    return [solve(b, g) for g in gens]


def cone_facets(gens: Sequence[Vector]) -> list[tuple[Vector, ...]]:
    """Generator subsets spanning the facets of ``cone(gens)``."""
    gens = list(gens)
    coords = _span_coordinates(gens)
    m = len(coords[0])
    if m == 1:
        return [()]
    facets = set()
    for combo in itertools.combinations(range(len(gens)), m - 1):
        u = exterior_product([coords[i] for i in combo])
        if not any(u):
            continue
        vals = [dot(u, c) for c in coords]
        if all(v >= 0 for v in vals) or all(v <= 0 for v in vals):
            zero = tuple(gens[i] for i, v in enumerate(vals) if v == 0)
            if rank(list(zero)) == m - 1:
                facets.add(tuple(sorted(zero)))
    return sorted(facets)


def pulling_triangulation(gens: Sequence[Vector]) -> list[tuple[Vector, ...]]:
    """Simplicial subdivision by pulling the lexicographically first generator."""
    gens = sorted(set(gens))
    m = rank(gens)
    if len(gens) == m:
        return [tuple(gens)]
    apex = gens[0]
    out = []
    for facet in cone_facets(gens):
        if apex in facet:
            continue
        for simplex in pulling_triangulation(facet):
            out.append(tuple(sorted((apex,) + simplex)))
    return out


# ----------------------------------------------------------------------------
# Stellar subdivision toward unimodularity.


def parallelepiped_points(gens: Sequence[Vector]) -> list[Vector]:
    """Nonzero lattice points ``sum lambda_j v_j`` with every ``lambda_j`` in [0, 1)."""
    m = Matrix.from_columns(gens)
    d = det(m)
    if d == 0:
        raise DomainError("degenerate simplicial cone")
    size = abs(d)
    sign = 1 if d > 0 else -1
    adj = adjugate(m)
    steps = [tuple((sign * x) % size for x in adj.col(i)) for i in range(m.ncols)]
    zero = tuple(0 for _ in gens)
    seen = {zero}
    queue = deque([zero])
    while queue:
        a = queue.popleft()
        for s in steps:
            b = tuple((x + y) % size for x, y in zip(a, s))
            if b not in seen:
                seen.add(b)
                queue.append(b)
    out = []
    for a in seen:
        if a == zero:
            continue
        w = m.apply_col(a)
        out.append(tuple(x // size for x in w))
    return out


def auxiliary_vector(gens: Sequence[Vector]) -> Vector:
    """Parallelepiped point with least coordinate sum, ties broken lexicographically."""
    pts = parallelepiped_points(gens)
    if not pts:
        raise DomainError("cone is already unimodular")
    return min(pts, key=lambda w: (sum(w), w))


class _SimplicialFan:
    """Mutable working set of full-dimensional simplicial cones."""

    def __init__(self, cones: Iterable[tuple[Vector, tuple[Vector, ...]]]):
        self.cones: list[tuple[Vector, tuple[Vector, ...]]] = sorted(set(cones))
        self._cache: dict[tuple[Vector, ...], tuple[int, Matrix]] = {}

    def _data(self, gens: tuple[Vector, ...]) -> tuple[int, Matrix]:
        if gens not in self._cache:
            m = Matrix.from_columns(gens)
            self._cache[gens] = (det(m), adjugate(m))
        return self._cache[gens]

    def multiplicity(self, gens: tuple[Vector, ...]) -> int:
        return abs(self._data(gens)[0])

    def barycentric(self, gens: tuple[Vector, ...], w: Vector) -> tuple | None:
        """Coordinates of ``w`` in the generators, or None if outside the cone."""
        d, adj = self._data(gens)
        num = adj.apply_col(w)
        if d > 0:
            ok = all(x >= 0 for x in num)
        else:
            ok = all(x <= 0 for x in num)
        return tuple(Fraction(x, d) for x in num) if ok else None

    def star_subdivide(self, w: Vector) -> None:
        new = []
        for vertex, gens in self.cones:
            lam = self.barycentric(gens, w)
            if lam is None:
                new.append((vertex, gens))
                continue
            for j, lj in enumerate(lam):
                if lj > 0:
                    g = list(gens)
                    g[j] = w
                    new.append((vertex, tuple(sorted(g))))
        self.cones = sorted(set(new))

    def unimodularize(self) -> None:
        while True:
            worst = None
            for vertex, gens in self.cones:
                mult = self.multiplicity(gens)
                if mult > 1 and (worst is None or mult > worst[0]):
                    worst = (mult, gens)
            if worst is None:
                return
            self.star_subdivide(auxiliary_vector(worst[1]))


def refine_vertex_cone(c: Cone, n: int, vertex: Sequence[int] | None = None) -> list[RefinedVertexCone]:
    """Unimodular simplicial subdivision of one full-dimensional cone."""
    gens = tuple(sorted(set(c.generators)))
    if any(len(g) != n for g in gens) or rank(list(gens)) != n:
        raise DomainError("cone does not span the ambient space")
    tag = tuple(vertex) if vertex is not None else tuple(0 for _ in range(n))
    work = _SimplicialFan((tag, s) for s in pulling_triangulation(gens))
    work.unimodularize()
    return [make_refined(v, g) for v, g in work.cones]


# ----------------------------------------------------------------------------
# Section complex.


@dataclass(frozen=True)
class SectionComplex:
    n: int
    simplices: tuple[tuple[Vector, ...], ...]
    faces: tuple[frozenset, ...]
    boundary: tuple[frozenset, ...]
    face_counts: tuple[int, ...]
    boundary_counts: tuple[int, ...]

    def interior_walls(self) -> list[frozenset]:
        bset = set(self.boundary)
        return sorted(
            (f for f in self.faces if len(f) == self.n - 1 and f not in bset),
            key=lambda f: sorted(f),
        )


def on_boundary(gens: Iterable[Vector], n: int) -> bool:
    gens = list(gens)
    return any(all(g[i] == 0 for g in gens) for i in range(n))


def section_complex(n: int, cones: Sequence[RefinedVertexCone]) -> SectionComplex:
    faces: set[frozenset] = set()
    for rc in cones:
        gs = rc.generators
        for r in range(1, len(gs) + 1):
            for sub in itertools.combinations(gs, r):
                faces.add(frozenset(sub))
    bnd = {f for f in faces if on_boundary(f, n)}
    counts = [0] * n
    bcounts = [0] * n
    for f in faces:
        counts[len(f) - 1] += 1
        if f in bnd:
            bcounts[len(f) - 1] += 1
    order = lambda f: (len(f), sorted(f))  # noqa: E731
    return SectionComplex(
        n=n,
        simplices=tuple(rc.generators for rc in cones),
        faces=tuple(sorted(faces, key=order)),
        boundary=tuple(sorted(bnd, key=order)),
        face_counts=tuple(counts),
        boundary_counts=tuple(bcounts),
    )


@dataclass(frozen=True)
class EulerReport:
    chi: int
    chi_boundary: int
    face_counts: tuple[int, ...]
    boundary_counts: tuple[int, ...]


def euler_characteristics(sc: SectionComplex) -> EulerReport:
    alt = lambda bs: sum((-1) ** j * b for j, b in enumerate(bs))  # noqa: E731
    for f in sc.faces:
        if not f:
            raise InvariantViolation("empty face in section complex")
    return EulerReport(alt(sc.face_counts), alt(sc.boundary_counts), sc.face_counts, sc.boundary_counts)


# ----------------------------------------------------------------------------
# Fans of Newton polyhedra.


@dataclass(frozen=True)
class Fan:
    n: int
    cones: tuple[RefinedVertexCone, ...]
    complex: SectionComplex
    rays: tuple[Vector, ...] = field(default=())

    def to_json(self) -> dict:
        e = euler_characteristics(self.complex)
        return {
            "n": self.n,
            "cones": [c.to_json() for c in self.cones],
            "pairs": [p.to_json() for p in conjugate_pairs(self)],
            "chi": {
                "sigma": e.chi,
                "boundary": e.chi_boundary,
                "face_counts": list(e.face_counts),
                "boundary_counts": list(e.boundary_counts),
            },
        }

    def to_dot(self) -> str:
        """Dual graph: one node per cone, one edge per interior wall."""
        lines = ["graph fan {"]
        for i, c in enumerate(self.cones):
            label = " ".join("(" + ",".join(map(str, g)) + ")" for g in c.generators)
            lines.append(f'  c{i} [label="{label}"];')
        for p in conjugate_pairs(self):
            lines.append(f"  c{p.cones[0]} -- c{p.cones[1]};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def refine_fan(np_: NewtonPolyhedron) -> Fan:
    """Unimodular simplicial fan refining every vertex cone of ``np_``."""
    n = np_.n
    start = []
    for a in np_.vertices:
        gens = vertex_generators(np_, a)
        for s in pulling_triangulation(gens):
            start.append((a, s))
    work = _SimplicialFan(start)
    work.unimodularize()
    cones = tuple(make_refined(v, g) for v, g in work.cones)
    rays = tuple(sorted({g for c in cones for g in c.generators}))
    return Fan(n=n, cones=cones, complex=section_complex(n, cones), rays=rays)


def fan_of_cones(n: int, cones: Sequence[RefinedVertexCone]) -> Fan:
    rays = tuple(sorted({g for c in cones for g in c.generators}))
    return Fan(n=n, cones=tuple(cones), complex=section_complex(n, cones), rays=rays)


def orthant_fan(n: int) -> Fan:
    basis = [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    return fan_of_cones(n, [make_refined((0,) * n, basis)])


# ----------------------------------------------------------------------------
# Adjoint vectors and conjugate variables.


def adjoint_vectors(rc: RefinedVertexCone) -> list[Vector]:
    """Rows of the inverse exponential matrix; row l pairs to 1 with generator l."""
    d = det(rc.matrix)
    if d != 1:
        raise PreconditionError(f"exponential matrix has det {d}, expected 1")
    return [tuple(r) for r in adjugate(rc.matrix).rows]


@dataclass(frozen=True)
class ConjugatePair:
    wall: tuple[Vector, ...]
    cones: tuple[int, int]
    adjoint: tuple[Vector, Vector]
    variables: tuple[int, int]

    def to_json(self) -> dict:
        return {
            "wall": [list(g) for g in self.wall],
            "cones": list(self.cones),
            "adjoint": [list(v) for v in self.adjoint],
            "variables": list(self.variables),
        }


def conjugate_pairs(fan: Fan) -> list[ConjugatePair]:
    """One pair of adjoint vectors per interior wall of the fan."""
    owners: dict[frozenset, list[int]] = {}
    for idx, c in enumerate(fan.cones):
        for sub in itertools.combinations(c.generators, fan.n - 1):
            owners.setdefault(frozenset(sub), []).append(idx)
    out = []
    for wall in fan.complex.interior_walls():
        who = owners.get(wall, [])
        if len(who) != 2:
            raise InvariantViolation(f"interior wall shared by {len(who)} cones")
        vecs, vars_ = [], []
        for idx in who:
            c = fan.cones[idx]
            j = next(i for i, g in enumerate(c.generators) if g not in wall)
            vecs.append(adjoint_vectors(c)[j])
            vars_.append(j)
        out.append(ConjugatePair(tuple(sorted(wall)), (who[0], who[1]), (vecs[0], vecs[1]), (vars_[0], vars_[1])))
    return out


# ----------------------------------------------------------------------------
# Fan property.


def _cross_kernel(rows: Sequence[Vector]) -> Vector:
    return tuple(exterior_product(rows))


def _inward_normals(gens: Sequence[Vector]) -> tuple[Vector, ...]:
    """Facet inequalities ``h . x >= 0`` of a full-dimensional simplicial cone."""
    m = Matrix.from_columns(list(gens))
    s = 1 if det(m) > 0 else -1
    return tuple(tuple(s * x for x in r) for r in adjugate(m).rows)


def _intersection_rays(ineqs: Sequence[Vector], n: int) -> list[Vector]:
    rays = set()
    for combo in itertools.combinations(ineqs, n - 1):
        k = _cross_kernel(combo) if n > 1 else (1,)
        if not any(k):
            continue
        for cand in (k, tuple(-x for x in k)):
            if all(dot(h, cand) >= 0 for h in ineqs):
                g = math.gcd(*cand)
                rays.add(tuple(x // g for x in cand))
    return sorted(rays)


def cone_intersection_rays(a: Sequence[Vector], b: Sequence[Vector]) -> list[Vector]:
    """Extreme rays of ``cone(a) ∩ cone(b)`` for full-dimensional simplicial cones."""
    return _intersection_rays(_inward_normals(a) + _inward_normals(b), len(a[0]))


def is_common_face(a: Sequence[Vector], b: Sequence[Vector]) -> bool:
    """True iff the two cones meet exactly in the cone of their shared generators."""
    common = set(a) & set(b)
    return all(r in common for r in cone_intersection_rays(a, b))


def _separated(ha: Sequence[Vector], b: Sequence[Vector], common: set) -> bool:
    """Some facet of ``a`` weakly separates ``b`` and touches it only in ``common``."""
    for h in ha:
        vals = [dot(h, g) for g in b]
        if all(v <= 0 for v in vals) and all(v < 0 or g in common for v, g in zip(vals, b)):
            return True
    return False


def _separation_table(cs: Sequence[tuple[Vector, ...]], normals: Sequence[tuple[Vector, ...]]):
    """``table[i, j]`` is True when some facet of cone i separates cone j as in ``_separated``."""
    gens = np.array(cs, dtype=np.int64)
    hs = np.array(normals, dtype=np.int64)
    ids = {g: k for k, g in enumerate(sorted({g for c in cs for g in c}))}
    rid = np.array([[ids[g] for g in c] for c in cs], dtype=np.int64)
    out = np.zeros((len(cs), len(cs)), dtype=bool)
    for lo in range(0, len(cs), 128):
        hi = min(lo + 128, len(cs))
        # vals[i, j, h, g] = <facet h of cone i, generator g of cone j>
        vals = np.einsum("ihc,jgc->ijhg", hs[lo:hi], gens)
        # shared[i, j, g]: generator g of cone j is also a generator of cone i
        shared = (rid[None, :, :, None] == rid[lo:hi, None, None, :]).any(-1)
        ok = (vals <= 0).all(-1) & ((vals < 0) | shared[:, :, None, :]).all(-1)
        out[lo:hi] = ok.any(-1)
    return out


def check_fan_property(fan: Fan) -> bool:
    cs = [c.generators for c in fan.cones]
    normals = [_inward_normals(c) for c in cs]
    bound = max((abs(x) for c in cs for g in c for x in g), default=0)
    bound *= max((abs(x) for hs in normals for h in hs for x in h), default=0)
    sep = None
    if fan.n * bound < 2**62 and len(cs) > 1:
        sep = _separation_table(cs, normals)
    for i, j in itertools.combinations(range(len(cs)), 2):
        common = set(cs[i]) & set(cs[j])
        # A ∩ B then lies in a facet plane that B meets only in cone(common).
        if sep is not None:
            if sep[i, j] or sep[j, i]:
                continue
        elif _separated(normals[i], cs[j], common) or _separated(normals[j], cs[i], common):
            continue
        rays = _intersection_rays(normals[i] + normals[j], fan.n)
        if not all(r in common for r in rays):
            return False
    return True


# ----------------------------------------------------------------------------
# Covering certificate.


def _magnitude_at_most_one(x: Sequence[Fraction], v: Sequence[int]) -> bool:
    """Exact test of ``|x^v| <= 1`` for rational ``x`` with nonzero entries."""
    num = 1
    den = 1
    for xi, e in zip(x, v):
        p, q = abs(xi.numerator), xi.denominator
        if e > 0:
            num *= p**e
            den *= q**e
        elif e < 0:
            num *= q ** (-e)
            den *= p ** (-e)
    return num <= den


@dataclass(frozen=True)
class CoveringReport:
    samples: int
    covered: int
    witnesses: tuple[int | None, ...]

    @property
    def all_covered(self) -> bool:
        return self.covered == self.samples

    def to_json(self) -> dict:
        return {
            "samples": self.samples,
            "covered": self.covered,
            "all_covered": self.all_covered,
            "witnesses": list(self.witnesses),
        }


def in_sector(rc_adjoints: Sequence[Vector], x: Sequence[Fraction]) -> bool:
    return all(_magnitude_at_most_one(x, v) for v in rc_adjoints)


def covering_check(fan: Fan, samples: Sequence[Sequence[Fraction | int]]) -> CoveringReport:
    """Find, for each point of the punctured unit polydisc, a cone whose sector holds it."""
    adj = [adjoint_vectors(c) for c in fan.cones]
    witnesses: list[int | None] = []
    for raw in samples:
        x = tuple(Fraction(v) for v in raw)
        if len(x) != fan.n:
            raise PreconditionError("sample dimension mismatch")
        if any(v == 0 or abs(v) > 1 for v in x):
            raise PreconditionError(f"sample {raw} outside the punctured unit polydisc")
        logs = [-math.log(abs(float(v))) for v in x]
        order = sorted(
            range(len(adj)),
            key=lambda i: -min(sum(a * b for a, b in zip(v, logs)) for v in adj[i]),
        )
        hit = next((i for i in order if in_sector(adj[i], x)), None)
        witnesses.append(hit)
    covered = sum(1 for w in witnesses if w is not None)
    return CoveringReport(len(witnesses), covered, tuple(witnesses))


def random_samples(n: int, count: int, seed: int = 0, max_den: int = 64) -> list[tuple[Fraction, ...]]:
    """Deterministic rational points with ``0 < |x_j| <= 1``."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        pt = []
        for _ in range(n):
            q = rng.randint(1, max_den)
            p = rng.randint(1, q) * rng.choice((1, -1))
            pt.append(Fraction(p, q))
        out.append(tuple(pt))
    return out
