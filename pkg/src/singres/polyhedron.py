"""Newton polyhedra of finite supports in the positive orthant.

The polyhedron is ``conv(S) + R_{>=0}^n``. Facets carry primitive inner
normals in ``N^n``; every query below is exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .arith import dot, exterior_product, norm, primitive, rank
from .errors import DimensionError, DomainError

Exponent = tuple[int, ...]

# Desk-scale limits; larger inputs are accepted but not tuned for.
MAX_DIMENSION = 4
MAX_SUPPORT = 30


def _check_support(points: Iterable[Sequence[int]]) -> tuple[int, list[Exponent]]:
    pts = sorted({tuple(int(x) for x in p) for p in points})
    if not pts:
        raise DomainError("empty support")
    n = len(pts[0])
    if n == 0:
        raise DimensionError("zero-dimensional exponents")
    for p in pts:
        if len(p) != n:
            raise DimensionError("support points of mixed length")
        if any(x < 0 for x in p):
            raise DomainError(f"negative exponent in support point {p}")
    return n, pts


def minimal_points(points: Sequence[Exponent]) -> list[Exponent]:
    """Points not dominated componentwise by a different point."""
    out = []
    for p in points:
        if not any(q != p and all(a <= b for a, b in zip(q, p)) for q in points):
            out.append(p)
    return out


@dataclass(frozen=True)
class Face:
    """Face of a polyhedron cut out by a nonnegative weight vector."""

    weight: tuple
    exponents: tuple[Exponent, ...]
    generators: tuple[Exponent, ...]


@dataclass(frozen=True)
class NewtonPolyhedron:
    n: int
    support: tuple[Exponent, ...]
    normals: tuple[Exponent, ...]
    offsets: tuple[int, ...]
    vertices: tuple[Exponent, ...]
    _offset_of: dict = field(default_factory=dict, compare=False, repr=False)

    def offset(self, normal: Sequence[int]) -> int:
        return self._offset_of[tuple(normal)]

    def on_facet(self, point: Sequence[int], normal: Sequence[int]) -> bool:
        return dot(point, normal) == self.offset(normal)

    def contains(self, point: Sequence[int | Fraction]) -> bool:
        """Half-space membership test for an arbitrary rational point."""
        return all(dot(point, v) >= b for v, b in zip(self.normals, self.offsets))

    def facet_points(self, normal: Sequence[int]) -> tuple[Exponent, ...]:
        return tuple(p for p in self.support if self.on_facet(p, normal))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "normals": [list(v) for v in self.normals],
            "offsets": list(self.offsets),
            "vertices": [list(a) for a in self.vertices],
        }


def _candidate_normals(n: int, pts: Sequence[Exponent]) -> set[Exponent]:
    basis = [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    if n == 1:
        return {(1,)}
    diffs = {tuple(a - b for a, b in zip(p, q)) for p, q in itertools.combinations(pts, 2)}
    spanning = sorted(diffs | set(basis))
    out: set[Exponent] = set()
    for combo in itertools.combinations(spanning, n - 1):
        v = exterior_product(combo)
        if all(x <= 0 for x in v):
            v = tuple(-x for x in v)
        if any(x < 0 for x in v) or not any(v):
            continue
        out.add(primitive(v))
    out.update(basis)
    return out


def _is_facet(n: int, pts: Sequence[Exponent], v: Exponent) -> tuple[bool, int]:
    offset = min(dot(p, v) for p in pts)
    active = [p for p in pts if dot(p, v) == offset]
    base = active[0]
    spans = [tuple(a - b for a, b in zip(p, base)) for p in active[1:]]
    spans += [tuple(1 if i == j else 0 for j in range(n)) for i in range(n) if v[i] == 0]
    return (rank(spans) if spans else 0) == n - 1, offset


def build_polyhedron(points: Iterable[Sequence[int]]) -> NewtonPolyhedron:
    """Facet description of ``conv(points) + R_{>=0}^n``."""
    n, pts = _check_support(points)
    mins = minimal_points(pts)
    normals: list[Exponent] = []
    offsets: list[int] = []
    for v in sorted(_candidate_normals(n, mins)):
        ok, off = _is_facet(n, mins, v)
        if ok:
            normals.append(v)
            offsets.append(off)
    vertices = []
    for p in mins:
        act = [v for v, b in zip(normals, offsets) if dot(p, v) == b]
        if act and rank(act) == n:
            vertices.append(p)
    return NewtonPolyhedron(
        n=n,
        support=tuple(pts),
        normals=tuple(normals),
        offsets=tuple(offsets),
        vertices=tuple(sorted(vertices)),
        _offset_of=dict(zip(normals, offsets)),
    )


def face_of(np_: NewtonPolyhedron, w: Sequence[int | Fraction]) -> Face:
    """Support points minimizing ``<w, .>`` and the facets containing that face."""
    if len(w) != np_.n:
        raise DimensionError(f"weight of length {len(w)} for dimension {np_.n}")
    w = tuple(norm(Fraction(x)) for x in w)
    if any(x < 0 for x in w) or not any(w):
        raise DomainError("weight must be nonnegative and nonzero")
    m = min(dot(p, w) for p in np_.support)
    exps = tuple(p for p in np_.support if dot(p, w) == m)
    gens = tuple(
        v
        for v in np_.normals
        if all(np_.on_facet(p, v) for p in exps) and all(v[i] == 0 for i in range(np_.n) if w[i] == 0)
    )
    return Face(weight=w, exponents=exps, generators=gens)


def vertex_generators(np_: NewtonPolyhedron, a: Sequence[int]) -> tuple[Exponent, ...]:
    """Normals of all facets through vertex ``a``."""
    a = tuple(a)
    if a not in np_.vertices:
        raise DomainError(f"{a} is not a vertex")
    return tuple(v for v in np_.normals if np_.on_facet(a, v))
