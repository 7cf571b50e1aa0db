"""Local resolution driver for n <= 3.

Every node is the germ of a function at a point. A node of height ``d >= 2``
is put into Weierstrass form; its Newton polyhedron yields a unimodular fan,
and every refined vertex cone together with every admissible exceptional set
is a chart. Branch points are located in the unimodular chart coordinates,
where they stay rational, and the canonical reduction of the chart certifies
consistency and the apex-degree invariant.

Children from consistent charts at regular points must have height below the
parent. Children at irregular points or from inconsistent charts are latent:
they carry a latent-stack entry and are exempt until a descendant drops below
the height of the lineage again (a revival).
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .arith import Matrix, inverse, primitive
from .canonical import (
    CanonicalReduction,
    Inconsistent,
    InconsistentForm,
    admissible_exceptional_sets,
    canonical_reduce,
    decompose_interim,
    deficiency,
    reduce_trivial_inconsistency,
)
from .errors import (
    DimensionError,
    DomainError,
    InvariantViolation,
    ParameterError,
    PreconditionError,
    RoutingError,
    StepCap,
    UnsupportedDimensionError,
)
from .fan import refine_fan
from .polyhedron import build_polyhedron
from .series import (
    APPROX,
    EXACT,
    SparsePoly,
    approx_nonzero_roots,
    coeff_to_json,
    exact_nonzero_roots,
    localize,
    monomial_transform,
    partial_factorize,
    proper_transform,
)
from .weierstrass import WeierstrassForm, preliminary_reduction, weierstrass_reduce

REGULAR = "regular"
IRREGULAR = "irregular"
INCONSISTENT = "inconsistent"
RESOLVED = "resolved"
NOISE = "floating-point noise above tolerance"

POLICIES = ("enumerate-univariate", "user-points", "sampled-slices")
DEFAULT_MAX_STEPS = 64


def default_max_steps() -> int:
    raw = os.environ.get("SINGRES_MAX_STEPS")
    if raw is None:
        return DEFAULT_MAX_STEPS
    try:
        value = int(raw)
    except ValueError as exc:
        raise ParameterError(f"SINGRES_MAX_STEPS={raw!r} is not an integer") from exc
    if value < 1:
        raise ParameterError("SINGRES_MAX_STEPS must be at least 1")
    return value


@dataclass(frozen=True)
class ResolveConfig:
    mode: str = EXACT
    tau: int | None = None
    max_steps: int = field(default_factory=default_max_steps)
    policy: str = "sampled-slices"
    user_points: tuple[tuple, ...] = ()
    slice_samples: int = 2
    box_radius: Fraction = Fraction(1, 8)
    max_nodes: int = 4000
    max_nesting: int = 4
    strict: bool = True

    def __post_init__(self) -> None:
        if self.max_steps < 1:
            raise ParameterError("max steps must be at least 1")
        if self.mode not in (EXACT, APPROX):
            raise ParameterError(f"unknown mode {self.mode!r}")
        if self.policy not in POLICIES:
            raise ParameterError(f"unknown branch-point policy {self.policy!r}")
        if self.slice_samples < 0:
            raise ParameterError("slice sample count must be nonnegative")
        if self.max_nesting < 1:
            raise ParameterError("nesting cap must be at least 1")
        if self.box_radius <= 0:
            raise ParameterError("certificate radius must be positive")

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "tau": self.tau,
            "max_steps": self.max_steps,
            "policy": self.policy,
            "slice_samples": self.slice_samples,
            "max_nodes": self.max_nodes,
            "max_nesting": self.max_nesting,
            "box_radius": str(self.box_radius),
        }


@dataclass(frozen=True)
class LatentEntry:
    variable: int
    gradation: int | None
    level: int
    prior_height: int

    def to_json(self) -> dict:
        return {"variable": self.variable + 1, "gradation": self.gradation, "level": self.level,
                "prior_height": self.prior_height}


@dataclass
class ResolutionNode:
    id: int
    parent: int | None
    poly: SparsePoly | None
    height: int | None
    status: str
    depth: int = 0
    chart: dict | None = None
    branch_point: tuple | None = None
    latent: tuple[LatentEntry, ...] = ()
    weierstrass: WeierstrassForm | None = None
    children: list[int] = field(default_factory=list)
    stop_reason: str | None = None
    notes: dict = field(default_factory=dict)

    @property
    def is_latent(self) -> bool:
        return bool(self.latent)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "parent": self.parent,
            "status": self.status,
            "height": self.height,
            "depth": self.depth,
            "poly": None if self.poly is None else self.poly.to_text(),
            "terms": None if self.poly is None else self.poly.to_json()["terms"],
            "chart": self.chart,
            "branch_point": None if self.branch_point is None else [coeff_to_json(c) for c in self.branch_point],
            "latent": [e.to_json() for e in self.latent],
            "weierstrass": None if self.weierstrass is None else self.weierstrass.w.to_text(),
            "children": list(self.children),
            "stop_reason": self.stop_reason,
            "notes": self.notes,
        }


# ----------------------------------------------------------------------------
# Height ledger.


@dataclass(frozen=True)
class LedgerEntry:
    node: int
    height: int | None
    latent: bool
    revival: bool


@dataclass
class HeightLedger:
    lineages: list[list[LedgerEntry]]
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "violations": list(self.violations),
            "lineages": [[[e.node, e.height, "latent" if e.latent else ("revival" if e.revival else "active")]
                          for e in lin] for lin in self.lineages],
        }


def build_ledger(nodes: Sequence[ResolutionNode]) -> HeightLedger:
    """Collect root-to-leaf height sequences and check strict decrease.

    Between consecutive non-latent entries of a lineage heights must strictly
    decrease; latent entries are skipped.
    """
    by_id = {nd.id: nd for nd in nodes}
    lineages = []
    violations = []
    for nd in nodes:
        if nd.children:
            continue
        path = []
        cur: ResolutionNode | None = nd
        while cur is not None:
            path.append(cur)
            cur = by_id.get(cur.parent) if cur.parent is not None else None
        path.reverse()
        entries = []
        for i, p in enumerate(path):
            revival = i > 0 and path[i - 1].is_latent and not p.is_latent
            entries.append(LedgerEntry(p.id, p.height, p.is_latent, revival))
        lineages.append(entries)
    for nd in nodes:
        if nd.parent is None or nd.is_latent or nd.height is None:
            continue
        anc = by_id[nd.parent]
        while anc.is_latent and anc.parent is not None:
            anc = by_id[anc.parent]
        if anc.is_latent or anc.height is None:
            continue
        if not nd.height < anc.height:
            violations.append(f"node {nd.id} height {nd.height} not below ancestor {anc.id} height {anc.height}")
    return HeightLedger(lineages, violations)


# ----------------------------------------------------------------------------
# Tree.


@dataclass
class ResolutionTree:
    nodes: list[ResolutionNode]
    config: ResolveConfig
    ledger: HeightLedger | None = None
    diagnostics: list[str] = field(default_factory=list)

    @property
    def root(self) -> ResolutionNode:
        return self.nodes[0]

    def node(self, i: int) -> ResolutionNode:
        return self.nodes[i]

    def leaves(self) -> list[ResolutionNode]:
        return [nd for nd in self.nodes if nd.is_leaf]

    def all_leaves_resolved(self) -> bool:
        return all(nd.status == RESOLVED for nd in self.leaves())

    def max_nesting(self) -> int:
        return max((e.level for nd in self.nodes for e in nd.latent), default=0)

    def to_json(self) -> dict:
        return {
            "config": self.config.to_json(),
            "nodes": [nd.to_json() for nd in self.nodes],
            "ledger": None if self.ledger is None else self.ledger.to_json(),
            "all_resolved": self.all_leaves_resolved(),
            "diagnostics": list(self.diagnostics),
        }

    def to_dot(self) -> str:
        lines = ["digraph resolution {", "  node [shape=box];"]
        for nd in self.nodes:
            label = f"{nd.id}: {nd.status} d={nd.height}"
            if nd.stop_reason:
                label += f"\\n{nd.stop_reason}"
            lines.append(f'  n{nd.id} [label="{label}"];')
        for nd in self.nodes:
            for c in nd.children:
                lines.append(f"  n{nd.id} -> n{c};")
        lines.append("}")
        return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------------
# Numeric helpers.


def _clean(p: SparsePoly) -> SparsePoly:
    """Drop approximate coefficients that are negligible relative to the largest."""
    if p.mode != APPROX or p.is_zero():
        return p
    scale = max(abs(c) for c in p.terms.values())
    return p.filter(lambda e: abs(p.terms[e]) > 1e-9 * max(1.0, scale))


def _localize(p: SparsePoly, point: dict, tau: int | None = None) -> SparsePoly:
    """Taylor shift; approximate coefficients lost to cancellation are dropped.

    A coefficient is kept when it exceeds ``1e-9`` times the sum of the
    magnitudes of its contributions.
    """
    out = localize(p, point, tau)
    if out.mode != APPROX:
        return out
    mag = localize(SparsePoly(p.n, {e: complex(abs(c)) for e, c in p.terms.items()}, APPROX),
                   {i: complex(abs(v)) for i, v in point.items()}, tau)
    return out.filter(lambda e: abs(out.terms[e]) > 1e-9 * abs(mag.coefficient(e)) + 1e-12)


def _is_zero(c, mode: str) -> bool:
    if mode == APPROX:
        return abs(c) <= 1e-7
    return c == 0


def _sympy_coeff(c):
    import sympy

    if isinstance(c, complex):
        re_ = Fraction(c.real).limit_denominator(10**9)
        im = Fraction(c.imag).limit_denominator(10**9)
        return sympy.Rational(re_.numerator, re_.denominator) + sympy.I * sympy.Rational(im.numerator, im.denominator)
    c = Fraction(c)
    return sympy.Rational(c.numerator, c.denominator)


def _univariate_roots(coeffs: Sequence, mode: str) -> tuple[list[tuple[object, int]], bool]:
    """Nonzero roots of an ascending coefficient list."""
    if mode == EXACT:
        return exact_nonzero_roots(coeffs)
    return approx_nonzero_roots(coeffs), False


def _coeffs_in(p: SparsePoly, var: int) -> list:
    """Ascending coefficients of a polynomial depending only on ``var``."""
    deg = max((e[var] for e in p.terms), default=0)
    out = [0] * (deg + 1)
    for e, c in p.terms.items():
        out[e[var]] += c
    return out


def _discriminant_slices(q: SparsePoly, a: int, b: int, mode: str) -> tuple[list, list[str]]:
    """Nonzero ``b``-values where ``q`` has a multiple root or a degree drop in ``a``."""
    import sympy

    notes = []
    if q.degree_in(a) < 1:
        return [], notes
    ya, yb = sympy.symbols("ya yb")
    expr = 0
    for e, c in q.terms.items():
        expr += _sympy_coeff(c) * ya ** e[a] * yb ** e[b]
    values: list = []
    polys = []
    if q.degree_in(a) >= 2:
        polys.append(sympy.resultant(expr, sympy.diff(expr, ya), ya))
    lead = sympy.Poly(expr, ya).LC()
    polys.append(lead)
    for poly in polys:
        poly = sympy.Poly(sympy.expand(poly), yb)
        if poly.is_zero or poly.degree() < 1:
            continue
        coeffs = list(reversed(poly.all_coeffs()))
        if mode == EXACT:
            if any(not c.is_rational for c in coeffs):
                notes.append("non-rational slice polynomial skipped")
                continue
            roots, algebraic = exact_nonzero_roots([Fraction(int(c.p), int(c.q)) for c in coeffs])
            if algebraic:
                notes.append("irrational slice values skipped")
        else:
            roots = approx_nonzero_roots([complex(c) for c in coeffs])
        values.extend(r for r, _ in roots)
    return values, notes


def _dedupe(values: Iterable, mode: str) -> list:
    out: list = []
    for v in values:
        if mode == APPROX:
            if any(abs(complex(v) - complex(u)) < 1e-7 for u in out):
                continue
        elif v in out:
            continue
        out.append(v)
    return out


# ----------------------------------------------------------------------------
# Charts.


@dataclass(frozen=True)
class Chart:
    """A refined vertex cone with an admissible exceptional set."""

    index: int
    vertex: tuple[int, ...]
    matrix: Matrix
    exceptional: tuple[int, ...]
    reduction: CanonicalReduction | None
    inconsistent: InconsistentForm | None

    @property
    def n(self) -> int:
        return self.matrix.nrows

    @property
    def non_exceptional(self) -> tuple[int, ...]:
        return tuple(j for j in range(self.n) if j not in self.exceptional)

    @property
    def consistent(self) -> bool:
        return self.reduction is not None

    def to_json(self) -> dict:
        out = {
            "index": self.index,
            "vertex": list(self.vertex),
            "matrix": self.matrix.to_json(),
            "exceptional": [j + 1 for j in self.exceptional],
            "consistent": self.consistent,
        }
        if self.reduction is not None:
            out["N"] = self.reduction.N.to_json()
            out["det_D"] = self.reduction.det_D
            out["row_order"] = [i + 1 for i in self.reduction.row_order]
        if self.inconsistent is not None:
            out["N_bar"] = self.inconsistent.N_bar.to_json()
            out["row_order"] = [i + 1 for i in self.inconsistent.row_order]
        return out


def charts_of(w: SparsePoly, primary: int = 0) -> list[Chart]:
    """All charts in deterministic order: vertex lex, then cone, then ``I0`` lex."""
    np_ = build_polyhedron(w.support())
    fan = refine_fan(np_)
    cones = sorted(fan.cones, key=lambda c: (c.vertex, c.generators))
    out = []
    for idx, cone in enumerate(cones):
        for ex in admissible_exceptional_sets(cone.matrix):
            try:
                cr = canonical_reduce(cone.matrix, ex, primary)
                out.append(Chart(idx, cone.vertex, cone.matrix, ex, cr, None))
            except Inconsistent as sig:
                out.append(Chart(idx, cone.vertex, cone.matrix, ex, None, reduce_trivial_inconsistency(sig.form)))
    return out


def transformed_exponents_hold(w: SparsePoly, vertex: Sequence[int], cr: CanonicalReduction, height: int) -> bool:
    """Apex is the unique primary-degree ``height`` exponent; degree ``height - 1`` is absent."""
    g = cr.transform(w)
    a = tuple(vertex[i] for i in cr.row_order)
    _, p = partial_factorize(g, a, cr.N, cr.exceptional_positions)
    p = _clean(p)
    top = [e for e in p.terms if e[0] == height]
    below = [e for e in p.terms if e[0] == height - 1]
    return len(top) == 1 and not below and max(e[0] for e in p.terms) == height


def chart_partial_transform(w: SparsePoly, chart: Chart) -> tuple[tuple[int, ...], SparsePoly]:
    """Transform by the unimodular cone matrix and split off the exceptional monomial."""
    g = monomial_transform(w, chart.matrix)
    return partial_factorize(g, chart.vertex, chart.matrix, chart.exceptional)


def primary_direction(cr: CanonicalReduction) -> tuple[int, ...]:
    """Integral direction in chart coordinates along which only ``z_1`` moves.

    ``log y_* = det(D) F^-1 log z_*`` on the non-exceptional torus, so scaling
    ``z_1`` moves ``y_*`` along the first column of ``F^-1``.
    """
    col = inverse(cr.F).col(0)
    den = 1
    for x in col:
        den = den * Fraction(x).denominator // _gcd(den, Fraction(x).denominator)
    v = tuple(int(Fraction(x) * den) for x in col)
    # Entries refer to the non-exceptional columns in canonical column order.
    return primitive(v)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def classify_branch_point(q: SparsePoly, point: Sequence, nonexc: Sequence[int], cr: CanonicalReduction | None) -> str:
    """Regular unless the proper transform vanishes along the primary slice.

    The primary slice through ``point`` is ``s -> point * s^v`` with ``v`` the
    direction from :func:`primary_direction`; the localized transform restricted
    to it vanishes identically exactly when every ``s``-degree group cancels.
    """
    if cr is None:
        return INCONSISTENT
    if len(nonexc) == 1:
        return REGULAR
    v = primary_direction(cr)
    order = cr.col_order[: cr.k]
    weight = {j: v[t] for t, j in enumerate(order)}
    groups: dict[int, object] = {}
    for e, c in q.terms.items():
        val = c
        s_deg = 0
        for j, x in zip(nonexc, point):
            if e[j]:
                val = val * x ** e[j]
            s_deg += e[j] * weight[j]
        groups[s_deg] = groups.get(s_deg, 0) + val
    return IRREGULAR if all(_is_zero(g, q.mode) for g in groups.values()) else REGULAR


def _chart_points(q: SparsePoly, chart: Chart, config: ResolveConfig) -> tuple[list[tuple], bool, list[str]]:
    """Nonzero zeros of the proper transform on the non-exceptional torus.

    Returns points, whether algebraic roots were met in exact mode, and notes.
    """
    nonexc = chart.non_exceptional
    mode = q.mode
    notes: list[str] = []
    if len(nonexc) == 1:
        (j,) = nonexc
        roots, algebraic = _univariate_roots(_coeffs_in(q, j), mode)
        return [(r,) for r, _ in roots], algebraic, notes
    if len(nonexc) != 2:
        raise UnsupportedDimensionError("branch search handles at most two chart coordinates")
    a, b = nonexc
    points: list[tuple] = []
    algebraic = False
    for pt in config.user_points:
        if len(pt) != 2:
            raise DimensionError("user points need two coordinates")
        vals = {a: pt[0], b: pt[1]}
        if any(v == 0 for v in vals.values()):
            continue
        if _is_zero(q.eval([vals.get(i, 0) for i in range(q.n)]), mode):
            points.append(tuple(pt))
    if config.policy == "enumerate-univariate":
        notes.append("two-dimensional branch locus not explored")
        return points, algebraic, notes
    if config.policy == "user-points":
        return points, algebraic, notes
    slices, slice_notes = _discriminant_slices(q, a, b, mode)
    notes.extend(slice_notes)
    slices.extend(range(1, config.slice_samples + 1))
    for s in _dedupe(slices, mode):
        sl = _clean(q.restrict({b: s}))
        if sl.is_zero():
            # Whole line inside the branch locus: sample it.
            for t in range(1, config.slice_samples + 1):
                points.append((t, s))
            continue
        roots, alg = _univariate_roots(_coeffs_in(sl, a), mode)
        algebraic = algebraic or alg
        points.extend((r, s) for r, _ in roots)
    return _dedupe_points(points, mode), algebraic, notes


def _dedupe_points(points: list[tuple], mode: str) -> list[tuple]:
    out: list[tuple] = []
    for p in points:
        if mode == APPROX:
            if any(all(abs(complex(x) - complex(y)) < 1e-7 for x, y in zip(p, u)) for u in out):
                continue
        elif p in out:
            continue
        out.append(p)
    return out


def deficient_certificate(unit: SparsePoly, chart: Chart, point: Sequence, radius: Fraction) -> dict | None:
    """Value of the deficient function at a branch point and on a sampled box."""
    cr = chart.reduction
    if cr is None:
        return None
    c = unit.constant_term()
    info = deficiency(cr, unit - c)
    if not info.deficient:
        return None
    nonexc = chart.non_exceptional
    func = info.function + SparsePoly.const(unit.n, c, unit.mode)

    def value_at(y: Sequence) -> object:
        ys = dict(zip(nonexc, y))
        xs = []
        for i in range(unit.n):
            if i in info.rows:
                v = 1
                for j in nonexc:
                    v = v * ys[j] ** chart.matrix.rows[i][j]
                xs.append(v)
            else:
                xs.append(0)
        return func.eval(xs)

    at_point = value_at(point)
    box = []
    for delta in itertools.product((-radius, 0, radius), repeat=len(point)):
        if any(delta):
            box.append(value_at([x + d for x, d in zip(point, delta)]))
    mode = unit.mode
    return {
        "rows": [i + 1 for i in info.rows],
        "value": coeff_to_json(at_point),
        "nonvanishing_at_point": not _is_zero(at_point, mode),
        "box_radius": str(radius),
        "nonvanishing_on_box": all(not _is_zero(v, mode) for v in box),
    }


# ----------------------------------------------------------------------------
# Latent germs.


@dataclass(frozen=True)
class LatentGerm:
    """Germ along a line: ``poly`` localized with ``latent`` kept symbolic."""

    poly: SparsePoly
    latent: int
    prior_height: int
    level: int = 1

    @property
    def active(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.poly.n) if i != self.latent)

    def residual(self) -> SparsePoly:
        return self.poly.restrict({i: 0 for i in self.active})

    def active_order(self) -> int:
        return min(sum(e[i] for i in self.active) for e in self.poly.terms)


@dataclass(frozen=True)
class LatentGradation:
    index: int
    slice: SparsePoly
    remainder: SparsePoly
    apex_height: int
    weierstrass: WeierstrassForm
    latent_apex_in_remainder: bool


def latent_step(germ: LatentGerm, tau: int | None = None) -> LatentGradation:
    """Latent gradation ``z_L^m f + phi`` and the Weierstrass form of ``f``."""
    if not germ.residual().is_zero():
        raise RoutingError("residual is nonzero; revive instead")
    act = germ.active
    a = preliminary_reduction(germ.poly, primary=act[0], active=act)
    d_act = a.height
    apex = tuple(d_act if i == act[0] else 0 for i in range(germ.poly.n))
    coeff = [e[germ.latent] for e in a.poly.terms if all(e[i] == apex[i] for i in act)]
    m = max(coeff)
    if m >= germ.prior_height - 1:
        raise InvariantViolation(f"gradation index {m} is not below {germ.prior_height - 1}")
    f = a.poly.filter(lambda e: e[germ.latent] == m).map_exponents(
        lambda e: tuple(0 if i == germ.latent else x for i, x in enumerate(e)))
    phi = a.poly.filter(lambda e: e[germ.latent] != m)
    _, wf = weierstrass_reduce(f, tau, act[0])
    latent_apex = any(e[germ.latent] == germ.prior_height and all(e[i] == 0 for i in act) for e in phi.terms)
    return LatentGradation(m, f, phi, d_act, wf, latent_apex)


@dataclass(frozen=True)
class Revival:
    point: object
    poly: SparsePoly
    order: int


@dataclass(frozen=True)
class RevivalResult:
    continue_latency: bool
    revivals: tuple[Revival, ...]
    algebraic: bool = False


def revive(germ: LatentGerm) -> RevivalResult:
    """Localize the latent variable at the nonzero roots of the residual."""
    r = _clean(germ.residual())
    if r.is_zero():
        return RevivalResult(True, ())
    roots, algebraic = _univariate_roots(_coeffs_in(r, germ.latent), r.mode)
    out = []
    for s, _ in roots:
        child = _localize(germ.poly, {germ.latent: s})
        order = child.ord()
        if order >= germ.prior_height:
            raise InvariantViolation(f"residual order {order} is not below {germ.prior_height}")
        out.append(Revival(s, child, order))
    return RevivalResult(False, tuple(out), algebraic)


# ----------------------------------------------------------------------------
# Driver.


class _Builder:
    def __init__(self, config: ResolveConfig):
        self.config = config
        self.nodes: list[ResolutionNode] = []
        self.diagnostics: list[str] = []

    def add(self, **kw) -> ResolutionNode:
        nd = ResolutionNode(id=len(self.nodes), **kw)
        self.nodes.append(nd)
        if nd.parent is not None:
            self.nodes[nd.parent].children.append(nd.id)
        return nd


def _lineage_height(node: ResolutionNode) -> int:
    return node.latent[-1].prior_height if node.latent else node.height


def node_tau(f: SparsePoly, height: int, config: ResolveConfig) -> int:
    """Truncation order: the configured one, else enough for every compact face.

    Exceptional supports of admissible charts lie on compact faces, whose
    points have total degree at most that of some vertex.
    """
    if config.tau is not None:
        return config.tau
    top = max(sum(v) for v in build_polyhedron(f.support()).vertices)
    return max(2 * height + 2, 2 * top + 2)


def resolve_step_regular(node: ResolutionNode, config: ResolveConfig) -> list[dict]:
    """Chart exploration for one node; returns child specifications."""
    f = node.poly
    d = node.height
    if d is None or d <= 1:
        raise RoutingError("node is already resolved")
    tau = node_tau(f, d, config)
    a, wf = weierstrass_reduce(f, tau, 0)
    node.weierstrass = wf
    if not wf.multiply_back_ok():
        if f.mode == APPROX:
            node.stop_reason = NOISE
            return []
        raise InvariantViolation("Weierstrass multiply-back failed")
    w = _clean(wf.w)
    prior = _lineage_height(node)
    specs = []
    chart_log = []
    for chart in charts_of(w, 0):
        gamma, p = chart_partial_transform(w, chart)
        if chart.consistent and not transformed_exponents_hold(w, chart.vertex, chart.reduction, d):
            if w.mode == APPROX:
                node.stop_reason = NOISE
                return []
            raise InvariantViolation("transformed apex is not the unique primary-degree exponent")
        q = _clean(proper_transform(p, chart.exceptional))
        points, algebraic, notes = _chart_points(q, chart, config)
        entry = {**chart.to_json(), "branch_points": len(points)}
        if notes:
            entry["notes"] = notes
        chart_log.append(entry)
        if algebraic:
            specs.append({"poly": None, "status": node.status, "stop": "algebraic branch point", "chart": chart,
                          "point": None, "latent": node.latent})
        nonexc = chart.non_exceptional
        for pt in points:
            kind = classify_branch_point(q, pt, nonexc, chart.reduction)
            child = _localize(p, dict(zip(nonexc, pt)), tau)
            if child.is_zero():
                if child.mode != APPROX:
                    raise InvariantViolation("localized transform vanished below the truncation order")
                specs.append({"poly": None, "status": node.status, "stop": NOISE, "chart": chart,
                              "point": pt, "latent": node.latent})
                continue
            cd = child.ord()
            latent = node.latent
            if kind == REGULAR and not node.latent:
                if cd >= d and child.mode == APPROX:
                    specs.append({"poly": None, "status": node.status, "stop": NOISE, "chart": chart,
                                  "point": pt, "latent": node.latent})
                    continue
                if cd >= d:
                    raise InvariantViolation(f"regular branch point did not lower the height ({cd} >= {d})")
                status = REGULAR
            elif cd < prior:
                latent = node.latent[:-1] if node.latent else ()
                status = REGULAR
            else:
                level = (node.latent[-1].level + 1) if node.latent else 1
                lineage = prior
                latent = node.latent + (LatentEntry(0, None, level, lineage),)
                status = IRREGULAR if kind == IRREGULAR else INCONSISTENT
            cert = deficient_certificate(wf.unit, chart, pt, config.box_radius) if kind == REGULAR else None
            spec = {"poly": child, "status": status, "chart": chart, "point": pt, "latent": latent,
                    "kind": kind, "certificate": cert}
            if chart.inconsistent is not None:
                spec["interim"] = _interim_summary(chart.inconsistent, w)
            specs.append(spec)
    node.notes["charts"] = chart_log
    node.notes["shear"] = list(a.shear)
    return specs


def _interim_summary(nf: InconsistentForm, w: SparsePoly) -> dict:
    """Interim decomposition with the commutativity spot check on ``w``."""
    s_bar, t_bar = decompose_interim(nf)
    wp = nf.permute_poly(w)
    commutes = all(t_bar.apply_row(s_bar.apply_row(e)) == nf.N_bar.apply_row(e) for e in wp.terms)
    if not commutes:
        raise InvariantViolation("interim route disagrees with the direct transform")
    return {"S_bar": s_bar.to_json(), "T_bar": t_bar.to_json(), "commutes": commutes,
            "nesting_degree": nf.nesting_degree}


def product_of_generators(fs: Sequence[SparsePoly]) -> SparsePoly:
    if not fs:
        raise DomainError("need at least one generator")
    n = fs[0].n
    out = SparsePoly.one(n, fs[0].mode)
    for f in fs:
        if f.n != n:
            raise DimensionError("generators in different numbers of variables")
        if f.is_zero():
            raise DomainError("zero generator")
        out = out * f
    return out


def resolve(f: SparsePoly, config: ResolveConfig | None = None) -> ResolutionTree:
    """Breadth-first local resolution tree of ``f`` at the origin."""
    config = config or ResolveConfig()
    if f.is_zero():
        raise DomainError("cannot resolve the zero polynomial")
    if f.n > 3:
        raise UnsupportedDimensionError("the resolution loop runs for n <= 3")
    if f.is_laurent:
        raise DomainError("Laurent input")
    f = f.to_mode(config.mode)
    if f.ord() < 1:
        raise PreconditionError("input does not vanish at the origin")
    b = _Builder(config)
    b.add(parent=None, poly=f, height=f.ord(), status=REGULAR)
    queue = [0]
    while queue:
        nid = queue.pop(0)
        node = b.nodes[nid]
        if node.poly is None:
            continue
        if node.height <= 1 and not node.latent:
            node.status = RESOLVED
            continue
        if node.height <= 1:
            node.status = RESOLVED
            node.notes["latent_leaf"] = True
            continue
        if node.depth >= config.max_steps:
            node.stop_reason = "step cap"
            b.diagnostics.append(f"node {nid}: step cap {config.max_steps} reached")
            continue
        if node.latent and node.latent[-1].level > config.max_nesting:
            node.stop_reason = "nesting cap"
            b.diagnostics.append(f"node {nid}: latent nesting above {config.max_nesting}")
            continue
        if len(b.nodes) >= config.max_nodes:
            node.stop_reason = "node cap"
            b.diagnostics.append(f"node {nid}: node cap {config.max_nodes} reached")
            continue
        for spec in resolve_step_regular(node, config):
            chart = spec["chart"]
            child_poly = spec["poly"]
            child = b.add(
                parent=nid,
                poly=child_poly,
                height=None if child_poly is None else child_poly.ord(),
                status=spec["status"],
                depth=node.depth + 1,
                chart=chart.to_json(),
                branch_point=None if spec["point"] is None else tuple(spec["point"]),
                latent=spec["latent"],
            )
            if spec.get("stop"):
                child.stop_reason = spec["stop"]
                continue
            if spec.get("certificate"):
                child.notes["deficient_certificate"] = spec["certificate"]
            if spec.get("interim"):
                child.notes["interim"] = spec["interim"]
            child.notes["classification"] = spec["kind"]
            queue.append(child.id)
        if not node.children and node.stop_reason is None:
            if node.notes.get("charts"):
                # Proper transforms do not vanish on any exceptional torus.
                node.status = RESOLVED
                node.notes["resolved_by_charts"] = True
            else:
                node.stop_reason = "monomial germ without admissible chart"
    tree = ResolutionTree(b.nodes, config, diagnostics=b.diagnostics)
    tree.ledger = build_ledger(b.nodes)
    if config.strict and not tree.ledger.ok:
        raise InvariantViolation("; ".join(tree.ledger.violations))
    return tree


def resolve_strict(f: SparsePoly, config: ResolveConfig | None = None) -> ResolutionTree:
    """Like :func:`resolve` but raises :class:`StepCap` instead of returning a partial tree."""
    tree = resolve(f, config)
    if any(nd.stop_reason in ("step cap", "node cap", "nesting cap") for nd in tree.nodes):
        raise StepCap("; ".join(tree.diagnostics))
    return tree
