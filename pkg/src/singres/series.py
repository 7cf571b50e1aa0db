"""Sparse multivariate polynomials and the transforms built on them.

A :class:`SparsePoly` maps integer exponent tuples to nonzero coefficients.
Exact mode stores rationals; approximate mode stores complex doubles and
treats magnitudes below :data:`TOLERANCE` as zero. Exponents may go negative
in intermediate (Laurent) results; :attr:`SparsePoly.is_laurent` flags them.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, Union

from .arith import Matrix, format_rat, norm
from .errors import (
    ChartMismatchError,
    DimensionError,
    DomainError,
    IncompatibleExponentError,
    PreconditionError,
)

TOLERANCE = 1e-9
EXACT = "exact"
APPROX = "approx"

Coeff = Union[int, Fraction, complex]
Exponent = tuple[int, ...]


def _clean(c: Coeff, mode: str) -> Coeff | None:
    if mode == EXACT:
        if isinstance(c, (complex, float)):
            raise DomainError("floating coefficient in exact mode")
        c = norm(Fraction(c)) if not isinstance(c, int) else c
        return None if c == 0 else c
    c = complex(c)
    return None if abs(c) < TOLERANCE else c


class SparsePoly:
    """Immutable sparse polynomial in ``n`` variables."""

    __slots__ = ("n", "terms", "mode", "_hash")

    def __init__(self, n: int, terms: Mapping[Sequence[int], Coeff] | None = None, mode: str = EXACT):
        if mode not in (EXACT, APPROX):
            raise DomainError(f"unknown mode {mode!r}")
        clean: dict[Exponent, Coeff] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != n:
                raise DimensionError(f"exponent {e} in a {n}-variable polynomial")
            clean[e] = clean.get(e, 0) + c
        out = {}
        for e, c in clean.items():
            c2 = _clean(c, mode)
            if c2 is not None:
                out[e] = c2
        self.n = n
        self.terms: dict[Exponent, Coeff] = out
        self.mode = mode
        self._hash = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def _raw(cls, n: int, terms: dict[Exponent, Coeff], mode: str) -> "SparsePoly":
        """Trusted constructor for internally built exponent tuples."""
        obj = cls.__new__(cls)
        obj.n = n
        if mode == APPROX:
            obj.terms = {e: c for e, c in terms.items() if abs(c) >= TOLERANCE}
        else:
            obj.terms = {e: norm(c) if isinstance(c, Fraction) else c for e, c in terms.items() if c != 0}
        obj.mode = mode
        obj._hash = None
        return obj


    @classmethod
    def zero(cls, n: int, mode: str = EXACT) -> "SparsePoly":
        return cls(n, {}, mode)

    @classmethod
    def const(cls, n: int, c: Coeff, mode: str = EXACT) -> "SparsePoly":
        return cls(n, {(0,) * n: c}, mode)

    @classmethod
    def one(cls, n: int, mode: str = EXACT) -> "SparsePoly":
        return cls.const(n, 1, mode)

    @classmethod
    def var(cls, n: int, i: int, mode: str = EXACT) -> "SparsePoly":
        return cls(n, {tuple(1 if j == i else 0 for j in range(n)): 1}, mode)

    @classmethod
    def monomial(cls, exp: Sequence[int], c: Coeff = 1, mode: str = EXACT) -> "SparsePoly":
        return cls(len(exp), {tuple(exp): c}, mode)

    def _new(self, terms: Mapping[Exponent, Coeff], n: int | None = None) -> "SparsePoly":
        return SparsePoly(self.n if n is None else n, terms, self.mode)

    # -- basic queries ------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def support(self) -> list[Exponent]:
        return sorted(self.terms)

    def coefficient(self, exp: Sequence[int]) -> Coeff:
        return self.terms.get(tuple(exp), 0)

    def constant_term(self) -> Coeff:
        return self.coefficient((0,) * self.n)

    @property
    def is_laurent(self) -> bool:
        return any(x < 0 for e in self.terms for x in e)

    def ord(self) -> int:
        if not self.terms:
            raise DomainError("order of the zero polynomial")
        return min(sum(e) for e in self.terms)

    def deg(self) -> int:
        if not self.terms:
            raise DomainError("degree of the zero polynomial")
        return max(sum(e) for e in self.terms)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=0)

    def min_degree_in(self, i: int) -> int:
        return min((e[i] for e in self.terms), default=0)

    def variables(self) -> set[int]:
        return {i for e in self.terms for i, x in enumerate(e) if x}

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, complex)):
            other = SparsePoly.const(self.n, other, self.mode)
        if not isinstance(other, SparsePoly):
            return NotImplemented
        if self.n != other.n:
            return False
        if self.mode == EXACT and other.mode == EXACT:
            return self.terms == other.terms
        return (self - other).is_zero()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self.terms.items())))
        return self._hash

    def close_to(self, other: "SparsePoly", tol: float = 1e-7) -> bool:
        d = self.to_mode(APPROX) - other.to_mode(APPROX)
        return all(abs(c) <= tol for c in d.terms.values())

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "SparsePoly":
        if isinstance(other, SparsePoly):
            if other.n != self.n:
                raise DimensionError(f"{self.n}-variable vs {other.n}-variable polynomial")
            return other
        return SparsePoly.const(self.n, other, APPROX if isinstance(other, complex) else self.mode)

    def _mode_with(self, other: "SparsePoly") -> str:
        return APPROX if APPROX in (self.mode, other.mode) else EXACT

    def __add__(self, other) -> "SparsePoly":
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return SparsePoly(self.n, out, self._mode_with(other))

    __radd__ = __add__

    def __neg__(self) -> "SparsePoly":
        return self._new({e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "SparsePoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "SparsePoly":
        return self._coerce(other) - self

    def mul(self, other, tau: int | None = None) -> "SparsePoly":
        """Product, dropping total degree ``>= tau`` when given."""
        other = self._coerce(other)
        out: dict[Exponent, Coeff] = {}
        if tau is None:
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    e = tuple(a + b for a, b in zip(e1, e2))
                    out[e] = out.get(e, 0) + c1 * c2
        else:
            rhs = sorted(((sum(e), e, c) for e, c in other.terms.items()), key=lambda t: t[0])
            for e1, c1 in self.terms.items():
                room = tau - sum(e1)
                for d2, e2, c2 in rhs:
                    if d2 >= room:
                        break
                    e = tuple(a + b for a, b in zip(e1, e2))
                    out[e] = out.get(e, 0) + c1 * c2
        mode = self._mode_with(other)
        if mode == APPROX:
            out = {e: complex(c) for e, c in out.items()}
        return SparsePoly._raw(self.n, out, mode)

    def __mul__(self, other) -> "SparsePoly":
        return self.mul(other)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "SparsePoly":
        return self.power(k)

    def power(self, k: int, tau: int | None = None) -> "SparsePoly":
        if k < 0:
            raise DomainError("negative power of a polynomial")
        result = SparsePoly.one(self.n, self.mode)
        base = self
        while k:
            if k & 1:
                result = result.mul(base, tau)
            k >>= 1
            if k:
                base = base.mul(base, tau)
        return result

    def scale(self, c: Coeff) -> "SparsePoly":
        mode = APPROX if isinstance(c, complex) else self.mode
        return SparsePoly(self.n, {e: c * v for e, v in self.terms.items()}, mode)

    def truncate(self, tau: int) -> "SparsePoly":
        return self._new({e: c for e, c in self.terms.items() if sum(e) < tau})

    def to_mode(self, mode: str) -> "SparsePoly":
        if mode == self.mode:
            return self
        if mode == APPROX:
            return SparsePoly(self.n, {e: complex(c) for e, c in self.terms.items()}, APPROX)
        raise DomainError("cannot convert approximate coefficients to exact")

    def filter(self, keep: Callable[[Exponent], bool]) -> "SparsePoly":
        return self._new({e: c for e, c in self.terms.items() if keep(e)})

    def map_exponents(self, fn: Callable[[Exponent], Sequence[int]], n: int | None = None) -> "SparsePoly":
        out: dict[Exponent, Coeff] = {}
        for e, c in self.terms.items():
            e2 = tuple(fn(e))
            out[e2] = out.get(e2, 0) + c
        return self._new(out, n)

    def divide_monomial(self, exp: Sequence[int]) -> "SparsePoly":
        return self.map_exponents(lambda e: tuple(a - b for a, b in zip(e, exp)))

    def permute_vars(self, order: Sequence[int]) -> "SparsePoly":
        """Variable ``j`` of the result is variable ``order[j]`` of ``self``."""
        return self.map_exponents(lambda e: tuple(e[i] for i in order))

    def derivative(self, i: int) -> "SparsePoly":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                out[tuple(e2)] = c * e[i]
        return self._new(out)

    def coeff_in(self, i: int, k: int) -> "SparsePoly":
        """Coefficient of ``x_i^k``, as a polynomial with ``x_i`` absent."""
        out = {}
        for e, c in self.terms.items():
            if e[i] == k:
                e2 = list(e)
                e2[i] = 0
                out[tuple(e2)] = c
        return self._new(out)

    def eval(self, point: Sequence[Coeff]) -> Coeff:
        if len(point) != self.n:
            raise DimensionError("evaluation point has wrong length")
        total: Coeff = 0
        for e, c in self.terms.items():
            t = c
            for x, k in zip(point, e):
                if k > 0:
                    t = t * x**k
                elif k < 0:
                    t = t / x ** (-k) if isinstance(x, complex) else t * Fraction(1) / x ** (-k)
            total = total + t
        if isinstance(total, Fraction):
            return norm(total)
        return total

    def restrict(self, values: Mapping[int, Coeff]) -> "SparsePoly":
        """Substitute constants for some variables; their exponents become 0."""
        out: dict[Exponent, Coeff] = {}
        mode = self.mode
        for e, c in self.terms.items():
            t = c
            for i, v in values.items():
                k = e[i]
                if k:
                    if v == 0 and k > 0:
                        t = 0
                        break
                    t = t * (v**k)
            if isinstance(t, complex):
                mode = APPROX
            e2 = tuple(0 if i in values else x for i, x in enumerate(e))
            out[e2] = out.get(e2, 0) + t
        return SparsePoly(self.n, out, mode)

    def compose(self, subs: Sequence["SparsePoly"], tau: int | None = None) -> "SparsePoly":
        """``self(subs[0], ..., subs[n-1])``, truncated below ``tau`` when given."""
        if len(subs) != self.n:
            raise DimensionError("need one substitute per variable")
        m = subs[0].n if subs else self.n
        mode = self.mode
        for s in subs:
            if s.n != m:
                raise DimensionError("substitutes of different arity")
            if s.mode == APPROX:
                mode = APPROX
        identity = [
            m == self.n and s.mode == self.mode and s.terms == {tuple(int(j == i) for j in range(m)): 1}
            for i, s in enumerate(subs)
        ]
        moving = [i for i in range(self.n) if not identity[i]]
        cache: dict[tuple[int, int], SparsePoly] = {}

        def pw(i: int, k: int) -> SparsePoly:
            if (i, k) not in cache:
                cache[(i, k)] = subs[i].power(k, tau)
            return cache[(i, k)]

        # Group terms by their exponents on the substituted variables; the
        # identity variables ride along as a coefficient polynomial.
        groups: dict[tuple[int, ...], dict[Exponent, Coeff]] = {}
        for e, c in self.terms.items():
            if any(k < 0 for k in e):
                raise DomainError("cannot compose a Laurent polynomial")
            key = tuple(e[i] for i in moving)
            rest = tuple(0 if not identity[i] else x for i, x in enumerate(e))
            groups.setdefault(key, {})[rest] = c
        out: dict[Exponent, Coeff] = {}
        for key, coeffs in groups.items():
            t = SparsePoly._raw(m, coeffs, mode)
            for i, k in zip(moving, key):
                if k:
                    t = t.mul(pw(i, k), tau)
            for e, c in t.terms.items():
                if tau is None or sum(e) < tau:
                    out[e] = out.get(e, 0) + c
        return SparsePoly(m, out, mode)

    # -- text and JSON ------------------------------------------------------

    def sorted_terms(self) -> list[tuple[Exponent, Coeff]]:
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), tuple(-x for x in t[0])))

    def to_text(self, name: str = "x") -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(f"{name}{i + 1}" + (f"^{k}" if k != 1 else "") for i, k in enumerate(e) if k)
            sign, mag = _split_sign(c, self.mode)
            if mono:
                body = mono if mag == "1" else f"{mag}*{mono}"
            else:
                body = mag
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign < 0 else "") + first
        for sign, body in parts[1:]:
            out += (" - " if sign < 0 else " + ") + body
        return out

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"SparsePoly({self.n}, {self.to_text()!r}, {self.mode})"

    @classmethod
    def parse(cls, text: str, n: int | None = None, mode: str = EXACT) -> "SparsePoly":
        return parse_poly(text, n, mode)

    def to_json(self) -> dict:
        terms = []
        for e, c in self.sorted_terms():
            if self.mode == EXACT:
                terms.append({"c": format_rat(c), "e": list(e)})
            else:
                terms.append({"c": [c.real, c.imag], "e": list(e)})
        return {"n": self.n, "mode": self.mode, "terms": terms}

    @classmethod
    def from_json(cls, data: Mapping) -> "SparsePoly":
        mode = data.get("mode", EXACT)
        terms: dict[Exponent, Coeff] = {}
        for t in data["terms"]:
            c = t["c"]
            if mode == EXACT:
                val: Coeff = norm(Fraction(c))
            else:
                val = complex(c[0], c[1]) if isinstance(c, list) else complex(c)
            e = tuple(t["e"])
            terms[e] = terms.get(e, 0) + val
        return cls(int(data["n"]), terms, mode)


def _split_sign(c: Coeff, mode: str) -> tuple[int, str]:
    if mode == EXACT:
        return (-1 if c < 0 else 1), format_rat(abs(c))
    c = complex(c)
    if c.imag == 0:
        return (-1 if c.real < 0 else 1), repr(abs(c.real))
    return 1, f"({c.real!r}{'+' if c.imag >= 0 else '-'}{abs(c.imag)!r}j)"


_TOKEN = re.compile(
    r"\s*(?:(?P<op>[+-])|(?P<cplx>\([^)]*\))|(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?(?:/\d+)?)"
    r"|(?P<var>[A-Za-z]+)(?P<idx>\d+)(?:\^(?P<pow>-?\d+))?|(?P<star>\*))"
)


def parse_poly(text: str, n: int | None = None, mode: str = EXACT) -> SparsePoly:
    """Parse signed terms such as ``3/2 x1^2 x2 - x1*x3``."""
    pos = 0
    terms: list[tuple[int, Coeff, dict[int, int]]] = []
    sign = 1
    coeff: Coeff | None = None
    mono: dict[int, int] = {}
    started = False
    text = text.strip()
    if not text:
        raise DomainError("empty polynomial text")

    def flush():
        nonlocal coeff, mono, started
        if started:
            terms.append((sign, 1 if coeff is None else coeff, mono))
        coeff, mono, started = None, {}, False

    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise DomainError(f"cannot parse polynomial near {text[pos:pos + 12]!r}")
        pos = m.end()
        if m.group("op"):
            if started:
                flush()
                sign = 1 if m.group("op") == "+" else -1
            else:
                sign *= 1 if m.group("op") == "+" else -1
        elif m.group("num") or m.group("cplx"):
            raw = m.group("num") or m.group("cplx")
            val = _parse_number(raw, mode)
            coeff = val if coeff is None else coeff * val
            started = True
        elif m.group("var"):
            i = int(m.group("idx")) - 1
            if i < 0:
                raise DomainError("variable indices start at 1")
            k = int(m.group("pow")) if m.group("pow") else 1
            mono[i] = mono.get(i, 0) + k
            started = True
        elif m.group("star"):
            if not started:
                raise DomainError("dangling '*' in polynomial text")
    if not started:
        raise DomainError("polynomial text ends with an operator")
    flush()
    top = max((i + 1 for _, _, mm in terms for i in mm), default=1)
    if n is None:
        n = top
    elif top > n:
        raise DimensionError(f"variable x{top} in a {n}-variable polynomial")
    out: dict[Exponent, Coeff] = {}
    for s, c, mm in terms:
        e = tuple(mm.get(i, 0) for i in range(n))
        out[e] = out.get(e, 0) + s * c
    return SparsePoly(n, out, mode)


def _parse_number(raw: str, mode: str) -> Coeff:
    if raw.startswith("("):
        if mode == EXACT:
            raise DomainError("complex coefficient in exact mode")
        return complex(raw.replace(" ", ""))
    if mode == EXACT:
        if "." in raw or "e" in raw.lower():
            raise DomainError(f"decimal coefficient {raw!r} in exact mode; write p/q")
        return norm(Fraction(raw))
    if "/" in raw:
        return complex(float(Fraction(raw)))
    return complex(float(raw))


# ----------------------------------------------------------------------------
# Dominance.


def dominates(beta: Sequence[int], alpha: Sequence[int], variant: str = "plain", exceptional: Iterable[int] = ()) -> bool:
    """Dominance relations between exponent vectors.

    ``plain``: beta - alpha in N^n. ``strict``: every component of the
    difference is positive. ``exceptional``: strict on the exceptional
    indices. ``non_exceptional``: equal on the exceptional indices and
    strict on the rest.
    """
    if len(beta) != len(alpha):
        raise DimensionError("exponent length mismatch")
    diff = [b - a for b, a in zip(beta, alpha)]
    ex = set(exceptional)
    rest = [i for i in range(len(diff)) if i not in ex]
    if variant == "plain":
        return all(x >= 0 for x in diff)
    if variant == "strict":
        return all(x > 0 for x in diff)
    if variant == "exceptional":
        return all(diff[i] > 0 for i in ex)
    if variant == "non_exceptional":
        return all(diff[i] == 0 for i in ex) and all(diff[i] > 0 for i in rest)
    raise DomainError(f"unknown dominance variant {variant!r}")


# ----------------------------------------------------------------------------
# Monomial transformations and their factorizations.


def transform_exponent(alpha: Sequence[int], m: Matrix) -> Exponent:
    img = m.apply_row(alpha)
    out = []
    for x in img:
        if isinstance(x, Fraction):
            raise IncompatibleExponentError(f"exponent {tuple(alpha)} maps to non-integral {img}")
        out.append(int(x))
    return tuple(out)


def monomial_transform(f: SparsePoly, m: Matrix) -> SparsePoly:
    """Substitute ``x_i = Y^(row i of m)``; exponent ``alpha`` becomes ``alpha . m``."""
    if m.shape != (f.n, f.n):
        raise DimensionError(f"{m.shape} matrix on a {f.n}-variable polynomial")
    return f.map_exponents(lambda e: transform_exponent(e, m))


def partial_factorize(total: SparsePoly, a: Sequence[int], m: Matrix, exceptional: Sequence[int]) -> tuple[Exponent, SparsePoly]:
    """Split off ``Y_0^(a . m restricted to the exceptional columns)``."""
    img = transform_exponent(a, m)
    ex = sorted(exceptional)
    gamma = tuple(img[j] for j in ex)
    for e in total.terms:
        for j, g in zip(ex, gamma):
            if e[j] < g:
                raise ChartMismatchError(f"term {e} lies below the chart vertex on column {j + 1}")
    shift = [0] * total.n
    for j, g in zip(ex, gamma):
        shift[j] = g
    return gamma, total.divide_monomial(shift)


def exceptional_support(w: SparsePoly, m: Matrix, exceptional: Sequence[int]) -> list[Exponent]:
    """Support points lying on the face cut out by every exceptional column."""
    pts = w.support()
    for j in exceptional:
        col = m.col(j)
        low = min(sum(a * b for a, b in zip(p, col)) for p in pts)
        pts = [p for p in pts if sum(a * b for a, b in zip(p, col)) == low]
    return pts


def proper_transform(p: SparsePoly, exceptional: Sequence[int]) -> SparsePoly:
    """Set the exceptional variables to zero."""
    ex = list(exceptional)
    return p.filter(lambda e: all(e[j] == 0 for j in ex))


def localize(f: SparsePoly, point: Mapping[int, Coeff], tau: int | None = None) -> SparsePoly:
    """Exact Taylor shift ``x_i -> x_i + r_i`` for the assigned variables.

    With ``tau`` the result is truncated below total degree ``tau``; terms that
    cannot drop below it are pruned before shifting.
    """
    for i, r in point.items():
        if r == 0:
            raise PreconditionError(f"branch coordinate {i + 1} is zero")
    mode = f.mode
    if any(isinstance(r, complex) for r in point.values()):
        mode = APPROX
    pending = set(point)

    def settled(e: Exponent) -> int:
        return sum(x for t, x in enumerate(e) if t not in pending)

    current: dict[Exponent, Coeff] = dict(f.terms)
    if tau is not None:
        current = {e: c for e, c in current.items() if settled(e) < tau}
    for i, r in sorted(point.items()):
        pending.discard(i)
        nxt: dict[Exponent, Coeff] = {}
        for e, c in current.items():
            k = e[i]
            if k < 0:
                raise DomainError("cannot shift a variable with a negative exponent")
            base = settled(e) - k
            for j in range(k + 1):
                if tau is not None and base + j >= tau:
                    break
                e2 = e[:i] + (j,) + e[i + 1 :]
                nxt[e2] = nxt.get(e2, 0) + c * math.comb(k, j) * r ** (k - j)
        current = nxt
    return SparsePoly(f.n, current, mode)


# ----------------------------------------------------------------------------
# Univariate roots.


@dataclass(frozen=True)
class BranchPoint:
    """Nonzero point on an exceptional branch where the proper transform vanishes."""

    coords: tuple[Coeff, ...]
    exceptional: tuple[int, ...] = ()
    chart: int | None = None
    multiplicity: int = 1

    def to_json(self) -> dict:
        return {
            "chart": self.chart,
            "exceptional": [j + 1 for j in self.exceptional],
            "coords": [coeff_to_json(c) for c in self.coords],
            "multiplicity": self.multiplicity,
        }


def coeff_to_json(c: Coeff):
    if isinstance(c, complex):
        return [c.real, c.imag]
    return format_rat(c)


@dataclass(frozen=True)
class RootReport:
    points: tuple[BranchPoint, ...]
    algebraic_roots: bool

    @property
    def roots(self) -> list[Coeff]:
        return [p.coords[0] for p in self.points]


def univariate_coefficients(p: SparsePoly, var: int | None = None) -> tuple[int, list[Coeff]]:
    """Variable index and ascending coefficient list of a univariate polynomial."""
    if p.is_zero():
        raise DomainError("zero polynomial has no finite root set")
    vs = p.variables()
    if var is None:
        if len(vs) > 1:
            raise DomainError(f"polynomial in variables {sorted(i + 1 for i in vs)} is not univariate")
        var = next(iter(vs)) if vs else 0
    elif vs - {var}:
        raise DomainError("polynomial depends on other variables")
    if p.is_laurent:
        raise DomainError("Laurent polynomial passed to root finder")
    deg = p.degree_in(var)
    coeffs: list[Coeff] = [0] * (deg + 1)
    for e, c in p.terms.items():
        coeffs[e[var]] = c
    return var, coeffs


def _strip_zero_roots(coeffs: Sequence[Coeff]) -> list[Coeff]:
    k = 0
    while k < len(coeffs) and coeffs[k] == 0:
        k += 1
    return list(coeffs[k:])


def exact_nonzero_roots(coeffs: Sequence[Coeff]) -> tuple[list[tuple[Fraction, int]], bool]:
    """Nonzero rational roots with multiplicity and whether irrational roots exist."""
    import sympy

    c = _strip_zero_roots(coeffs)
    if len(c) <= 1:
        return [], False
    x = sympy.Symbol("x")
    poly = sympy.Poly([sympy.Rational(Fraction(v).numerator, Fraction(v).denominator) for v in reversed(c)], x, domain="QQ")
    _, factors = poly.factor_list()
    roots = []
    algebraic = False
    for fac, mult in factors:
        if fac.degree() == 1:
            a, b = fac.all_coeffs()
            r = -Fraction(int(b.p), int(b.q)) / Fraction(int(a.p), int(a.q))
            roots.append((norm(r), mult))
        elif fac.degree() > 1:
            algebraic = True
    roots.sort()
    return roots, algebraic


def approx_nonzero_roots(coeffs: Sequence[Coeff], cluster: float = 1e-4) -> list[tuple[complex, int]]:
    """Nonzero complex roots via the companion matrix, clustered by proximity."""
    import numpy as np

    c = [complex(v) for v in coeffs]
    while c and abs(c[0]) < TOLERANCE:
        c.pop(0)
    while c and abs(c[-1]) < TOLERANCE:
        c.pop()
    if len(c) <= 1:
        return []
    raw = [complex(r) for r in np.roots(list(reversed(c)))]
    raw = [r for r in raw if abs(r) > TOLERANCE]
    scale = max(1.0, max((abs(r) for r in raw), default=1.0))
    groups: list[list[complex]] = []
    for r in raw:
        for g in groups:
            if abs(g[0] - r) <= cluster * scale:
                g.append(r)
                break
        else:
            groups.append([r])
    out = []
    for g in groups:
        centre = sum(g) / len(g)
        out.append((_tidy(centre), len(g)))
    out.sort(key=lambda t: (round(t[0].real, 9), round(t[0].imag, 9)))
    return out


def _tidy(z: complex) -> complex:
    re_, im = z.real, z.imag
    if abs(re_) < TOLERANCE:
        re_ = 0.0
    if abs(im) < TOLERANCE:
        im = 0.0
    return complex(re_, im)


def branch_points_univariate(p: SparsePoly, var: int | None = None, chart: int | None = None,
                             exceptional: Sequence[int] = ()) -> RootReport:
    """Nonzero roots of a univariate proper transform."""
    var, coeffs = univariate_coefficients(p, var)
    if p.mode == EXACT:
        roots, algebraic = exact_nonzero_roots(coeffs)
    else:
        roots, algebraic = approx_nonzero_roots(coeffs), False
    pts = tuple(BranchPoint((r,), tuple(exceptional), chart, m) for r, m in roots)
    return RootReport(pts, algebraic)


def max_nonzero_root_multiplicity(coeffs: Sequence[Coeff]) -> int:
    """Largest multiplicity of a nonzero root, from gcds with successive derivatives.

    Returns 0 when there is no nonzero root over the algebraic closure.
    """
    import sympy

    c = _strip_zero_roots(coeffs)
    if len(c) <= 1:
        return 0
    x = sympy.Symbol("x")
    p = sympy.Poly([sympy.Rational(Fraction(v).numerator, Fraction(v).denominator) for v in reversed(c)], x, domain="QQ")
    g = p
    d = p
    k = 0
    while g.degree() > 0:
        k += 1
        d = d.diff(x)
        g = sympy.gcd(g, d)
    return k
