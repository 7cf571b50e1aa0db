"""Apex forms and Weierstrass forms to a finite truncation order.

A polynomial of order ``d`` is first sheared so the primary variable carries
a nonzero ``x_p^d`` term, then split as ``w * unit`` with ``w`` monic of
degree ``d`` in ``x_p``, and finally shifted to remove the ``x_p^(d-1)`` term.
All identities hold exactly modulo total degree ``tau``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import DomainError, ParameterError, PreconditionError, SearchExhaustedError
from .series import APPROX, SparsePoly


@dataclass(frozen=True)
class ApexForm:
    poly: SparsePoly
    source: SparsePoly
    primary: int
    height: int
    shear: tuple[int, ...]

    @property
    def apex(self) -> tuple[int, ...]:
        return tuple(self.height if i == self.primary else 0 for i in range(self.poly.n))

    def to_json(self) -> dict:
        return {
            "poly": self.poly.to_json(),
            "primary": self.primary + 1,
            "height": self.height,
            "apex": list(self.apex),
            "shear": list(self.shear),
        }


@dataclass(frozen=True)
class TruncatedSeries:
    poly: SparsePoly
    tau: int

    @property
    def constant(self):
        return self.poly.constant_term()

    @property
    def remainder(self) -> SparsePoly:
        return self.poly - self.constant

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        tau = min(self.tau, other.tau)
        return TruncatedSeries(self.poly.mul(other.poly, tau), tau)


@dataclass(frozen=True)
class WeierstrassForm:
    w: SparsePoly
    unit: SparsePoly
    tau: int
    height: int
    primary: int
    source: SparsePoly
    shift: SparsePoly | None = None

    @property
    def unit_series(self) -> TruncatedSeries:
        return TruncatedSeries(self.unit, self.tau)

    def residual(self) -> SparsePoly:
        """``source - w * unit`` modulo total degree ``tau``."""
        return self.source.truncate(self.tau) - self.w.mul(self.unit, self.tau)

    def multiply_back_ok(self, tol: float = 1e-7) -> bool:
        r = self.residual()
        if r.mode == APPROX:
            scale = max([1.0] + [abs(c) for c in self.source.terms.values()] + [abs(c) for c in self.w.terms.values()])
            return all(abs(c) <= tol * scale for c in r.terms.values())
        return r.is_zero()

    def coefficient_polys(self) -> list[SparsePoly]:
        """``c_j`` in ``w = x_p^d + sum_j c_j x_p^(d-j)``; index 0 is the leading 1."""
        return [self.w.coeff_in(self.primary, self.height - j) for j in range(self.height + 1)]

    def to_json(self) -> dict:
        return {
            "w": self.w.to_json(),
            "unit": self.unit.to_json(),
            "tau": self.tau,
            "height": self.height,
            "primary": self.primary + 1,
            "shift": None if self.shift is None else self.shift.to_json(),
        }


def shear_vectors(count: int, limit: int) -> Iterator[tuple[int, ...]]:
    """Integer vectors by increasing L1 norm, positives first within a norm."""
    if count == 0:
        yield ()
        return
    for s in range(limit + 1):
        layer = [t for t in itertools.product(range(-s, s + 1), repeat=count) if sum(map(abs, t)) == s]
        layer.sort(key=lambda t: tuple(-x for x in t))
        yield from layer


def shear(f: SparsePoly, primary: int, t: Sequence[int], active: Sequence[int] | None = None) -> SparsePoly:
    """Substitute ``x_j -> x_j + t_j x_p`` for the other active variables."""
    n = f.n
    act = list(range(n)) if active is None else list(active)
    others = [j for j in act if j != primary]
    subs = [SparsePoly.var(n, i, f.mode) for i in range(n)]
    xp = SparsePoly.var(n, primary, f.mode)
    for j, tj in zip(others, t):
        if tj:
            subs[j] = subs[j] + xp.scale(tj)
    return f.compose(subs)


def _active_degree(e: Sequence[int], active: Sequence[int]) -> int:
    return sum(e[i] for i in active)


def preliminary_reduction(f: SparsePoly, primary: int = 0, active: Sequence[int] | None = None) -> ApexForm:
    """Shear until the ``x_p^d`` coefficient is nonzero, ``d`` the order of ``f``.

    With ``active`` given, order and apex refer to those variables only and the
    apex coefficient may be a nonzero polynomial in the remaining ones.
    """
    if f.is_zero():
        raise DomainError("zero polynomial has no apex form")
    act = list(range(f.n)) if active is None else sorted(active)
    if primary not in act:
        raise PreconditionError("primary variable must be active")
    d = min(_active_degree(e, act) for e in f.terms)
    if d < 1:
        raise PreconditionError("apex form needs order at least 1")
    lowest = {e: c for e, c in f.terms.items() if _active_degree(e, act) == d}
    others = [j for j in act if j != primary]
    latent = [j for j in range(f.n) if j not in act]
    limit = d * max(1, len(others)) + 1
    for t in shear_vectors(len(others), limit):
        weights = dict(zip(others, t))
        coeff: dict[tuple, object] = {}
        for e, c in lowest.items():
            v = c
            for j in others:
                if e[j]:
                    v = v * weights[j] ** e[j]
            key = tuple(e[j] for j in latent)
            coeff[key] = coeff.get(key, 0) + v
        if any(abs(v) > 1e-9 if isinstance(v, complex) else v != 0 for v in coeff.values()):
            g = shear(f, primary, t, act) if any(t) else f
            return ApexForm(poly=g, source=f, primary=primary, height=d, shear=tuple(t))
    raise SearchExhaustedError(f"no shear up to norm {limit} produces an apex")


def default_tau(a: ApexForm) -> int:
    return max(4 * a.height, 2 * a.poly.deg())


def series_inverse(u: SparsePoly, tau: int) -> SparsePoly:
    """Inverse of a unit modulo total degree ``tau``."""
    c = u.constant_term()
    if c == 0:
        raise DomainError("series with zero constant term is not a unit")
    inv_c = (1 / c) if isinstance(c, complex) else Fraction(1) / Fraction(c)
    nil = (u.scale(inv_c) - 1).truncate(tau)
    total = SparsePoly.one(u.n, u.mode)
    term = SparsePoly.one(u.n, u.mode)
    for _ in range(tau):
        term = (-term).mul(nil, tau)
        if term.is_zero():
            break
        total = total + term
    return total.scale(inv_c)


def weierstrass_prepare(a: ApexForm, tau: int | None = None) -> WeierstrassForm:
    """Split ``a.poly = w * unit`` modulo total degree ``tau``."""
    d, p = a.height, a.primary
    tau = default_tau(a) if tau is None else tau
    if tau < 2 * d:
        raise ParameterError(f"truncation order {tau} is below 2d = {2 * d}")
    f = a.poly
    n = f.n
    hi = {}
    lo = {}
    for e, c in f.terms.items():
        if e[p] >= d:
            e2 = list(e)
            e2[p] -= d
            hi[tuple(e2)] = c
        else:
            lo[e] = c
    big_q = SparsePoly(n, hi, f.mode)
    small_p = SparsePoly(n, lo, f.mode)
    if big_q.constant_term() == 0:
        raise PreconditionError("apex coefficient vanishes")
    if len(big_q) == 1:
        c = big_q.constant_term()
        if c == 1:
            return WeierstrassForm(f, SparsePoly.one(n, f.mode), tau, d, p, f)
        inv = (1 / c) if isinstance(c, complex) else Fraction(1) / Fraction(c)
        return WeierstrassForm(f.scale(inv), SparsePoly.const(n, c, f.mode), tau, d, p, f)
    source = f.truncate(tau)
    q_inv = series_inverse(big_q, tau)
    h = small_p.mul(q_inv, tau)
    xd = SparsePoly.monomial(tuple(d if i == p else 0 for i in range(n)), 1, f.mode)
    g = xd
    quot = SparsePoly.zero(n, f.mode)
    rem = SparsePoly.zero(n, f.mode)
    for _ in range(tau + 1):
        if g.is_zero():
            break
        g_hi = {}
        g_lo = {}
        for e, c in g.terms.items():
            if e[p] >= d:
                e2 = list(e)
                e2[p] -= d
                g_hi[tuple(e2)] = c
            else:
                g_lo[e] = c
        part = SparsePoly(n, g_hi, f.mode)
        quot = quot + part
        rem = rem + SparsePoly(n, g_lo, f.mode)
        g = (-part).mul(h, tau)
    else:
        raise SearchExhaustedError("Weierstrass division did not stabilize")
    w = (xd - rem).truncate(tau)
    unit = big_q.mul(series_inverse(quot, tau), tau)
    return WeierstrassForm(w, unit, tau, d, p, source)


def complete_power(wf: WeierstrassForm) -> WeierstrassForm:
    """Remove the ``x_p^(d-1)`` term by ``x_p -> x_p - c_1 / d``."""
    d, p, tau = wf.height, wf.primary, wf.tau
    c1 = wf.w.coeff_in(p, d - 1)
    if c1.is_zero():
        return wf
    n = wf.w.n
    s = c1.scale(Fraction(-1, d) if c1.mode != APPROX else -1.0 / d)
    subs = [SparsePoly.var(n, i, wf.w.mode) for i in range(n)]
    subs[p] = subs[p] + s
    # The shifted x_p^(d-1) coefficient vanishes identically; drop float residue.
    w2 = wf.w.compose(subs, tau).filter(lambda e: e[p] != d - 1)
    unit2 = wf.unit.compose(subs, tau)
    src2 = wf.source.compose(subs, tau)
    return WeierstrassForm(w2, unit2, tau, d, p, src2, s)


def weierstrass_reduce(f: SparsePoly, tau: int | None = None, primary: int = 0) -> tuple[ApexForm, WeierstrassForm]:
    """Shear, prepare and complete in one call."""
    a = preliminary_reduction(f, primary)
    wf = complete_power(weierstrass_prepare(a, tau))
    return a, wf
