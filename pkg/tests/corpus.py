"""Shared inputs for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

from singres.arith import Matrix
from singres.series import SparsePoly, parse_poly

CURVES = [
    "x1^2 + x2^3",
    "x1^3 + x2^4",
    "x1^2 - x2^5",
    "x1^3 + x2^5",
    "x1^2*x2 + x2^4",
    "x1^2 + x1*x2^2 + x2^5",
]

SURFACES = [
    "x1^2 + x2^3 + x3^4",
    "x1^2 + x2^2*x3^2",
    "x1^2*x2 + x2^4 + x3^3",
    "x1^2 + x2*x3",
    "x1^3 - x1*x2^2 + x3^5",
    "x1^2 + x1*x2^5*x3^2 + x2^4*x3^5",
    "x1^2 + x2*x3^5 + x2^4*x3^3 + x1*x2^3*x3^5",
]

# Germs whose exact-mode trees are cheap and contain canonical reductions.
EXACT_TREES = [
    ("x1^2 + x2^3", 2),
    ("x1^3 + x2^4", 2),
    ("x1^2 - x2^5", 2),
    ("x1^2 + x1*x2^2 + x2^5", 2),
    ("x1^2 + x2^3 + x3^4", 3),
    ("x1^2*x2 + x2^4 + x3^3", 3),
    ("x1^2 + x2*x3", 3),
    ("x1^3 - x1*x2^2 + x3^5", 3),
]

# Germs that need complex branch points.
APPROX_TREES = [
    ("x1^2 + x2^2 + x3^2", 3),
    ("x1^2 + x2^2", 2),
    ("x1^2 + x2^2*x3^2", 3),
]


# Verdict lines filled in by the acceptance tests, printed at session end.
ACCEPTANCE: list[str] = []


def report(label: str, ok: bool, detail: str) -> None:
    line = f"{label} {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE.append(line)
    print(line)
    assert ok, line


def poly(text: str, n: int | None = None, mode: str = "exact") -> SparsePoly:
    return parse_poly(text, n, mode)


def random_supports(count: int, seed: int = 0, dims=(2, 3), max_points: int = 6, max_exp: int = 8):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.choice(dims)
        k = rng.randint(1, max_points)
        out.append([tuple(rng.randint(0, max_exp) for _ in range(n)) for _ in range(k)])
    return out


def random_unimodular(n: int, rng: random.Random, steps: int = 12) -> Matrix:
    """Product of random elementary integer operations; determinant exactly 1."""
    rows = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j:
            continue
        t = rng.choice((-2, -1, 1, 2))
        rows[i] = [a + t * b for a, b in zip(rows[i], rows[j])]
    return Matrix.of(rows)


def random_poly(n: int, rng: random.Random, terms: int = 4, max_exp: int = 4, min_order: int = 1) -> SparsePoly:
    out = {}
    while len(out) < terms:
        e = tuple(rng.randint(0, max_exp) for _ in range(n))
        if sum(e) >= min_order:
            out[e] = Fraction(rng.choice((-3, -2, -1, 1, 2, 3)), rng.choice((1, 1, 2)))
    return SparsePoly(n, out)
