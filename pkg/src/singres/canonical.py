"""Canonical reduction of exponential matrices.

Given an exponential matrix ``M`` and an exceptional column set ``I0``, the
columns are reordered as (non-exceptional, exceptional) and the rows as
(primary, rest) so that the lower-right block ``D`` is non-degenerate. The
reduced matrix is ``N = [E B; O D]`` and the reduction matrix is
``F = det(D) A - B adj(D) C``.

When the primary row cannot stay in the upper block, the primary variable is
inconsistent and :class:`InconsistentForm` describes the alternative layout
with the primary row last, together with its interim decomposition.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .arith import Matrix, adjugate, det, inverse, rank
from .errors import (
    DimensionError,
    DomainError,
    InvariantViolation,
    PreconditionError,
    SingresError,
    StructuralError,
)
from .series import SparsePoly, monomial_transform, proper_transform


def _block(rows_of_blocks: Sequence[Sequence[Matrix]]) -> Matrix:
    """Assemble a block matrix; empty blocks are allowed."""
    out = []
    for band in rows_of_blocks:
        h = max(b.nrows for b in band)
        for i in range(h):
            row = []
            for b in band:
                if b.nrows:
                    row.extend(b.rows[i])
            out.append(row)
    return Matrix.of(out)


def _zeros(r: int, c: int) -> Matrix:
    return Matrix(tuple(tuple(0 for _ in range(c)) for _ in range(r)))


def _eye(k: int) -> Matrix:
    return Matrix.identity(k) if k else _zeros(0, 0)


def _sub(m: Matrix, rows: Sequence[int], cols: Sequence[int]) -> Matrix:
    if not rows:
        return Matrix(())
    return Matrix(tuple(tuple(m.rows[i][j] for j in cols) for i in rows))


def _det(m: Matrix) -> object:
    return 1 if m.nrows == 0 else det(m)


@dataclass(frozen=True)
class ExceptionalIndexSet:
    n: int
    indices: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(j < 0 or j >= self.n for j in self.indices) or len(set(self.indices)) != len(self.indices):
            raise DomainError(f"bad exceptional indices {self.indices} for n={self.n}")

    @property
    def k(self) -> int:
        return self.n - len(self.indices)

    @property
    def non_exceptional(self) -> tuple[int, ...]:
        return tuple(j for j in range(self.n) if j not in self.indices)

    @property
    def column_order(self) -> tuple[int, ...]:
        """Permutation bringing the exceptional columns last."""
        return self.non_exceptional + tuple(sorted(self.indices))


def admissible_exceptional_sets(m: Matrix, proper_only: bool = True) -> list[tuple[int, ...]]:
    """Exceptional sets whose vanishing sends every ``x_i`` to zero.

    Every row of ``m`` needs a nonzero entry in the chosen columns. With
    ``proper_only`` the full column set (a single point) is excluded.
    """
    n = m.ncols
    out = []
    for size in range(1, n + (0 if proper_only else 1)):
        for sub in itertools.combinations(range(n), size):
            if all(any(m.rows[i][j] != 0 for j in sub) for i in range(m.nrows)):
                out.append(sub)
    return out


def is_consistent(m: Matrix, exceptional: Sequence[int], primary_row: int = 0) -> bool:
    """Full rank of the exceptional columns once the primary row is dropped."""
    ex = sorted(exceptional)
    rest = [i for i in range(m.nrows) if i != primary_row]
    if not ex:
        return True
    return rank(_sub(m, rest, ex)) == len(ex)


class Inconsistent(SingresError):
    """Signal carrying the inconsistent canonical form."""

    def __init__(self, form: "InconsistentForm"):
        super().__init__("primary variable is inconsistent with the exceptional set")
        self.form = form


@dataclass(frozen=True)
class CanonicalReduction:
    source: Matrix
    exceptional: tuple[int, ...]
    primary_row: int
    row_order: tuple[int, ...]
    col_order: tuple[int, ...]
    permuted: Matrix
    A: Matrix
    B: Matrix
    C: Matrix
    D: Matrix
    N: Matrix
    det_D: int
    F: Matrix

    @property
    def n(self) -> int:
        return self.source.nrows

    @property
    def k(self) -> int:
        return self.n - len(self.exceptional)

    @property
    def exceptional_positions(self) -> tuple[int, ...]:
        return tuple(range(self.k, self.n))

    def to_json(self) -> dict:
        return {
            "source": self.source.to_json(),
            "exceptional": [j + 1 for j in self.exceptional],
            "row_order": [i + 1 for i in self.row_order],
            "col_order": [j + 1 for j in self.col_order],
            "N": self.N.to_json(),
            "det_D": self.det_D,
            "F": self.F.to_json(),
            "blocks": {"A": self.A.to_json(), "B": self.B.to_json(), "C": self.C.to_json(), "D": self.D.to_json()},
        }

    def permute_poly(self, f: SparsePoly) -> SparsePoly:
        """Rename ``x`` so row ``i`` of :attr:`N` belongs to variable ``i``."""
        return f.permute_vars(self.row_order)

    def transform(self, f: SparsePoly) -> SparsePoly:
        return monomial_transform(self.permute_poly(f), self.N)


def reduction_matrix(A: Matrix, B: Matrix, C: Matrix, D: Matrix) -> Matrix:
    k = A.nrows
    if k == 0:
        return Matrix(())
    dd = _det(D)
    if D.nrows == 0:
        return A.scale(dd)
    return A.scale(dd) - B @ adjugate(D) @ C


def _blocks(mp: Matrix, k: int) -> tuple[Matrix, Matrix, Matrix, Matrix]:
    n = mp.nrows
    top, bot = list(range(k)), list(range(k, n))
    return _sub(mp, top, top), _sub(mp, top, bot), _sub(mp, bot, top), _sub(mp, bot, bot)


def canonical_reduce(m: Matrix, exceptional: Sequence[int], primary_row: int = 0) -> CanonicalReduction:
    """Canonical reduction of ``m`` for the exceptional columns.

    Raises :class:`Inconsistent` carrying an :class:`InconsistentForm` when the
    primary row cannot remain among the non-exceptional rows.
    """
    if not m.is_square():
        raise DimensionError("exponential matrix must be square")
    n = m.nrows
    eis = ExceptionalIndexSet(n, tuple(sorted(exceptional)))
    k = eis.k
    cols = eis.column_order
    if k >= 1 and not is_consistent(m, eis.indices, primary_row):
        raise Inconsistent(inconsistent_form(m, eis.indices, primary_row))
    rest = [i for i in range(n) if i != primary_row]
    candidates = (
        itertools.permutations(range(n))
        if k == 0
        else ((primary_row,) + p for p in itertools.permutations(rest))
    )
    for order in candidates:
        mp = m.permute_rows(order).permute_cols(cols)
        A, B, C, D = _blocks(mp, k)
        if _det(D) != 0:
            break
    else:
        raise StructuralError("no row order makes the exceptional block non-degenerate")
    N = _block([[_eye(k), B], [_zeros(n - k, k), D]]) if k else D
    dd = _det(D)
    F = reduction_matrix(A, B, C, D)
    cr = CanonicalReduction(m, eis.indices, primary_row, tuple(order), cols, mp, A, B, C, D, N, dd, F)
    if not verify_reduction_identity(cr):
        raise InvariantViolation("reduction identity failed")
    return cr


def verify_reduction_identity(cr: CanonicalReduction) -> bool:
    """Check ``det(D) * (N^-1 M)`` restricted to the first ``k`` rows equals ``[F | 0]``.

    Row ``i`` of ``N^-1 M`` is the ``y``-exponent of ``z_i``, so this is the
    exponent form of ``z_*^(det D) = y_*^F``.
    """
    k = cr.k
    if k == 0:
        return True
    if _det(cr.N) == 0:
        return False
    rel = inverse(cr.N) @ cr.permuted
    lhs = _sub(rel, list(range(k)), list(range(cr.n))).scale(cr.det_D)
    rhs = _block([[cr.F, _zeros(k, cr.n - k)]])
    if lhs != rhs:
        return False
    direct = reduction_matrix(cr.A, cr.B, cr.C, cr.D)
    return direct == cr.F


# ----------------------------------------------------------------------------
# Deficiency.


@dataclass(frozen=True)
class DeficiencyInfo:
    rows: tuple[int, ...]
    support: tuple[tuple[int, ...], ...]
    function: SparsePoly | None
    identity_ok: bool

    @property
    def deficient(self) -> bool:
        return bool(self.rows)


def deficient_rows(cr: CanonicalReduction) -> tuple[int, ...]:
    """Original variable indices whose rows vanish on the exceptional columns."""
    out = []
    for i in range(cr.n):
        if all(x == 0 for x in cr.N.rows[i][cr.k :]):
            out.append(cr.row_order[i])
    return tuple(sorted(out))


def deficiency(cr: CanonicalReduction, redundant: SparsePoly | None = None) -> DeficiencyInfo:
    rows = deficient_rows(cr)
    if redundant is None:
        return DeficiencyInfo(rows, (), None, True)
    allowed = set(rows)
    supp = tuple(e for e in redundant.support() if {i for i, x in enumerate(e) if x} <= allowed)
    func = redundant.filter(lambda e: {i for i, x in enumerate(e) if x} <= allowed)
    lhs = proper_transform(cr.transform(redundant), cr.exceptional_positions)
    ok = lhs == cr.permute_poly(func)
    return DeficiencyInfo(rows, supp, func, ok)


# ----------------------------------------------------------------------------
# Inconsistent forms.


@dataclass(frozen=True)
class InconsistentForm:
    """Layout with the primary row last.

    Rows are (upper rows, upper pivot row, basis rows, primary); columns are
    (non-exceptional, pivot exceptional column, remaining exceptional). The
    exceptional part of the upper rows equals ``[Omega; Lambda] [D l, D]`` and
    the primary row carries ``primary_vector`` on the exceptional columns.
    """

    source: Matrix
    exceptional: tuple[int, ...]
    primary_row: int
    row_order: tuple[int, ...]
    col_order: tuple[int, ...]
    permuted: Matrix
    N_bar: Matrix
    Omega: Matrix
    Lambda: tuple
    l: tuple
    D: Matrix
    primary_vector: tuple
    nesting_degree: int = 1
    latent: tuple[tuple[int, int], ...] = field(default=())

    @property
    def n(self) -> int:
        return self.source.nrows

    @property
    def k(self) -> int:
        return self.n - len(self.exceptional)

    @property
    def exceptional_block(self) -> Matrix:
        k = self.k
        return _sub(self.N_bar, list(range(k, self.n)), list(range(k, self.n)))

    def primary_condition(self):
        """``N_1 . (-1, l)``; non-zero exactly when the exceptional block is non-degenerate."""
        v = (-1,) + tuple(self.l)
        return sum((a * b for a, b in zip(self.primary_vector, v)), 0)

    def permute_poly(self, f: SparsePoly) -> SparsePoly:
        return f.permute_vars(self.row_order)

    def to_json(self) -> dict:
        return {
            "source": self.source.to_json(),
            "exceptional": [j + 1 for j in self.exceptional],
            "row_order": [i + 1 for i in self.row_order],
            "col_order": [j + 1 for j in self.col_order],
            "N_bar": self.N_bar.to_json(),
            "Omega": self.Omega.to_json(),
            "Lambda": Matrix.of([self.Lambda]).to_json()[0] if self.Lambda else [],
            "l": Matrix.of([self.l]).to_json()[0] if self.l else [],
            "D": self.D.to_json(),
            "primary_vector": list(self.primary_vector),
            "nesting_degree": self.nesting_degree,
            "latent": [[v + 1, lvl] for v, lvl in self.latent],
        }


def inconsistent_form(m: Matrix, exceptional: Sequence[int], primary_row: int = 0) -> InconsistentForm:
    """Lexicographically first layout with non-degenerate exceptional blocks."""
    n = m.nrows
    ex = sorted(exceptional)
    if is_consistent(m, ex, primary_row):
        raise PreconditionError("primary variable is consistent; use canonical_reduce")
    non = [j for j in range(n) if j not in ex]
    k = len(non)
    if k == 0:
        raise PreconditionError("no non-exceptional column")
    r = len(ex) - 1
    rest = [i for i in range(n) if i != primary_row]
    for exo in itertools.permutations(ex):
        cols = tuple(non) + exo
        for perm in itertools.permutations(rest):
            top, basis = list(perm[:k]), list(perm[k:])
            d_small = _sub(m, basis, list(exo[1:]))
            if r and _det(d_small) == 0:
                continue
            d_bar = _sub(m, basis + [primary_row], list(exo))
            if _det(d_bar) == 0:
                continue
            b_bar = _sub(m, basis, list(exo))
            b_top = _sub(m, top, list(exo))
            if r:
                gamma = _sub(m, top, list(exo[1:])) @ inverse(d_small)
                if gamma @ b_bar != b_top:
                    continue
                l_vec = inverse(d_small).apply_col(_sub(m, basis, [exo[0]]).col(0))
            else:
                if any(x != 0 for row in b_top.rows for x in row):
                    continue
                gamma = _zeros(k, 0)
                l_vec = ()
            order = tuple(top + basis + [primary_row])
            mp = m.permute_rows(order).permute_cols(cols)
            _, B, _, Dbar = _blocks(mp, k)
            N_bar = _block([[_eye(k), B], [_zeros(n - k, k), Dbar]])
            omega = _sub(gamma, list(range(k - 1)), list(range(r))) if k > 1 else _zeros(0, r)
            lam = gamma.rows[k - 1] if r else ()
            form = InconsistentForm(
                m, tuple(ex), primary_row, order, cols, mp, N_bar, omega, tuple(lam), tuple(l_vec),
                d_small, tuple(m.rows[primary_row][j] for j in exo), 1, ((primary_row, 1),),
            )
            if form.primary_condition() == 0:
                raise InvariantViolation("non-degenerate block with vanishing primary condition")
            return form
    raise StructuralError("no permutation gives a non-degenerate inconsistent form")


def reduce_trivial_inconsistency(nf: InconsistentForm) -> InconsistentForm:
    """Drop column powers when every column of the source has one nonzero entry.

    Such a matrix only raises variables to powers, so its 0/1 pattern gives the
    same chart up to a branched covering and the layout becomes a permutation.
    """
    m = nf.source
    if any(sum(1 for x in m.col(j) if x) != 1 for j in range(m.ncols)):
        return nf
    pattern = Matrix.of([[1 if x else 0 for x in row] for row in m.rows])
    return inconsistent_form(pattern, nf.exceptional, nf.primary_row)


def decompose_interim(nf: InconsistentForm) -> tuple[Matrix, Matrix]:
    """Split ``N_bar = S_bar T_bar`` with the latent primary kept by ``S_bar``.

    ``S_bar`` columns: non-exceptional, interim variables, latent primary.
    ``T_bar`` rows: non-exceptional, interim variables, latent primary.
    """
    n, k = nf.n, nf.k
    r = n - k - 1
    gamma = _block([[nf.Omega], [Matrix.of([nf.Lambda])]]) if r else _zeros(k, 0)
    upper_mid = gamma @ nf.D if r else _zeros(k, 0)
    S = _block([
        [_eye(k), upper_mid, _zeros(k, 1)],
        [_zeros(r, k), nf.D, _zeros(r, 1)],
        [_zeros(1, k), _zeros(1, r), Matrix.of([[1]])],
    ])
    l_col = Matrix.of([[x] for x in nf.l]) if r else _zeros(0, 1)
    T = _block([
        [_eye(k), _zeros(k, r + 1)],
        [_zeros(r, k), l_col, _eye(r)],
        [_zeros(1, k), Matrix.of([list(nf.primary_vector)])],
    ])
    if S @ T != nf.N_bar:
        raise InvariantViolation("interim decomposition does not reproduce N_bar")
    return S, T


def interim_principles_hold(nf: InconsistentForm, S: Matrix, T: Matrix, exponents: Sequence[Sequence[int]]) -> bool:
    """Check the three structural rules of the interim decomposition on sample exponents."""
    n, k = nf.n, nf.k
    if S @ T != nf.N_bar:
        return False
    if S.col(n - 1) != tuple(1 if i == n - 1 else 0 for i in range(n)):
        return False
    for j in range(k):
        if S.col(j) != nf.N_bar.col(j):
            return False
    n1 = nf.primary_vector
    for a in exponents:
        s_img = S.apply_row(a)
        n_img = nf.N_bar.apply_row(a)
        for t in range(n - k - 1):
            diff = s_img[k + t] - n_img[k + 1 + t]
            if diff != -a[n - 1] * n1[1 + t]:
                return False
    return True


def latent_primary_component(alpha: Sequence[int], vertex: Sequence[int], latent: int) -> int:
    if len(alpha) != len(vertex):
        raise DimensionError("exponent and vertex differ in length")
    return alpha[latent] - vertex[latent]


# ----------------------------------------------------------------------------
# Synthesis.


@dataclass(frozen=True)
class SyntheticMatrix:
    Q: Matrix
    interim: Matrix
    following: Matrix
    latent: tuple[tuple[int, int], ...]
    nesting_degree: int

    def consistency(self, exceptional: Sequence[int]) -> list[tuple[int, int, bool]]:
        """Consistency of each latent primary row with ``Q``, by nesting level."""
        out = []
        for row, level in sorted(self.latent, key=lambda t: t[1]):
            out.append((row, level, is_consistent(self.Q, exceptional, row)))
        return out

    def to_json(self) -> dict:
        return {
            "Q": self.Q.to_json(),
            "interim": self.interim.to_json(),
            "following": self.following.to_json(),
            "latent": [[r + 1, lvl] for r, lvl in self.latent],
            "nesting_degree": self.nesting_degree,
        }


def synthesize(t_hat: Matrix, following, latent: Sequence[tuple[int, int]] = ()) -> SyntheticMatrix:
    """``Q = t_hat . N_next`` with latent rows tracked by nesting level."""
    if isinstance(following, CanonicalReduction):
        nxt = following.N
    elif isinstance(following, InconsistentForm):
        nxt = following.N_bar
        latent = tuple(latent) + tuple((r, lvl + max((l for _, l in latent), default=0)) for r, lvl in following.latent)
    else:
        nxt = following
    if t_hat.ncols != nxt.nrows:
        raise DimensionError(f"cannot synthesize {t_hat.shape} with {nxt.shape}")
    latent = tuple(latent)
    return SyntheticMatrix(t_hat @ nxt, t_hat, nxt, latent, len({lvl for _, lvl in latent}))
