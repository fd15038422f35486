"""The hyperbolic quadratic module and the general quadratic group GQ_2n.

Coordinates are ordered ``e_1..e_n, e_-1..e_-n`` so that the hyperbolic
partner of position ``i`` is ``rho(i) = n + i``.  Matrices act on column
vectors.  Every routine is generic over the scalar algebra: a
:class:`~formring.ring.RingCtx` (elements are ints) or a
:class:`~formring.poly.PolyRing` (elements are polynomials).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import (BadIndex, DiagonalParameterNotInLambda, DimensionMismatch,
                     NotInvertible, PreconditionViolated, VerificationFailed)
from .formparam import FormParam, LambdaCoset, lambda_max, poly_in_lambda
from .poly import PolyRing
from .ring import Ideal, RingCtx

MAX_N = 8
FAMILIES = ("eps", "r", "l")


def base_ring(A) -> RingCtx:
    return A.base if isinstance(A, PolyRing) else A


def in_param(A, param: FormParam, x) -> bool:
    if isinstance(A, PolyRing):
        return poly_in_lambda(param, A, x)
    return x in param.elements


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_N:
        raise BadIndex(f"n={n} outside 1..{MAX_N}")


def rho(n: int, i: int) -> int:
    """0-based position of the partner of 1-based index ``i``."""
    return n + i - 1


@dataclass(frozen=True)
class QuadMatrix:
    """A 2n x 2n matrix over a form ring, entries stored row-major."""

    algebra: object
    param: FormParam
    n: int
    rows: tuple

    @property
    def size(self) -> int:
        return 2 * self.n

    def __matmul__(self, other: "QuadMatrix") -> "QuadMatrix":
        if other.n != self.n:
            raise DimensionMismatch("matrix sizes differ")
        return QuadMatrix(self.algebra, self.param, self.n,
                          _matmul(self.algebra, self.rows, other.rows))

    def __eq__(self, other):
        return isinstance(other, QuadMatrix) and self.n == other.n and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def entry(self, r: int, c: int):
        return self.rows[r][c]

    def column(self, c: int) -> tuple:
        return tuple(row[c] for row in self.rows)

    def conj_transpose(self) -> "QuadMatrix":
        A = self.algebra
        N = self.size
        return QuadMatrix(A, self.param, self.n,
                          tuple(tuple(A.conj(self.rows[c][r]) for c in range(N)) for r in range(N)))

    def inverse(self) -> "QuadMatrix":
        """``H^-1 sigma* H``; valid (and checked) for members of GQ."""
        H = hermitian_gram(self.n, self.algebra, self.param)
        Hinv = hermitian_gram_inverse(self.n, self.algebra, self.param)
        inv = Hinv @ self.conj_transpose() @ H
        if not (self @ inv).is_identity():
            raise NotInvertible("matrix does not preserve h; no inverse formula")
        return inv

    def is_identity(self) -> bool:
        A = self.algebra
        N = self.size
        return all(self.rows[r][c] == (A.one if r == c else A.zero)
                   for r in range(N) for c in range(N))

    def apply(self, v: Sequence) -> tuple:
        A = self.algebra
        out = []
        for row in self.rows:
            acc = A.zero
            for x, y in zip(row, v):
                acc = A.add(acc, A.mul(x, y))
            out.append(acc)
        return tuple(out)

    def map_entries(self, fn, algebra=None, param=None) -> "QuadMatrix":
        return QuadMatrix(algebra or self.algebra, param or self.param, self.n,
                          tuple(tuple(fn(x) for x in row) for row in self.rows))

    def labels(self):
        A = self.algebra
        if isinstance(A, PolyRing):
            return [[A.to_json(x) for x in row] for row in self.rows]
        return [[A.label(x) for x in row] for row in self.rows]


def _matmul(A, X, Y):
    N = len(X)
    M = len(Y[0])
    K = len(Y)
    out = []
    for r in range(N):
        xr = X[r]
        row = []
        for c in range(M):
            acc = A.zero
            for k in range(K):
                a = xr[k]
                if a != A.zero:
                    b = Y[k][c]
                    if b != A.zero:
                        acc = A.add(acc, A.mul(a, b))
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def identity(n: int, A, param: FormParam) -> QuadMatrix:
    N = 2 * n
    return QuadMatrix(A, param, n, tuple(tuple(A.one if r == c else A.zero for c in range(N))
                                         for r in range(N)))


def from_entries(n: int, A, param: FormParam, entries) -> QuadMatrix:
    """Identity plus the listed ``(row, col, value)`` off-diagonal additions."""
    N = 2 * n
    rows = [[A.one if r == c else A.zero for c in range(N)] for r in range(N)]
    for r, c, v in entries:
        rows[r][c] = A.add(rows[r][c], v)
    return QuadMatrix(A, param, n, tuple(tuple(row) for row in rows))


def matrix(n: int, A, param: FormParam, rows) -> QuadMatrix:
    rows = tuple(tuple(r) for r in rows)
    if len(rows) != 2 * n or any(len(r) != 2 * n for r in rows):
        raise DimensionMismatch(f"expected a {2 * n}x{2 * n} matrix")
    return QuadMatrix(A, param, n, rows)


def psi(n: int, A, param: FormParam | None = None) -> QuadMatrix:
    """``psi_n = [[0, lambda I], [I, 0]]``."""
    _check_n(n)
    N = 2 * n
    rows = [[A.zero] * N for _ in range(N)]
    for i in range(n):
        rows[i][n + i] = A.lam
        rows[n + i][i] = A.one
    return QuadMatrix(A, param, n, tuple(tuple(r) for r in rows))


def hermitian_gram(n: int, A, param: FormParam | None = None) -> QuadMatrix:
    """Gram matrix of ``h``: ``h(u, v) = u* H v`` with ``H = [[0, I], [lambda I, 0]]``."""
    N = 2 * n
    rows = [[A.zero] * N for _ in range(N)]
    for i in range(n):
        rows[i][n + i] = A.one
        rows[n + i][i] = A.lam
    return QuadMatrix(A, param, n, tuple(tuple(r) for r in rows))


def hermitian_gram_inverse(n: int, A, param: FormParam | None = None) -> QuadMatrix:
    N = 2 * n
    lam_bar = A.conj(A.lam)
    rows = [[A.zero] * N for _ in range(N)]
    for i in range(n):
        rows[i][n + i] = lam_bar
        rows[n + i][i] = A.one
    return QuadMatrix(A, param, n, tuple(tuple(r) for r in rows))


# ---------------------------------------------------------------------------
# forms


def _check_vectors(*vs):
    sizes = {len(v) for v in vs}
    if len(sizes) != 1 or next(iter(sizes)) % 2:
        raise DimensionMismatch("vectors must share one even length")
    return next(iter(sizes)) // 2


def sesq_f(A, u, v):
    """``f(u, v) = sum conj(u_i) v_-i``."""
    n = _check_vectors(u, v)
    acc = A.zero
    for i in range(n):
        acc = A.add(acc, A.mul(A.conj(u[i]), v[n + i]))
    return acc


def herm_h(A, u, v):
    """``h(u, v) = sum conj(u_i) v_-i + lambda sum conj(u_-i) v_i``."""
    n = _check_vectors(u, v)
    acc = A.zero
    for i in range(n):
        acc = A.add(acc, A.mul(A.conj(u[i]), v[n + i]))
        acc = A.add(acc, A.mul(A.lam, A.mul(A.conj(u[n + i]), v[i])))
    expected = A.add(sesq_f(A, u, v), A.mul(A.lam, A.conj(sesq_f(A, v, u))))
    if acc != expected:
        raise VerificationFailed("h(u,v) != f(u,v) + lambda conj(f(v,u))")
    return acc


def quad_q(param: FormParam, u) -> LambdaCoset:
    return param.coset(sesq_f(param.ring, u, u))


def basis_vector(n: int, A, k: int) -> tuple:
    return tuple(A.one if i == k else A.zero for i in range(2 * n))


# ---------------------------------------------------------------------------
# membership


@dataclass(frozen=True)
class GQCertificate:
    member: bool
    failed: str | None = None
    detail: str = ""

    def __bool__(self):
        return self.member


def determinant(A, rows) -> object:
    """Division-free determinant by dynamic programming over column subsets."""
    N = len(rows)
    dp = {0: A.one}
    for r in range(N):
        nxt: dict = {}
        for mask, val in dp.items():
            if val == A.zero:
                continue
            # sign = (-1)^(number of chosen columns to the right of c)
            for c in range(N):
                if mask >> c & 1:
                    continue
                a = rows[r][c]
                if a == A.zero:
                    continue
                above = bin(mask >> (c + 1)).count("1")
                term = A.mul(val, a)
                if above % 2:
                    term = A.neg(term)
                m2 = mask | (1 << c)
                nxt[m2] = A.add(nxt.get(m2, A.zero), term)
        dp = nxt
    return dp.get((1 << N) - 1, A.zero)


def is_in_gq(sigma: QuadMatrix, mode: str = "strict") -> GQCertificate:
    """Membership in GQ_2n(R, Lambda) with the first failing condition.

    ``mode='hermitian'`` checks only preservation of ``h``.
    """
    A, n, param = sigma.algebra, sigma.n, sigma.param
    H = hermitian_gram(n, A)
    lhs = sigma.conj_transpose() @ H @ sigma
    if lhs.rows != H.rows:
        det = determinant(A, sigma.rows)
        unit = A.is_unit(det)
        if not unit:
            raise NotInvertible("determinant is not a unit")
        for r in range(2 * n):
            for c in range(2 * n):
                if lhs.rows[r][c] != H.rows[r][c]:
                    return GQCertificate(False, "hermitian", f"(sigma* H sigma)[{r}][{c}] != H[{r}][{c}]")
    if mode == "hermitian":
        return GQCertificate(True)
    for k in range(2 * n):
        col = sigma.column(k)
        if not in_param(A, param, sesq_f(A, col, col)):
            return GQCertificate(False, "quadratic", f"f(c_{k}, c_{k}) not in Lambda")
    return GQCertificate(True)


def is_congruent_mod(sigma: QuadMatrix, ideal: Ideal) -> bool:
    A = sigma.algebra
    N = sigma.size
    for r in range(N):
        for c in range(N):
            d = A.sub(sigma.rows[r][c], A.one if r == c else A.zero)
            vals = d.terms.values() if isinstance(A, PolyRing) else (d,)
            if any(x not in ideal.elements for x in vals):
                return False
    return True


# ---------------------------------------------------------------------------
# elementary generators


def diagonal_ok(A, param: FormParam, fam: str, a, mode: str = "strict") -> bool:
    """Constraint on the parameter of ``r_ii`` / ``l_ii``."""
    x = A.conj(a) if fam == "r" else a
    if mode == "hermitian":
        R = base_ring(A)
        lmax = lambda_max(R)
        return in_param(A, lmax, x)
    return in_param(A, param, x)


def generator_entries(fam: str, i: int, j: int, a, A, n: int, param: FormParam | None = None,
                      mode: str = "strict", check: bool = True) -> list:
    """Off-diagonal ``(row, col, value)`` entries of an elementary generator."""
    if fam not in FAMILIES:
        raise BadIndex(f"unknown family {fam!r}")
    if not (1 <= i <= n and 1 <= j <= n):
        raise BadIndex(f"indices ({i},{j}) outside 1..{n}")
    if a == A.zero:
        return []
    lam, lam_bar = A.lam, A.conj(A.lam)
    ca = A.conj(a)
    p, q = i - 1, j - 1
    if fam == "eps":
        if i == j:
            raise BadIndex("eps_ij requires i != j")
        return [(p, q, a), (n + q, n + p, A.neg(ca))]
    if i == j:
        if check and param is not None and not diagonal_ok(A, param, fam, a, mode):
            raise DiagonalParameterNotInLambda(f"{fam}_{i}{i} parameter outside the form parameter")
        return [(p, n + p, a)] if fam == "r" else [(n + p, p, a)]
    if fam == "r":
        return [(p, n + q, a), (q, n + p, A.neg(A.mul(lam_bar, ca)))]
    return [(n + p, q, a), (n + q, p, A.neg(A.mul(lam, ca)))]


def elem(fam: str, i: int, j: int, a, n: int, A, param: FormParam, mode: str = "strict") -> QuadMatrix:
    _check_n(n)
    return from_entries(n, A, param, generator_entries(fam, i, j, a, A, n, param, mode))


def elem_eps(i, j, a, n, A, param):
    return elem("eps", i, j, a, n, A, param)


def elem_r(i, j, a, n, A, param, mode="strict"):
    return elem("r", i, j, a, n, A, param, mode)


def elem_l(i, j, a, n, A, param, mode="strict"):
    return elem("l", i, j, a, n, A, param, mode)


def generator_params(fam: str, i: int, j: int, R: RingCtx, param: FormParam, mode="strict"):
    """Admissible nonzero parameters of one generator over a finite ring."""
    out = []
    for a in R.elements:
        if a == 0:
            continue
        if fam != "eps" and i == j and not diagonal_ok(R, param, fam, a, mode):
            continue
        out.append(a)
    return out


def generator_index_pairs(n: int, fam: str, canonical: bool = False):
    """Index pairs of a family; with ``canonical`` only ``i <= j`` for r/l."""
    pairs = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if fam == "eps" and i == j:
                continue
            if canonical and fam != "eps" and i > j:
                continue
            pairs.append((i, j))
    return pairs


def all_generators(n: int, R: RingCtx, param: FormParam, mode="strict", canonical=True):
    """Every ``(fam, i, j, a)`` with ``a`` nonzero and admissible."""
    for fam in FAMILIES:
        for i, j in generator_index_pairs(n, fam, canonical):
            for a in generator_params(fam, i, j, R, param, mode):
                yield fam, i, j, a


# ---------------------------------------------------------------------------
# transvections and stabilization


def transvection(u, a, v, A, param: FormParam) -> QuadMatrix:
    """``x -> x + u h(v,x) - v lam_bar h(u,x) - u lam_bar a h(u,x)``."""
    n = _check_vectors(u, v)
    if not in_param(A, param, sesq_f(A, u, u)):
        raise PreconditionViolated("f(u,u) in Lambda", "f(u,u) is not in Lambda")
    if herm_h(A, u, v) != A.zero:
        raise PreconditionViolated("h(u,v) = 0", "h(u,v) is not zero")
    if not in_param(A, param, A.sub(sesq_f(A, v, v), a)):
        raise PreconditionViolated("f(v,v) = a mod Lambda", "a is not f(v,v) modulo Lambda")
    lam_bar = A.conj(A.lam)
    cols = []
    for k in range(2 * n):
        x = basis_vector(n, A, k)
        hv, hu = herm_h(A, v, x), herm_h(A, u, x)
        c1 = hv
        c2 = A.neg(A.mul(lam_bar, hu))
        c3 = A.neg(A.mul(A.mul(lam_bar, a), hu))
        cols.append(tuple(A.add(A.add(A.add(x[t], A.mul(u[t], c1)), A.mul(v[t], c2)), A.mul(u[t], c3))
                          for t in range(2 * n)))
    rows = tuple(tuple(cols[c][r] for c in range(2 * n)) for r in range(2 * n))
    sigma = QuadMatrix(A, param, n, rows)
    cert = is_in_gq(sigma)
    if not cert:
        raise VerificationFailed(f"transvection left GQ: {cert.failed}")
    return sigma


SLOTS = ("outer", "mid", "inner")


def slot_position(n: int, slot: str) -> int:
    """Pair index (0-based) where the new hyperbolic pair is inserted."""
    if slot == "outer":
        return n
    if slot == "inner":
        return 0
    if slot == "mid":
        return (n + 1) // 2
    raise ValueError(f"unknown slot {slot!r}")


def embed_index(n: int, slot: str, i: int) -> int:
    """New 1-based index of old index ``i`` under ``stab_embed``."""
    p = slot_position(n, slot)
    return i if i - 1 < p else i + 1


def stab_embed(sigma: QuadMatrix, slot: str = "outer") -> QuadMatrix:
    """``sigma`` orthogonal sum the identity on one extra hyperbolic pair."""
    A, n = sigma.algebra, sigma.n
    m = n + 1
    p = slot_position(n, slot)

    def pos(old: int) -> int:
        k, side = (old, 0) if old < n else (old - n, 1)
        k2 = k if k < p else k + 1
        return k2 + side * m

    new = [[A.one if r == c else A.zero for c in range(2 * m)] for r in range(2 * m)]
    for r in range(2 * n):
        for c in range(2 * n):
            new[pos(r)][pos(c)] = sigma.rows[r][c]
    return QuadMatrix(A, sigma.param, m, tuple(tuple(r) for r in new))
