"""Polynomial matrices, Suslin's trick, dilation and local-global gluing.

Localizations of a finite ring are realized as ``R -> Re``; pulling a
parameter back multiplies the least preimage by ``e``, so every pulled-back
letter is the identity on the complementary factor ``R(1-e)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .elemword import (Conj, ElemWord, GenSymbol, RelationTable, congruence_normalize,
                       conjugate_letter, lift_word)
from .errors import (NilpotentElement, NotNormalizedAtZero, PreconditionViolated,
                     UnresolvedRelation, VerificationFailed)
from .formparam import FormParam, induce_localized, lambda_max
from .poly import Poly, PolyRing
from .quadgroup import QuadMatrix
from .ring import (LocalizationMap, RingCtx, ideal_witness, localize_at, partition_of_unity,
                   principal_ideal)

PolyMat = QuadMatrix
DEGREE_CAP = 32


@dataclass(frozen=True)
class Substitution:
    """Variable -> polynomial assignments, applied simultaneously."""

    targets: Mapping[str, Poly] = field(default_factory=dict)

    def __call__(self, P: PolyRing, p: Poly) -> Poly:
        return P.subst(p, dict(self.targets))


def scaled_var(P: PolyRing, var: str, c, power_var: str | None = None, d: int = 0) -> Poly:
    """``c * var * power_var^d`` as a polynomial."""
    p = P.scale(c, P.var(var))
    if power_var:
        p = P.mul(p, P.var(power_var, d))
    return p


def subst(obj, s: Substitution | Mapping[str, Poly]):
    """Apply a substitution to a polynomial matrix or a word, entry by entry."""
    if not isinstance(s, Substitution):
        s = Substitution(dict(s))
    if isinstance(obj, QuadMatrix):
        P = obj.algebra
        return obj.map_entries(lambda x: s(P, x))
    if isinstance(obj, ElemWord):
        P = obj.algebra
        return obj.with_items(_subst_item(x, s, P) for x in obj.items)
    raise TypeError("subst expects a QuadMatrix or an ElemWord")


def _subst_item(x, s, P):
    if isinstance(x, GenSymbol):
        return x.with_param(s(P, x.param))
    conj = x.conj
    if conj.algebra == P:
        conj = subst(conj, s)
    return Conj(conj, subst(x.inner, s))


def at_zero(M: QuadMatrix, var: str = "X") -> QuadMatrix:
    P = M.algebra
    return subst(M, {var: P.zero})


# ---------------------------------------------------------------------------
# moving along a localization


def local_algebra(P: PolyRing, loc: LocalizationMap) -> PolyRing:
    return PolyRing(loc.target, P.vars)


def localize_poly(p: Poly, loc: LocalizationMap, Ps: PolyRing) -> Poly:
    return Poly({e: loc(c) for e, c in p.terms.items() if loc(c)})


def localize_matrix(M: QuadMatrix, loc: LocalizationMap, param_s: FormParam) -> QuadMatrix:
    Ps = local_algebra(M.algebra, loc)
    return M.map_entries(lambda x: localize_poly(x, loc, Ps), Ps, param_s)


def localize_word(w: ElemWord, loc: LocalizationMap, param_s: FormParam) -> ElemWord:
    Ps = local_algebra(w.algebra, loc)
    return ElemWord(Ps, param_s, w.n, tuple(_loc_item(x, loc, Ps, param_s) for x in w.items), w.mode)


def _loc_item(x, loc, Ps, param_s):
    if isinstance(x, GenSymbol):
        return x.with_param(localize_poly(x.param, loc, Ps))
    conj = lift_word(x.conj, x.inner.algebra)
    return Conj(localize_word(conj, loc, param_s), localize_word(x.inner, loc, param_s))


def pullback_poly(p: Poly, loc: LocalizationMap) -> Poly:
    """Coefficientwise ``e * (least preimage)``."""
    R = loc.source
    terms = {}
    for exp, c in p.terms.items():
        v = R.mul(loc.e, loc.preimage(c))
        if v:
            terms[exp] = v
    return Poly(terms)


def pullback_word(w: ElemWord, loc: LocalizationMap, P: PolyRing, param: FormParam) -> ElemWord:
    return ElemWord(P, param, w.n, tuple(_pull_item(x, loc, P, param) for x in w.items), w.mode)


def _pull_item(x, loc, P, param):
    if isinstance(x, GenSymbol):
        return x.with_param(pullback_poly(x.param, loc))
    conj = lift_word(x.conj, x.inner.algebra)
    return Conj(pullback_word(conj, loc, P, param), pullback_word(x.inner, loc, P, param))


# ---------------------------------------------------------------------------
# Suslin's trick


def suslin_theta(alpha: QuadMatrix, var: str = "X", tvar: str = "T") -> QuadMatrix:
    """``theta(X, T) = alpha(X + T) alpha(T)^-1``."""
    P = alpha.algebra
    if not at_zero(alpha, var).is_identity():
        raise NotNormalizedAtZero("alpha(0) is not the identity")
    shifted = subst(alpha, {var: P.add(P.var(var), P.var(tvar))})
    at_t = subst(alpha, {var: P.var(tvar)})
    return shifted @ at_t.inverse()


def theta_word(w: ElemWord, var: str = "X", tvar: str = "T") -> ElemWord:
    """The word ``w(X + T) w(T)^-1``."""
    P = w.algebra
    shifted = subst(w, {var: P.add(P.var(var), P.var(tvar))})
    return shifted + subst(w, {var: P.var(tvar)}).inverse()


# ---------------------------------------------------------------------------
# dilation


@dataclass(frozen=True)
class Dilation:
    b: int
    beta: ElemWord
    d: int
    m: int
    unresolved: int
    localization: LocalizationMap

    def __iter__(self):
        return iter((self.b, self.beta))


def _rewrite_items(items, w: ElemWord, table, var: str, mode: str):
    """Conjugation-rewrite every wrapper; returns (items, unresolved count)."""
    out, unresolved = [], 0
    for it in items:
        if isinstance(it, GenSymbol):
            out.append(it)
            continue
        inner = it.inner.letters()
        try:
            for g in inner:
                out.extend(conjugate_letter(it.conj, g, w, table, var, 1).items)
        except UnresolvedRelation:
            if mode == "strict":
                raise
            unresolved += 1
            out.append(it)
    return out, unresolved


def dilate(alpha: QuadMatrix, s: int, local_word: ElemWord, table: RelationTable | None = None,
           mode: str = "auto", var: str = "X", dvar: str = "Y",
           degree_cap: int = DEGREE_CAP) -> Dilation:
    """Elementary factorization of ``alpha(bX)`` over ``R[X]`` with ``b`` in ``(s^l)``.

    ``local_word`` is an elementary word over ``R_s[X]`` evaluating to the
    image of ``alpha``.  In ``auto`` mode conjugated blocks the table cannot
    rewrite are pulled back whole; ``strict`` raises UnresolvedRelation.
    """
    R = alpha.algebra.base
    if not at_zero(alpha, var).is_identity():
        raise NotNormalizedAtZero("alpha(0) is not the identity")
    loc = localize_at(R, s)
    if localize_matrix(alpha, loc, local_word.param).rows != local_word.evaluate().rows:
        raise PreconditionViolated("local word", "local word does not evaluate to alpha_s")
    return dilate_word(R, alpha.param, s, local_word, table, mode, var, dvar, degree_cap)


def dilate_word(R: RingCtx, param: FormParam, s: int, local_word: ElemWord,
                table: RelationTable | None = None, mode: str = "auto", var: str = "X",
                dvar: str = "Y", degree_cap: int = DEGREE_CAP) -> Dilation:
    """Dilation when only the local word is at hand (used for theta)."""
    loc = localize_at(R, s)
    Ps = local_word.algebra
    if Ps.base.size != loc.target.size:
        raise PreconditionViolated("local word ring", "local word is not over the localization")
    P = PolyRing(R, Ps.vars)
    local_eval = local_word.evaluate()
    if not at_zero(local_eval, var).is_identity():
        raise NotNormalizedAtZero("local word is not I at zero")
    m = max(loc.k, 1)  # no denominators occur, so l = 0
    normalized = congruence_normalize(local_word, var)
    best = None
    # stretch until every block rewrites, or stretching stops helping
    for d in (1, 2, 4, 8, 16):
        stretched = subst(normalized, {var: Ps.mul(Ps.var(var), Ps.var(dvar, d))})
        items, unresolved = _rewrite_items(stretched.items, stretched, table, dvar, mode)
        if best is not None and unresolved >= best[3]:
            break
        best = (d, stretched, items, unresolved)
        if not unresolved:
            break
    d, stretched, items, unresolved = best
    pulled = pullback_word(stretched.with_items(items), loc, P, param)
    b = R.pow(s, m * d)
    beta = subst(pulled, {dvar: P.const(R.pow(s, m))})
    _check_degree(beta, degree_cap)
    _verify_dilation(beta, b, local_eval, loc, var)
    return Dilation(b, beta, d, m, unresolved, loc)


def _check_degree(w: ElemWord, cap: int):
    P = w.algebra
    for g in w.letters():
        P.check_degree(g.param, cap)


def _verify_dilation(beta: ElemWord, b: int, local_eval: QuadMatrix, loc: LocalizationMap,
                     var: str):
    B = beta.evaluate()
    if not at_zero(B, var).is_identity():
        raise VerificationFailed("beta(0) is not the identity")
    Ps = local_eval.algebra
    expect = subst(local_eval, {var: Ps.scale(loc(b), Ps.var(var))})
    if localize_matrix(B, loc, local_eval.param).rows != expect.rows:
        raise VerificationFailed("localized beta differs from alpha_s(bX)")


# ---------------------------------------------------------------------------
# local-global gluing


@dataclass(frozen=True)
class GlueResult:
    word: ElemWord
    b: tuple
    exponents: tuple
    unresolved: int

    def __iter__(self):
        return iter((self.word, self.b))


def local_global_glue(alpha: QuadMatrix, cover: Sequence[tuple[int, ElemWord]],
                      table: RelationTable | None = None, mode: str = "auto",
                      var: str = "X", tvar: str = "T") -> GlueResult:
    """Assemble an elementary word for ``alpha`` from local factorizations.

    ``cover`` pairs each ``s_i`` with a word over ``R_{s_i}[X]``.  The
    telescoping product of dilated theta-words is checked against ``alpha``.
    """
    P = alpha.algebra
    R = P.base
    if not at_zero(alpha, var).is_identity():
        raise NotNormalizedAtZero("alpha(0) is not the identity")
    partition_of_unity(R, [s for s, _ in cover], 1)  # NotACover when (s_i) != R
    active = []
    for s, w in cover:
        try:
            loc = localize_at(R, s)
        except NilpotentElement:
            continue
        if localize_matrix(alpha, loc, w.param).rows != w.evaluate().rows:
            raise PreconditionViolated("local word", f"word for s={R.label(s)} does not match alpha")
        active.append((s, w))
    dilations = [dilate_word(R, alpha.param, s, theta_word(w, var, tvar), table, mode, var)
                 for s, w in active]
    exps = [dl.m * dl.d for dl in dilations]
    l = max(exps)
    bs = partition_of_unity(R, [s for s, _ in active], l)
    out = ElemWord(P, alpha.param, alpha.n, ())
    for i, (dl, b) in enumerate(zip(dilations, bs)):
        c = ideal_witness(R, dl.b, b)
        tail = R.sum(bs[i + 1:])
        piece = subst(dl.beta, {var: P.scale(c, P.var(var)), tvar: P.scale(tail, P.var(var))})
        out = out + piece
    if out.evaluate().rows != alpha.rows:
        raise VerificationFailed("glued word does not evaluate to alpha")
    return GlueResult(out, tuple(bs), tuple(exps), sum(dl.unresolved for dl in dilations))


# ---------------------------------------------------------------------------
# injectivity of G(R, s^k R) -> G(R_s)


@dataclass(frozen=True)
class InjectivityReport:
    ring: str
    s: str
    n: int
    verdicts: tuple  # (k, injective, group size)
    least_k: int | None
    witness: tuple | None = None

    def to_json(self):
        return {"ring": self.ring, "s": self.s, "n": self.n,
                "verdicts": [{"k": k, "injective": ok, "elements": size}
                             for k, ok, size in self.verdicts],
                "least_k": "NONE" if self.least_k is None else self.least_k}


def _congruent_entries(R: RingCtx, rows, ideal) -> bool:
    N = len(rows)
    return all(R.sub(rows[r][c], R.one if r == c else R.zero) in ideal
               for r in range(N) for c in range(N))


def check_localization_injectivity(R: RingCtx, s: int, k: int | None = None, n: int = 1,
                                   param: FormParam | None = None) -> InjectivityReport:
    """Exhaustive test that ``GQ(R, s^k) -> GQ(R_s)`` is injective.

    Congruence ``sigma = I mod s^k`` is taken entrywise.  With ``k=None``
    every exponent up to one past the stabilization of ``(s^k)`` is tried.
    """
    from .k1lab import enum_gq_bruteforce
    param = param or lambda_max(R)
    loc = localize_at(R, s)
    group = enum_gq_bruteforce(R, param, n)
    ks = [k] if k is not None else list(range(0, loc.k + 2))
    verdicts, least, witness = [], None, None
    for kk in ks:
        ideal = principal_ideal(R, R.pow(s, kk)).elements
        seen: dict = {}
        ok, count = True, 0
        for rows in group:
            if not _congruent_entries(R, rows, ideal):
                continue
            count += 1
            img = tuple(loc(x) for row in rows for x in row)
            if img in seen and ok:
                ok = False
                if witness is None:
                    witness = (kk, seen[img], rows)
            seen.setdefault(img, rows)
        verdicts.append((kk, ok, count))
        if ok and least is None:
            least = kk
    return InjectivityReport(R.description, R.label(s), n, tuple(verdicts), least, witness)


# ---------------------------------------------------------------------------
# seeded test instances


def random_letter(P: PolyRing, param: FormParam, n: int, rng, degree: int = 1,
                  var: str = "X") -> GenSymbol:
    """A random admissible generator letter with a polynomial parameter."""
    from .quadgroup import FAMILIES, diagonal_ok, generator_index_pairs
    R = P.base
    while True:
        fam = rng.choice(FAMILIES)
        i, j = rng.choice(generator_index_pairs(n, fam))
        p = P.from_coeffs([rng.randrange(R.size) for _ in range(degree + 1)], var)
        if fam == "eps" or i != j or diagonal_ok(P, param, fam, p):
            return GenSymbol(fam, i, j, p)


def random_normalized_word(P: PolyRing, param: FormParam, n: int, length: int, rng,
                           degree: int = 1, var: str = "X") -> ElemWord:
    """``w(X) w(0)^-1`` for a random word ``w``: evaluates to I at zero."""
    w = ElemWord(P, param, n, tuple(random_letter(P, param, n, rng, degree, var)
                                    for _ in range(length)))
    return w + subst(w, {var: P.zero}).inverse()


def round_trip_cover(alpha_word: ElemWord, cover_s: Sequence[int]):
    """Local words obtained by mapping every letter into each localization."""
    R = alpha_word.algebra.base
    out = []
    for s in cover_s:
        try:
            loc = localize_at(R, s)
        except NilpotentElement:
            continue
        out.append((s, localize_word(alpha_word, loc, induce_localized(alpha_word.param, loc))))
    return out
