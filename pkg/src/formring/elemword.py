"""Words in elementary quadratic generators.

A word is an immutable tuple of items.  An item is a :class:`GenSymbol`
or a :class:`Conj` wrapper standing for ``C * inner * C^-1``.  Words carry
their scalar algebra (a ring or a polynomial ring) and form parameter so
that they can be evaluated on their own.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import NotCongruentAtZero, UnresolvedRelation, VerificationFailed
from .formparam import FormParam, lambda_max
from .poly import PolyRing
from .quadgroup import (FAMILIES, QuadMatrix, diagonal_ok, generator_entries,
                        generator_params, identity)


@dataclass(frozen=True)
class GenSymbol:
    fam: str
    i: int
    j: int
    param: object

    def inverse(self, A) -> "GenSymbol":
        return GenSymbol(self.fam, self.i, self.j, A.neg(self.param))

    def with_param(self, p) -> "GenSymbol":
        return GenSymbol(self.fam, self.i, self.j, p)


@dataclass(frozen=True)
class Conj:
    conj: "ElemWord"
    inner: "ElemWord"


@dataclass(frozen=True)
class ElemWord:
    algebra: object
    param: FormParam
    n: int
    items: tuple = ()
    mode: str = field(default="strict", compare=False)

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __add__(self, other: "ElemWord") -> "ElemWord":
        return self.with_items(self.items + tuple(other.items))

    def with_items(self, items: Iterable) -> "ElemWord":
        return ElemWord(self.algebra, self.param, self.n, tuple(items), self.mode)

    def inverse(self) -> "ElemWord":
        out = []
        for it in reversed(self.items):
            if isinstance(it, GenSymbol):
                out.append(it.inverse(self.algebra))
            else:
                out.append(Conj(it.conj, it.inner.inverse()))
        return self.with_items(out)

    def letters(self) -> list[GenSymbol]:
        """Conjugation wrappers expanded into plain generator letters."""
        out: list = []
        for it in self.items:
            if isinstance(it, GenSymbol):
                out.append(it)
            else:
                c = lift_word(it.conj, self.algebra)
                out.extend(c.letters())
                out.extend(it.inner.letters())
                out.extend(c.inverse().letters())
        return out

    def flatten(self) -> "ElemWord":
        return self.with_items(self.letters())

    def evaluate(self) -> QuadMatrix:
        return word_eval(self)


def word(A, param: FormParam, n: int, letters=(), mode: str = "strict") -> ElemWord:
    items = tuple(GenSymbol(*x) if isinstance(x, tuple) else x for x in letters)
    return ElemWord(A, param, n, items, mode)


def lift_word(w: ElemWord, A) -> ElemWord:
    """View a word over the base ring as a word over ``A`` (constants)."""
    if w.algebra == A:
        return w
    if isinstance(A, PolyRing) and w.algebra == A.base:
        return ElemWord(A, w.param, w.n, tuple(_lift_item(x, A) for x in w.items), w.mode)
    raise ValueError("cannot lift word between unrelated algebras")


def _lift_item(x, A):
    if isinstance(x, GenSymbol):
        return x.with_param(A.const(x.param))
    return Conj(lift_word(x.conj, A), lift_word(x.inner, A))


# ---------------------------------------------------------------------------
# evaluation


def _apply_right(A, rows: list, n: int, letter: GenSymbol, param: FormParam, mode: str):
    """``rows <- rows * letter`` as column operations, in place."""
    for r, c, v in generator_entries(letter.fam, letter.i, letter.j, letter.param, A, n, param, mode):
        for row in rows:
            x = row[r]
            if x != A.zero:
                row[c] = A.add(row[c], A.mul(x, v))


def word_eval(w: ElemWord) -> QuadMatrix:
    A, n = w.algebra, w.n
    rows = [list(r) for r in identity(n, A, w.param).rows]
    for it in w.items:
        if isinstance(it, GenSymbol):
            _apply_right(A, rows, n, it, w.param, w.mode)
        else:
            for letter in w.with_items([it]).letters():
                _apply_right(A, rows, n, letter, w.param, w.mode)
    return QuadMatrix(A, w.param, n, tuple(tuple(r) for r in rows))


# ---------------------------------------------------------------------------
# the splitting and prefix rewrites


def split_letter(g: GenSymbol, P: PolyRing, var: str = "X") -> tuple[GenSymbol, GenSymbol]:
    """``q(f) = q(f|var=0) q(f - f|var=0)``."""
    f = g.param
    f0 = P.subst(f, {var: P.zero})
    return g.with_param(f0), g.with_param(P.sub(f, f0))


def prefix_conjugate(pairs: Sequence[tuple[ElemWord, ElemWord]]) -> ElemWord:
    """Rewrite ``a_1 b_1 ... a_k b_k`` as ``(prod r_i b_i r_i^-1)(prod a_i)``."""
    if not pairs:
        raise ValueError("need at least one pair")
    proto = pairs[0][0]
    prefix = proto.with_items(())
    conjugated = []
    for a, b in pairs:
        prefix = prefix + a
        if len(b):
            if len(prefix):
                conjugated.append(Conj(prefix, b))
            else:
                conjugated.extend(b.items)
    return proto.with_items(conjugated + [x for a, _ in pairs for x in a.items])


def _is_identity_letter(A, g) -> bool:
    return isinstance(g, GenSymbol) and g.param == A.zero


def congruence_normalize(alpha: ElemWord, var: str = "X") -> ElemWord:
    """Product of conjugated letters, each congruent to I modulo ``var``.

    Conjugators are constant in ``var``.  Raises NotCongruentAtZero when
    the word does not evaluate to I at ``var = 0``.
    """
    P = alpha.algebra
    if not isinstance(P, PolyRing):
        raise TypeError("congruence_normalize needs a polynomial word")
    pairs = []
    for g in alpha.letters():
        c, rest = split_letter(g, P, var)
        a = alpha.with_items([] if _is_identity_letter(P, c) else [c])
        b = alpha.with_items([] if _is_identity_letter(P, rest) else [rest])
        pairs.append((a, b))
    if not pairs:
        return alpha.with_items(())
    rewritten = prefix_conjugate(pairs)
    n_const = sum(len(a) for a, _ in pairs)
    tail = rewritten.with_items(rewritten.items[len(rewritten.items) - n_const:])
    if not tail.evaluate().is_identity():
        raise NotCongruentAtZero("word does not evaluate to I at zero")
    out = rewritten.with_items(rewritten.items[:len(rewritten.items) - n_const])
    return out


# ---------------------------------------------------------------------------
# parameter expressions for the relation table

COEFFS = ("1", "-1", "lam", "-lam", "lamb", "-lamb", "lam2", "-lam2", "lamb2", "-lamb2")


@dataclass(frozen=True)
class ParamExpr:
    """``coef * a^ea * conj(a)^eac * b^eb * conj(b)^ebc``."""

    coef: str
    ea: int
    eac: int
    eb: int
    ebc: int

    def evaluate(self, A, a, b):
        lam = A.lam
        lamb = A.conj(lam)
        base = {"1": A.one, "lam": lam, "lamb": lamb,
                "lam2": A.mul(lam, lam), "lamb2": A.mul(lamb, lamb)}[self.coef.lstrip("-")]
        v = base
        for x, e in ((a, self.ea), (A.conj(a), self.eac), (b, self.eb), (A.conj(b), self.ebc)):
            for _ in range(e):
                v = A.mul(v, x)
        return A.neg(v) if self.coef.startswith("-") else v

    def degree_in(self, which: str) -> int:
        return self.ea + self.eac if which == "a" else self.eb + self.ebc

    def text(self) -> str:
        parts = [self.coef]
        for name, e in (("a", self.ea), ("conj(a)", self.eac), ("b", self.eb), ("conj(b)", self.ebc)):
            parts += [name] * e
        return "*".join(parts)

    @classmethod
    def parse(cls, text: str) -> "ParamExpr":
        parts = text.split("*")
        counts = {k: parts[1:].count(k) for k in ("a", "conj(a)", "b", "conj(b)")}
        return cls(parts[0], counts["a"], counts["conj(a)"], counts["b"], counts["conj(b)"])


def param_exprs(max_degree: int = 2) -> list[ParamExpr]:
    """Monomials of degree 1..max_degree in each of a and b."""
    split = [(e, d - e) for d in range(1, max_degree + 1) for e in range(d, -1, -1)]
    return [ParamExpr(c, ea, eac, eb, ebc)
            for (ea, eac), (eb, ebc) in itertools.product(split, split) for c in COEFFS]


# ---------------------------------------------------------------------------
# relation table


def rg_pattern(idx: Sequence[int]) -> tuple:
    """Restricted-growth relabeling of an index tuple."""
    seen: dict = {}
    return tuple(seen.setdefault(x, len(seen)) for x in idx)


@dataclass(frozen=True)
class RelationEntry:
    """``[x(a), y(b)] = rhs`` for one family pair and index pattern.

    Letters refer to index labels ``0, 1, 2`` of the pattern.
    """

    fam1: str
    fam2: str
    pattern: tuple
    status: str
    rhs: tuple = ()
    stamps: tuple = ()

    @property
    def key(self):
        return (self.fam1, self.fam2, self.pattern)

    @property
    def accepted(self) -> bool:
        return self.status == "ACCEPTED"

    def is_eps_eps(self) -> bool:
        return self.fam1 == self.fam2 == "eps"

    def is_opposite(self) -> bool:
        return opposite(self.fam1, self.fam2, self.pattern)

    def to_json(self):
        return {"x": [self.fam1, self.pattern[0], self.pattern[1]],
                "y": [self.fam2, self.pattern[2], self.pattern[3]],
                "status": self.status,
                "rhs": [{"fam": f, "i": i, "j": j, "param": e.text()} for f, i, j, e in self.rhs],
                "verified": {ring: count for ring, count in self.stamps}}

    @classmethod
    def from_json(cls, data) -> "RelationEntry":
        f1, i, j = data["x"]
        f2, k, l = data["y"]
        rhs = tuple((d["fam"], d["i"], d["j"], ParamExpr.parse(d["param"])) for d in data["rhs"])
        return cls(f1, f2, (i, j, k, l), data["status"], rhs, tuple(data.get("verified", {}).items()))


def opposite(fam1: str, fam2: str, pattern: tuple) -> bool:
    """Opposite-root pairs, whose commutator leaves the monomial ansatz."""
    i, j, k, l = pattern
    if fam1 == fam2 == "eps":
        return (i, j) == (l, k)
    if {fam1, fam2} == {"r", "l"}:
        return {i, j} == {k, l}
    return False


@dataclass
class RelationTable:
    entries: dict
    rings: tuple = ()

    def lookup(self, fam1: str, fam2: str, idx: Sequence[int]) -> RelationEntry | None:
        return self.entries.get((fam1, fam2, rg_pattern(idx)))

    def summary(self) -> dict:
        ee = [e for e in self.entries.values() if e.is_eps_eps()]
        mixed = [e for e in self.entries.values() if not e.is_eps_eps()]

        def frac(es):
            return sum(e.accepted for e in es), len(es)

        return {"eps_eps": frac(ee),
                "eps_eps_non_opposite": frac([e for e in ee if not e.is_opposite()]),
                "mixed": frac(mixed),
                "mixed_non_opposite": frac([e for e in mixed if not e.is_opposite()])}

    def to_json(self):
        return {"rings": [r.description for r, _ in self.rings],
                "entries": [e.to_json() for _, e in sorted(self.entries.items())]}

    @classmethod
    def from_json(cls, data, rings=()) -> "RelationTable":
        entries = {}
        for d in data["entries"]:
            e = RelationEntry.from_json(d)
            entries[e.key] = e
        table = cls(entries, tuple(rings))
        return table

    def reverify(self, rings, pairs: int = 200, seed: int = 0) -> list:
        """Re-check every accepted entry; returns the keys that fail."""
        bad = []
        for key, e in self.entries.items():
            if e.accepted and verify_entry(e, rings, pairs, seed) is None:
                bad.append(key)
        return bad


def session_rings():
    """The sample form rings used for derivation (with Lambda = Lambda_max)."""
    from .ring import make_ring
    specs = ["Zmod 6, trivial, lambda=1", "Zmod 6, trivial, lambda=-1",
             "GF 5, trivial, lambda=1", "GF 5, trivial, lambda=-1",
             "GaussMod 3, conj, lambda=1", "GaussMod 3, conj, lambda=i"]
    out = []
    for s in specs:
        R = make_ring(s)
        out.append((R, lambda_max(R)))
    return out


def _all_patterns(fam1: str, fam2: str) -> list[tuple]:
    pats = set()
    for idx in itertools.product(range(1, 4), repeat=4):
        if fam1 == "eps" and idx[0] == idx[1]:
            continue
        if fam2 == "eps" and idx[2] == idx[3]:
            continue
        pats.add(rg_pattern(idx))
    return sorted(pats)


def _primary(fam: str, p: int, q: int, n: int) -> tuple[int, int]:
    if fam == "eps":
        return p - 1, q - 1
    if fam == "r":
        return p - 1, n + q - 1
    return n + p - 1, q - 1


def _slots(labels: Sequence[int]) -> list[tuple]:
    idx = sorted({x + 1 for x in labels})
    out = []
    for fam in FAMILIES:
        for p in idx:
            for q in idx:
                if fam == "eps" and p == q:
                    continue
                if fam != "eps" and p > q:
                    continue
                out.append((fam, p, q))
    return out


def _letter_matrix(R, param, n, fam, i, j, a):
    M = [list(r) for r in identity(n, R, param).rows]
    _apply_right(R, M, n, GenSymbol(fam, i, j, a), param, "hermitian")
    return M


def _mat_mul(R, X, Y):
    N = len(X)
    return [[R.sum(R.mul(X[r][k], Y[k][c]) for k in range(N)) for c in range(N)] for r in range(N)]


def _mat_inv_letter(R, param, n, fam, i, j, a):
    return _letter_matrix(R, param, n, fam, i, j, R.neg(a))


def _is_id(M, R) -> bool:
    return all(M[r][c] == (R.one if r == c else R.zero) for r in range(len(M)) for c in range(len(M)))


def _commutator(R, param, n, x, y):
    X = _letter_matrix(R, param, n, *x)
    Y = _letter_matrix(R, param, n, *y)
    Xi = _mat_inv_letter(R, param, n, *x)
    Yi = _mat_inv_letter(R, param, n, *y)
    return _mat_mul(R, _mat_mul(R, _mat_mul(R, X, Y), Xi), Yi)


def _draw_pairs(R, param, x_sym, y_sym, count: int, rng: random.Random, exhaustive: bool):
    xs = generator_params(x_sym[0], x_sym[1], x_sym[2], R, param, "strict")
    ys = generator_params(y_sym[0], y_sym[1], y_sym[2], R, param, "strict")
    if not xs or not ys:
        return []
    pairs = [(rng.choice(xs), rng.choice(ys)) for _ in range(count)]
    if exhaustive and len(xs) * len(ys) <= 4096:
        pairs += list(itertools.product(xs, ys))
    return pairs


def _rhs_eval(R, param, n, rhs, a, b):
    M = [list(r) for r in identity(n, R, param).rows]
    for fam, i, j, e in rhs:
        v = e.evaluate(R, a, b)
        if fam != "eps" and i == j:
            if not diagonal_ok(R, param, fam, v):
                return None
        _apply_right(R, M, n, GenSymbol(fam, i + 1, j + 1, v), param, "hermitian")
    return M


def verify_entry(entry: RelationEntry, rings, pairs: int = 200, seed: int = 0):
    """Exact re-verification; returns per-ring pair counts or ``None``."""
    n = 3
    i, j, k, l = (x + 1 for x in entry.pattern)
    x_sym, y_sym = (entry.fam1, i, j), (entry.fam2, k, l)
    stamps = []
    for R, param in rings:
        rng = random.Random(f"{seed}:{R.description}:{entry.key}")
        draws = _draw_pairs(R, param, x_sym, y_sym, pairs, rng, exhaustive=True)
        for a, b in draws:
            C = _commutator(R, param, n, x_sym + (a,), y_sym + (b,))
            M = _rhs_eval(R, param, n, entry.rhs, a, b)
            if M is None or M != C:
                return None
        stamps.append((R.description, len(draws)))
    return tuple(stamps)


def _search(points, slots, exprs, depth):
    """Depth-first peel of generator letters off the commutators.

    ``points`` holds ``(R, param, a, b, M)`` with M the residual matrix.
    Yields tuples of ``(side, fam, p, q, expr)``.
    """
    n = 3
    if all(_is_id(M, R) for R, *_, M in points):
        yield ()
        return
    if depth == 0:
        return
    for fam, p, q in slots:
        r, c = _primary(fam, p, q, n)
        targets = [M[r][c] for *_, M in points]
        if not any(targets):
            continue
        for e in exprs:
            vals = [e.evaluate(R, a, b) for R, _, a, b, _ in points]
            if vals != targets:
                continue
            if fam != "eps" and p == q:
                if not all(diagonal_ok(R, prm, fam, v) for (R, prm, *_), v in zip(points, vals)):
                    continue
            for side in ("L", "R"):
                nxt = []
                for (R, prm, a, b, M), v in zip(points, vals):
                    Li = _letter_matrix(R, prm, n, fam, p, q, R.neg(v))
                    nxt.append((R, prm, a, b, _mat_mul(R, Li, M) if side == "L" else _mat_mul(R, M, Li)))
                for rest in _search(nxt, slots, exprs, depth - 1):
                    yield ((side, fam, p, q, e),) + rest


def _assemble(peeled) -> tuple:
    left = [x for x in peeled if x[0] == "L"]
    right = [x for x in peeled if x[0] == "R"]
    order = left + list(reversed(right))
    return tuple((fam, p - 1, q - 1, e) for _, fam, p, q, e in order)


def derive_entry(fam1: str, fam2: str, pattern: tuple, rings, max_len: int = 3,
                 max_degree: int = 2, seed: int = 0, pairs: int = 200,
                 points_per_ring: int = 6) -> RelationEntry:
    n = 3
    i, j, k, l = (x + 1 for x in pattern)
    x_sym, y_sym = (fam1, i, j), (fam2, k, l)
    rng = random.Random(f"derive:{seed}:{fam1}:{fam2}:{pattern}")
    points = []
    for R, param in rings:
        for a, b in _draw_pairs(R, param, x_sym, y_sym, points_per_ring, rng, exhaustive=False):
            points.append((R, param, a, b, _commutator(R, param, n, x_sym + (a,), y_sym + (b,))))
    if not points:
        return RelationEntry(fam1, fam2, pattern, "UNRESOLVED")
    slots = _slots(pattern)
    exprs = param_exprs(max_degree)
    for depth in range(max_len + 1):
        for peeled in _search(points, slots, exprs, depth):
            if len(peeled) != depth:
                continue
            cand = RelationEntry(fam1, fam2, pattern, "ACCEPTED", _assemble(peeled))
            stamps = verify_entry(cand, rings, pairs, seed)
            if stamps is not None:
                return RelationEntry(fam1, fam2, pattern, "ACCEPTED", cand.rhs, stamps)
    return RelationEntry(fam1, fam2, pattern, "UNRESOLVED")


def derive_relation_table(n: int = 3, rings=None, max_len: int = 3, max_degree: int = 2,
                          seed: int = 0, pairs: int = 200, families=FAMILIES) -> RelationTable:
    """Search, verify and record a commutator formula for every pattern."""
    if n < 3:
        raise ValueError("relation patterns need n >= 3")
    rings = tuple(rings or session_rings())
    entries = {}
    for fam1 in families:
        for fam2 in families:
            for pat in _all_patterns(fam1, fam2):
                e = derive_entry(fam1, fam2, pat, rings, max_len, max_degree, seed, pairs)
                entries[e.key] = e
    return RelationTable(entries, rings)


_DEFAULT_TABLE: RelationTable | None = None
TABLE_PATH = Path(__file__).with_name("data") / "relations.json"


def load_table(path=TABLE_PATH, rings=None, verify: bool = True) -> RelationTable:
    """Read a stored table; accepted entries are re-verified before use.

    An entry that fails re-verification is demoted to UNRESOLVED.
    """
    rings = tuple(rings or session_rings())
    table = RelationTable.from_json(json.loads(Path(path).read_text()), rings)
    if verify:
        for key in table.reverify(rings):
            e = table.entries[key]
            table.entries[key] = RelationEntry(e.fam1, e.fam2, e.pattern, "UNRESOLVED")
    return table


def default_table() -> RelationTable:
    """The shipped table (re-verified on load), or a fresh derivation."""
    global _DEFAULT_TABLE
    if _DEFAULT_TABLE is None:
        _DEFAULT_TABLE = load_table() if TABLE_PATH.exists() else derive_relation_table()
    return _DEFAULT_TABLE


# ---------------------------------------------------------------------------
# conjugation rewriting


def _instantiate(entry: RelationEntry, idx: Sequence[int], A, a, b) -> list[GenSymbol]:
    label_to_index = {}
    for lab, actual in zip(entry.pattern, idx):
        label_to_index.setdefault(lab, actual)
    return [GenSymbol(fam, label_to_index[p], label_to_index[q], e.evaluate(A, a, b))
            for fam, p, q, e in entry.rhs]


def _commutator_rhs(table: RelationTable, x: GenSymbol, y: GenSymbol, A) -> list[GenSymbol] | None:
    entry = table.lookup(x.fam, y.fam, (x.i, x.j, y.i, y.j))
    if entry is None or not entry.accepted:
        return None
    return _instantiate(entry, (x.i, x.j, y.i, y.j), A, x.param, y.param)


def _conj_one(table, eps: GenSymbol, g: GenSymbol, w: ElemWord, var: str, m: int,
              allow_split: bool = True) -> list[GenSymbol]:
    A = w.algebra
    if eps.param == A.zero or g.param == A.zero:
        return [g] if g.param != A.zero else []
    rhs = _commutator_rhs(table, eps, g, A)
    if rhs is not None:
        return [x for x in rhs if x.param != A.zero] + [g]
    if allow_split:
        split = _split_as_commutator(table, eps, g, w, var, m)
        if split is not None:
            u, v = split
            cu = _conj_one(table, eps, u, w, var, m, False)
            cv = _conj_one(table, eps, v, w, var, m, False)
            inv = lambda ls: [x.inverse(A) for x in reversed(ls)]  # noqa: E731
            return cu + cv + inv(cu) + inv(cv)
    raise UnresolvedRelation(f"no relation for {eps.fam}_{eps.i}{eps.j} against {g.fam}_{g.i}{g.j}")


def _split_as_commutator(table, eps: GenSymbol, g: GenSymbol, w: ElemWord, var: str, m: int):
    """Write ``g = [u, v]``, splitting the ``var``-adic valuation of ``g`` in half."""
    A = w.algebra
    if not isinstance(A, PolyRing):
        return None
    h = int(A.valuation(g.param, var)) // 2
    if h < max(m, 1):
        return None
    R = A.base
    n = w.n
    for entry in table.entries.values():
        if not entry.accepted or len(entry.rhs) != 1:
            continue
        fam, p, q, e = entry.rhs[0]
        if fam != g.fam or e.degree_in("a") != 1 or e.degree_in("b") != 1:
            continue
        labels = sorted(set(entry.pattern))
        # assign actual indices: p -> g.i, q -> g.j, the rest free
        for assign in itertools.permutations(range(1, n + 1), len(labels)):
            amap = dict(zip(labels, assign))
            if (amap[p], amap[q]) != (g.i, g.j):
                continue
            ui, uj, vi, vj = (amap[x] for x in entry.pattern)
            if _commutator_rhs(table, eps, GenSymbol(entry.fam1, ui, uj, A.one), A) is None:
                continue
            if _commutator_rhs(table, eps, GenSymbol(entry.fam2, vi, vj, A.one), A) is None:
                continue
            coef = e.evaluate(R, R.one, R.one)
            if not R.is_unit(coef):
                continue
            rest = A.scale(R.inverse(coef), A.divide_monomial(g.param, var, h))
            t = A.var(var, h)
            for a_val, b_val in ((rest if e.ea else A.conj(rest), t), (t, rest if e.eb else A.conj(rest))):
                u = GenSymbol(entry.fam1, ui, uj, a_val)
                v = GenSymbol(entry.fam2, vi, vj, b_val)
                ok = all(x.fam == "eps" or x.i != x.j or diagonal_ok(A, w.param, x.fam, x.param, w.mode)
                         for x in (u, v))
                if not ok:
                    continue
                got = _instantiate(entry, (ui, uj, vi, vj), A, a_val, b_val)
                if len(got) == 1 and got[0] == g:
                    return u, v
    return None


def conjugate_letter(eps, g: GenSymbol, w: ElemWord, table: RelationTable | None = None,
                     var: str = "X", m: int = 1) -> ElemWord:
    """Rewrite ``eps g eps^-1`` as a product of letters in ``(var^m)``.

    ``eps`` is a single letter or a word of letters; ``w`` supplies the
    algebra and form parameter.  The result is checked by evaluation.
    """
    table = table or default_table()
    A = w.algebra
    conj_letters = [eps] if isinstance(eps, GenSymbol) else lift_word(eps, A).letters()
    current = [g]
    for c in reversed(conj_letters):
        nxt = []
        for x in current:
            nxt.extend(_conj_one(table, c, x, w, var, m))
        current = nxt
    out = w.with_items(current)
    expect = w.with_items([Conj(w.with_items(conj_letters), w.with_items([g]))])
    if out.evaluate() != expect.evaluate():
        raise VerificationFailed("conjugation rewrite does not match")
    if isinstance(A, PolyRing):
        for x in current:
            if A.valuation(x.param, var) < m:
                raise VerificationFailed("rewritten letter not congruent to I")
    return out


# ---------------------------------------------------------------------------
# JSON


def word_to_json(w: ElemWord):
    A = w.algebra

    def param(x):
        return A.to_json(x) if isinstance(A, PolyRing) else A.label(x)

    out = []
    for it in w.items:
        if isinstance(it, GenSymbol):
            out.append({"fam": it.fam, "i": it.i, "j": it.j, "param": param(it.param)})
        else:
            out.append({"conj": word_to_json(it.conj), "inner": word_to_json(it.inner),
                        "conj_polynomial": isinstance(it.conj.algebra, PolyRing)})
    return out


def word_from_json(data, A, param: FormParam, n: int, mode: str = "strict") -> ElemWord:
    base = A.base if isinstance(A, PolyRing) else A

    def parse_param(x):
        return A.from_json(x) if isinstance(A, PolyRing) else A.element(x)

    items = []
    for d in data:
        if "conj" in d:
            conj_alg = A if d.get("conj_polynomial", False) else base
            items.append(Conj(word_from_json(d["conj"], conj_alg, param, n, mode),
                              word_from_json(d["inner"], A, param, n, mode)))
        else:
            if d["fam"] not in FAMILIES:
                raise ValueError(f"unknown family {d['fam']!r}")
            items.append(GenSymbol(d["fam"], int(d["i"]), int(d["j"]), parse_param(d["param"])))
    return ElemWord(A, param, n, tuple(items), mode)
