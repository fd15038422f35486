"""Sparse polynomials over a finite ring, with substitution homomorphisms.

A single :class:`PolyRing` carries a fixed variable tuple (``X, T, Y`` by
default); ``R[X]`` and ``R[X, T]`` are simply the polynomials that only
involve those variables.  The involution acts on coefficients and fixes
every variable.
"""

from __future__ import annotations

from typing import Callable, Mapping

from .errors import DegreeOverflow
from .ring import RingCtx

DEFAULT_VARS = ("X", "T", "Y")


class Poly:
    __slots__ = ("terms", "_hash")

    def __init__(self, terms: dict):
        self.terms = terms  # exponent tuple -> nonzero coefficient index
        self._hash = None

    def __eq__(self, other):
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self):
        return f"Poly({self.terms})"


class PolyRing:
    def __init__(self, base: RingCtx, variables=DEFAULT_VARS):
        self.base = base
        self.vars = tuple(variables)
        self.nvars = len(self.vars)
        self._zero_exp = (0,) * self.nvars
        self.zero = Poly({})
        self.one = self.const(base.one)
        self.lam = self.const(base.lam)

    def __repr__(self):
        return f"PolyRing({self.base.description!r}, {self.vars})"

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self.base == other.base and self.vars == other.vars

    def __hash__(self):
        return hash((self.base, self.vars))

    # -- constructors ---------------------------------------------------

    def const(self, c: int) -> Poly:
        return Poly({self._zero_exp: c} if c else {})

    def var(self, name: str, power: int = 1) -> Poly:
        exp = [0] * self.nvars
        exp[self.vars.index(name)] = power
        return Poly({tuple(exp): self.base.one})

    def monomial(self, c: int, **powers) -> Poly:
        exp = tuple(powers.get(v, 0) for v in self.vars)
        return Poly({exp: c} if c else {})

    def from_coeffs(self, coeffs, var: str = "X") -> Poly:
        """Univariate polynomial from a lowest-degree-first list of indices."""
        i = self.vars.index(var)
        terms = {}
        for k, c in enumerate(coeffs):
            if c:
                exp = [0] * self.nvars
                exp[i] = k
                terms[tuple(exp)] = c
        return Poly(terms)

    def coerce(self, x) -> Poly:
        return x if isinstance(x, Poly) else self.const(x)

    # -- arithmetic -----------------------------------------------------

    def add(self, p: Poly, q: Poly) -> Poly:
        R = self.base
        terms = dict(p.terms)
        for e, c in q.terms.items():
            v = R.add(terms.get(e, 0), c)
            if v:
                terms[e] = v
            else:
                terms.pop(e, None)
        return Poly(terms)

    def neg(self, p: Poly) -> Poly:
        R = self.base
        return Poly({e: R.neg(c) for e, c in p.terms.items()})

    def sub(self, p: Poly, q: Poly) -> Poly:
        return self.add(p, self.neg(q))

    def mul(self, p: Poly, q: Poly) -> Poly:
        if not p.terms or not q.terms:
            return self.zero
        R = self.base
        terms: dict = {}
        for e1, c1 in p.terms.items():
            row = R._mul[c1]
            for e2, c2 in q.terms.items():
                c = row[c2]
                if c:
                    e = tuple(a + b for a, b in zip(e1, e2))
                    v = R._add[terms.get(e, 0)][c]
                    if v:
                        terms[e] = v
                    else:
                        terms.pop(e, None)
        return Poly(terms)

    def scale(self, c: int, p: Poly) -> Poly:
        R = self.base
        terms = {}
        for e, x in p.terms.items():
            v = R.mul(c, x)
            if v:
                terms[e] = v
        return Poly(terms)

    def pow(self, p: Poly, k: int) -> Poly:
        r = self.one
        for _ in range(k):
            r = self.mul(r, p)
        return r

    def conj(self, p: Poly) -> Poly:
        R = self.base
        return Poly({e: R.conj(c) for e, c in p.terms.items()})

    def is_zero(self, p: Poly) -> bool:
        return not p.terms

    def eq(self, p: Poly, q: Poly) -> bool:
        return p.terms == q.terms

    def is_unit(self, p: Poly) -> bool:
        return self.is_constant(p) and self.base.is_unit(self.constant_term(p))

    # -- inspection -----------------------------------------------------

    def is_constant(self, p: Poly) -> bool:
        return all(e == self._zero_exp for e in p.terms)

    def constant_term(self, p: Poly) -> int:
        return p.terms.get(self._zero_exp, 0)

    def degree(self, p: Poly, var: str | None = None) -> int:
        if not p.terms:
            return -1
        if var is None:
            return max(sum(e) for e in p.terms)
        i = self.vars.index(var)
        return max(e[i] for e in p.terms)

    def valuation(self, p: Poly, var: str) -> float:
        """Largest ``v`` with ``p`` in ``(var^v)``; ``inf`` for zero."""
        if not p.terms:
            return float("inf")
        i = self.vars.index(var)
        return min(e[i] for e in p.terms)

    def variables_used(self, p: Poly) -> set:
        return {v for i, v in enumerate(self.vars) if any(e[i] for e in p.terms)}

    def coefficients(self, p: Poly, var: str = "X") -> list[int]:
        """Lowest-first coefficient list of a univariate polynomial."""
        i = self.vars.index(var)
        if any(e[j] for e in p.terms for j in range(self.nvars) if j != i):
            raise ValueError("polynomial is not univariate in " + var)
        deg = self.degree(p, var)
        out = [0] * (deg + 1)
        for e, c in p.terms.items():
            out[e[i]] = c
        return out

    def check_degree(self, p: Poly, cap: int | None) -> Poly:
        if cap is not None and p.terms and max(max(e) for e in p.terms) > cap:
            raise DegreeOverflow(f"degree exceeds cap {cap}")
        return p

    # -- homomorphisms --------------------------------------------------

    def subst(self, p: Poly, mapping: Mapping[str, Poly]) -> Poly:
        """Ring homomorphism sending each variable in ``mapping`` to a polynomial."""
        if not mapping:
            return p
        idx = [(self.vars.index(v), q) for v, q in mapping.items()]
        cache: dict = {}

        def power(i, q, k):
            key = (i, k)
            if key not in cache:
                cache[key] = self.pow(q, k)
            return cache[key]

        out = self.zero
        for e, c in p.terms.items():
            rest = list(e)
            term = None
            for i, q in idx:
                k = rest[i]
                rest[i] = 0
                f = power(i, q, k)
                term = f if term is None else self.mul(term, f)
            term = self.mul(term, Poly({tuple(rest): c}))
            out = self.add(out, term)
        return out

    def map_coeffs(self, p: Poly, fn: Callable[[int], int], target: "PolyRing") -> Poly:
        """Apply a base-ring map coefficientwise, landing in ``target``."""
        terms = {}
        for e, c in p.terms.items():
            v = fn(c)
            if v:
                terms[e] = v
        return Poly(terms)

    def divide_monomial(self, p: Poly, var: str, k: int) -> Poly:
        """Exact division by ``var^k`` (requires valuation >= k)."""
        i = self.vars.index(var)
        terms = {}
        for e, c in p.terms.items():
            if e[i] < k:
                raise ValueError("not divisible")
            f = list(e)
            f[i] -= k
            terms[tuple(f)] = c
        return Poly(terms)

    # -- serialization --------------------------------------------------

    def to_json(self, p: Poly):
        """Lowest-degree-first coefficient arrays, nested per variable in use."""
        R = self.base
        used = [v for v in self.vars if v in self.variables_used(p)] or [self.vars[0]]
        if len(used) == 1 and used[0] == "X":
            return [R.label(c) for c in self.coefficients(p, used[0])] if p.terms else [R.label(0)]
        if used == ["X", "T"]:
            ix, it = self.vars.index("X"), self.vars.index("T")
            dx, dt = self.degree(p, "X"), self.degree(p, "T")
            grid = [[R.label(0)] * (dt + 1) for _ in range(dx + 1)]
            for e, c in p.terms.items():
                grid[e[ix]][e[it]] = R.label(c)
            return grid
        return {"vars": list(self.vars),
                "terms": [[list(e), R.label(c)] for e, c in sorted(p.terms.items())]}

    def from_json(self, data, var: str = "X") -> Poly:
        R = self.base
        if isinstance(data, dict):
            return Poly({tuple(e): R.element(c) for e, c in data["terms"] if R.element(c)})
        depth = _depth(data) - _label_depth(R)
        if depth <= 0:
            return self.const(R.element(data))
        if depth == 1:
            return self.from_coeffs([R.element(c) for c in data], var)
        ix, it = self.vars.index("X"), self.vars.index("T")
        terms = {}
        for a, row in enumerate(data):
            for b, c in enumerate(row):
                v = R.element(c)
                if v:
                    exp = [0] * self.nvars
                    exp[ix], exp[it] = a, b
                    terms[tuple(exp)] = v
        return Poly(terms)

    def format(self, p: Poly) -> str:
        if not p.terms:
            return "0"
        parts = []
        for e, c in sorted(p.terms.items()):
            mono = "*".join(f"{v}^{k}" if k > 1 else v for v, k in zip(self.vars, e) if k)
            lab = self.base.label(c)
            parts.append(f"{lab}*{mono}" if mono else f"{lab}")
        return " + ".join(parts)


def _label_depth(R: RingCtx) -> int:
    return _depth(R.label(0))


def _depth(x) -> int:
    if isinstance(x, list):
        return 1 + (_depth(x[0]) if x else 0)
    return 0
