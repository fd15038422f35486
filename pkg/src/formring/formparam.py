"""Lambda-form parameters on finite rings and on truncated polynomial rings."""

from __future__ import annotations

from dataclasses import dataclass, field
from .errors import CapExceeded, GeneratorOutsideLambdaMax
from .poly import Poly, PolyRing
from .ring import LocalizationMap, RingCtx


def additive_closure(ring: RingCtx, gens) -> frozenset:
    seen = {0}
    frontier = [0]
    gens = [g for g in set(gens) if g]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = ring.add(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)


def _conjugation_closed(ring: RingCtx, elems: frozenset) -> bool:
    return all(ring.mul(ring.mul(ring.conj(x), a), x) in elems
               for a in elems for x in ring.elements)


@dataclass(frozen=True)
class FormParam:
    """A lambda-form parameter: an additive subgroup between the bounds."""

    ring: RingCtx
    elements: frozenset
    generators: tuple = field(default=(), compare=False)

    def __contains__(self, a) -> bool:
        return a in self.elements

    def __len__(self):
        return len(self.elements)

    @property
    def lam(self) -> int:
        return self.ring.lam

    @property
    def labels(self) -> list:
        return [self.ring.label(x) for x in sorted(self.elements)]

    def coset(self, a: int) -> "LambdaCoset":
        R = self.ring
        return LambdaCoset(self, min(R.add(a, x) for x in self.elements))

    def is_min(self) -> bool:
        return self.elements == lambda_min(self.ring).elements

    def is_max(self) -> bool:
        return self.elements == lambda_max(self.ring).elements

    def describe(self) -> str:
        if self.is_max():
            return "max"
        if self.is_min():
            return "min"
        return "gens:" + str([self.ring.label(g) for g in self.generators])


@dataclass(frozen=True)
class LambdaCoset:
    param: FormParam
    representative: int

    def __add__(self, other: "LambdaCoset") -> "LambdaCoset":
        return self.param.coset(self.param.ring.add(self.representative, other.representative))

    def is_zero(self) -> bool:
        return self.representative == 0


def lambda_max(ring: RingCtx) -> FormParam:
    R = ring
    elems = frozenset(a for a in R.elements if a == R.neg(R.mul(R.lam, R.conj(a))))
    return FormParam(R, elems, tuple(sorted(elems)))


def lambda_min(ring: RingCtx) -> FormParam:
    R = ring
    elems = frozenset(R.sub(a, R.mul(R.lam, R.conj(a))) for a in R.elements)
    return FormParam(R, elems, ())


def form_param_closure(ring: RingCtx, gens) -> FormParam:
    """Smallest form parameter containing ``gens``."""
    R = ring
    gens = tuple(gens)
    lmax = lambda_max(R).elements
    for g in gens:
        if g not in lmax:
            raise GeneratorOutsideLambdaMax(f"{R.label(g)} is not in Lambda_max")
    current = additive_closure(R, set(gens) | lambda_min(R).elements)
    while True:
        images = {R.mul(R.mul(R.conj(x), a), x) for a in current for x in R.elements}
        nxt = additive_closure(R, current | images)
        if nxt == current:
            return FormParam(R, current, gens)
        current = nxt


def enumerate_form_params(ring: RingCtx, cap: int = 10_000) -> list[FormParam]:
    """Every form parameter of ``ring`` (for its lambda), sorted by size."""
    lmin = form_param_closure(ring, ())
    lmax = lambda_max(ring).elements
    found = {lmin.elements: lmin}
    frontier = [lmin]
    while frontier:
        nxt = []
        for param in frontier:
            for a in sorted(lmax - param.elements):
                cand = form_param_closure(ring, param.generators + (a,))
                if cand.elements not in found:
                    if len(found) >= cap:
                        raise CapExceeded("too many form parameters", list(found.values()))
                    found[cand.elements] = cand
                    nxt.append(cand)
        frontier = nxt
    return sorted(found.values(), key=lambda p: (len(p.elements), sorted(p.elements)))


def form_param_from_spec(ring: RingCtx, spec) -> FormParam:
    """Parse ``min`` | ``max`` | ``gens:[...]`` (or a list of generators)."""
    if isinstance(spec, str):
        text = spec.strip()
        if text == "min":
            return form_param_closure(ring, ())
        if text == "max":
            return lambda_max(ring)
        if text.startswith("gens:"):
            import json
            spec = json.loads(text[5:])
        else:
            raise ValueError(f"bad Lambda spec {spec!r}")
    return form_param_closure(ring, [ring.element(g) for g in spec])


def induce_localized(param: FormParam, loc: LocalizationMap) -> FormParam:
    """The form parameter on the localization generated by the image."""
    return form_param_closure(loc.target, sorted({loc(a) for a in param.elements}))


# ---------------------------------------------------------------------------
# Lambda[X] membership


@dataclass(frozen=True)
class PolyMembership:
    member: bool
    degree_bound: int
    # the closure is computed inside the degree-D truncation only
    truncated: bool = True

    def __bool__(self):
        return self.member


def _truncate(P: PolyRing, p: Poly, var: str, D: int) -> Poly:
    i = P.vars.index(var)
    return Poly({e: c for e, c in p.terms.items() if e[i] <= D})


def truncated_poly_param(param: FormParam, D: int, var: str = "X", cap: int = 200_000) -> set:
    """Fixed-point closure of Lambda u Lambda_min(R[X]) in degrees <= D.

    Closed under addition and ``p -> conj(x) p x`` truncated at degree D.
    By bi-additivity modulo Lambda_min it suffices to conjugate by the
    monomials ``c X^k``.
    """
    R = param.ring
    P = PolyRing(R, (var,))
    key = lambda p: tuple(sorted(p.terms.items()))  # noqa: E731
    gens = [P.const(a) for a in param.elements if a]
    for c in R.elements:
        d = R.sub(c, R.mul(R.lam, R.conj(c)))
        for k in range(D + 1):
            if d:
                gens.append(P.monomial(d, **{var: k}))
    conjugators = [(c, k) for c in R.elements if c for k in range(D // 2 + 1)]

    def close(generators):
        seen = {(): P.zero}
        frontier = [P.zero]
        uniq = {key(g): g for g in generators if g.terms}
        while frontier:
            nxt = []
            for x in frontier:
                for g in uniq.values():
                    y = P.add(x, g)
                    ky = key(y)
                    if ky not in seen:
                        seen[ky] = y
                        nxt.append(y)
                        if len(seen) > cap:
                            raise CapExceeded("Lambda[X] truncation too large")
            frontier = nxt
        return seen

    current = close(gens)
    gens = list({key(g): g for g in gens}.values())
    while True:
        images = []
        for p in list(current.values()):
            for c, k in conjugators:
                q = P.scale(R.mul(R.conj(c), c), p)
                q = P.mul(q, P.monomial(R.one, **{var: 2 * k}))
                images.append(_truncate(P, q, var, D))
        new = list({key(q): q for q in images if key(q) not in current}.values())
        if not new:
            return set(current)
        gens += new
        current = close(gens)


def poly_param_member(param: FormParam, p: Poly, D: int, P: PolyRing | None = None,
                      var: str = "X") -> PolyMembership:
    """Decide ``p in Lambda[X]`` within the degree-``D`` truncation."""
    P = P or PolyRing(param.ring)
    if P.degree(p, var) > D:
        raise ValueError("polynomial degree exceeds the bound")
    i = P.vars.index(var)
    items = tuple(sorted(((e[i],), c) for e, c in p.terms.items()))
    return PolyMembership(items in truncated_poly_param(param, D, var), D)


def poly_in_lambda(param: FormParam, P: PolyRing, p: Poly) -> bool:
    """Exact membership in ``Lambda[X]`` (variables fixed by the involution).

    Coefficients of square monomials must lie in Lambda, all others in
    Lambda_min: ``conj(x) a x`` puts ``conj(c) a c`` on squares and cross
    terms of the form ``y - lam conj(y)`` elsewhere.  The truncated closure
    in ``poly_param_member`` is checked against this in the test-suite.
    """
    lmin = lambda_min(param.ring).elements
    return all(c in (param.elements if all(e % 2 == 0 for e in exps) else lmin)
               for exps, c in p.terms.items())


def all_form_rings(ring: RingCtx):
    """Every (lambda, Lambda) pair admissible on ``ring``."""
    from .ring import all_lambdas
    for lam in all_lambdas(ring):
        R = ring.with_lambda(lam)
        for param in enumerate_form_params(R):
            yield R, param

