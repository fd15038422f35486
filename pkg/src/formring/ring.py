"""Finite commutative rings with involution, ideals and localizations.

Elements are plain ``int`` indices into the ring's canonical element list;
index 0 is always zero.  Arithmetic goes through precomputed tables, so all
operations are exact and every invariant can be checked exhaustively.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import NilpotentElement, NotACover, RingSpecError

MAX_RING_SIZE = 1024


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


class RingCtx:
    """A finite commutative ring with involution and a central unit lambda.

    ``labels[x]`` is the canonical (JSON-friendly) representative of the
    element with index ``x``; for ``Zmod``/``GF`` rings the index equals
    the least nonnegative residue.
    """

    def __init__(self, kind, description, labels, add, mul, conj, one,
                 lam=None, involution="trivial", dimension=0, modulus=None,
                 parent=None):
        self.kind = kind
        self.description = description
        self.labels = list(labels)
        self.size = len(self.labels)
        self.add_table = np.asarray(add, dtype=np.int32)
        self.mul_table = np.asarray(mul, dtype=np.int32)
        self.conj_table = np.asarray(conj, dtype=np.int32)
        self.neg_table = np.argmin(self.add_table, axis=1).astype(np.int32)
        self._add = self.add_table.tolist()
        self._mul = self.mul_table.tolist()
        self._conj = self.conj_table.tolist()
        self._neg = self.neg_table.tolist()
        self.zero = 0
        self.one = one
        self.involution = involution
        self.dimension = dimension
        self.modulus = modulus
        self.parent = parent
        self._index = {self._key(lab): i for i, lab in enumerate(self.labels)}
        self.lam = one if lam is None else lam

    # -- construction helpers -------------------------------------------

    @staticmethod
    def _key(label):
        if isinstance(label, list):
            return tuple(RingCtx._key(x) for x in label)
        return label

    def with_lambda(self, lam: int) -> "RingCtx":
        """Copy of this ring carrying a different lambda (an element index)."""
        other = object.__new__(RingCtx)
        other.__dict__.update(self.__dict__)
        other.lam = lam
        other.description = _replace_lambda(self.description, other.label(other.lam))
        other.check_lambda()
        return other

    # -- arithmetic -----------------------------------------------------

    def add(self, a: int, b: int) -> int:
        return self._add[a][b]

    def sub(self, a: int, b: int) -> int:
        return self._add[a][self._neg[b]]

    def neg(self, a: int) -> int:
        return self._neg[a]

    def mul(self, a: int, b: int) -> int:
        return self._mul[a][b]

    def conj(self, a: int) -> int:
        return self._conj[a]

    def pow(self, a: int, k: int) -> int:
        r = self.one
        for _ in range(k):
            r = self._mul[r][a]
        return r

    def sum(self, items: Iterable[int]) -> int:
        r = 0
        for x in items:
            r = self._add[r][x]
        return r

    def is_zero(self, a) -> bool:
        return a == 0

    def eq(self, a, b) -> bool:
        return a == b

    @property
    def lam_bar(self) -> int:
        return self._conj[self.lam]

    @cached_property
    def units(self) -> dict:
        """Map unit -> inverse."""
        inv = {}
        for a in range(self.size):
            row = self._mul[a]
            for b in range(self.size):
                if row[b] == self.one:
                    inv[a] = b
                    break
        return inv

    def is_unit(self, a: int) -> bool:
        return a in self.units

    def inverse(self, a: int) -> int:
        try:
            return self.units[a]
        except KeyError:
            raise ZeroDivisionError(f"{self.label(a)} is not a unit") from None

    def is_nilpotent(self, a: int) -> bool:
        x = a
        for _ in range(self.size + 1):
            if x == 0:
                return True
            x = self._mul[x][a]
        return False

    @property
    def elements(self) -> range:
        return range(self.size)

    @property
    def is_zmod(self) -> bool:
        return self.kind in ("Zmod", "GF")

    # -- labels ---------------------------------------------------------

    def label(self, a: int):
        lab = self.labels[a]
        if isinstance(lab, tuple):
            return [list(x) if isinstance(x, tuple) else x for x in lab]
        return lab

    def element(self, value) -> int:
        """Parse an element from its label (int, ``[a, b]``, ``"a+bi"``...)."""
        if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
            if self.is_zmod:
                return int(value) % self.size
            return self._from_int(int(value))
        if isinstance(value, str):
            return self.element(_parse_scalar(value))
        key = self._key(list(value)) if isinstance(value, (list, tuple)) else value
        if self.kind == "GaussMod":
            n = self.modulus
            key = (key[0] % n, key[1] % n)
        try:
            return self._index[key]
        except KeyError:
            raise RingSpecError(f"{value!r} is not an element of {self.description}") from None

    def _from_int(self, v: int) -> int:
        acc, one, base = 0, self.one, self.one
        if v < 0:
            base = self._neg[one]
            v = -v
        for _ in range(v % (self.characteristic or 1) if self.characteristic else v):
            acc = self._add[acc][base]
        return acc

    @cached_property
    def characteristic(self) -> int:
        x, k = self.one, 1
        while x != 0:
            x = self._add[x][self.one]
            k += 1
        return k

    # -- validation -----------------------------------------------------

    def check_involution(self) -> None:
        c, A, M = self.conj_table, self.add_table, self.mul_table
        if not np.array_equal(c[c], np.arange(self.size)):
            raise RingSpecError("involution is not self-inverse")
        if c[self.one] != self.one:
            raise RingSpecError("involution does not fix 1")
        if not np.array_equal(c[A], A[c][:, c]):
            raise RingSpecError("involution is not additive")
        if not np.array_equal(c[M], M[c][:, c]):
            raise RingSpecError("involution is not multiplicative")

    def check_lambda(self) -> None:
        if self.mul(self.lam, self.lam_bar) != self.one:
            raise RingSpecError(
                f"lambda={self.label(self.lam)} violates lambda*conj(lambda)=1")

    def subring(self, elements: Sequence[int], one: int, kind: str, description: str) -> "RingCtx":
        """The ring ``elements`` (closed under +, *, conj) with identity ``one``."""
        elements = sorted(elements)
        pos = {x: i for i, x in enumerate(elements)}
        sub = np.array(elements)
        add = np.vectorize(pos.__getitem__)(self.add_table[np.ix_(sub, sub)]) if len(sub) else []
        mul = np.vectorize(pos.__getitem__)(self.mul_table[np.ix_(sub, sub)])
        conj = [pos[self._conj[x]] for x in elements]
        return RingCtx(kind, description, [self.labels[x] for x in elements],
                       add, mul, conj, pos[one], lam=pos[self._mul[self.lam][one]],
                       involution=self.involution, dimension=self.dimension,
                       parent=self)

    def __repr__(self):
        return f"RingCtx({self.description!r})"

    def __eq__(self, other):
        return isinstance(other, RingCtx) and self.description == other.description and self.size == other.size

    def __hash__(self):
        return hash((self.description, self.size))


# ---------------------------------------------------------------------------
# ring spec grammar

_SPEC_RE = re.compile(
    r"^\s*(?P<ring>.+?)\s*,\s*(?P<inv>trivial|conj)\s*,\s*lambda\s*=\s*(?P<lam>.+?)\s*$")


def _parse_scalar(text: str):
    text = text.strip().replace(" ", "")
    if text.startswith("["):
        import json
        return json.loads(text)
    m = re.fullmatch(r"([+-]?\d+)?(?:([+-])(\d*)i)?", text)
    if m and text:
        a = int(m.group(1)) if m.group(1) else 0
        if m.group(2) is None:
            return a
        b = int(m.group(3)) if m.group(3) else 1
        return [a, -b if m.group(2) == "-" else b]
    m = re.fullmatch(r"([+-]?\d*)i", text)
    if m:
        b = m.group(1)
        return [0, -1 if b == "-" else (int(b) if b not in ("", "+") else 1)]
    raise RingSpecError(f"cannot parse element {text!r}")


def _replace_lambda(description: str, lam) -> str:
    lam_txt = _format_scalar(lam)
    return re.sub(r"lambda\s*=.*$", f"lambda={lam_txt}", description)


def _format_scalar(lab) -> str:
    if isinstance(lab, list) and len(lab) == 2 and all(isinstance(x, int) for x in lab):
        return f"{lab[0]}+{lab[1]}i"
    if isinstance(lab, list):
        import json
        return json.dumps(lab)
    return str(lab)


def _parse_poly(text: str) -> list[int]:
    """Integer polynomial in x, lowest-degree-first coefficient list."""
    text = text.replace(" ", "").replace("-", "+-")
    coeffs: dict[int, int] = {}
    for term in filter(None, text.split("+")):
        m = re.fullmatch(r"(-?\d*)\*?(x(?:\^(\d+))?)?", term)
        if not m:
            raise RingSpecError(f"bad polynomial term {term!r}")
        c_txt, xpart, e_txt = m.groups()
        if xpart is None:
            c, e = int(c_txt), 0
        else:
            c = -1 if c_txt == "-" else (int(c_txt) if c_txt else 1)
            e = int(e_txt) if e_txt else 1
        coeffs[e] = coeffs.get(e, 0) + c
    deg = max(coeffs)
    return [coeffs.get(i, 0) for i in range(deg + 1)]


def _base_ring(text: str, involution: str) -> RingCtx:
    parts = text.split()
    if not parts:
        raise RingSpecError("empty ring description")
    kind = parts[0]
    if kind in ("Zmod", "GF", "GaussMod"):
        if len(parts) != 2 or not parts[1].isdigit():
            raise RingSpecError(f"expected '{kind} <n>', got {text!r}")
        n = int(parts[1])
        if n < 2:
            raise RingSpecError("modulus must be at least 2")
        if kind == "GF" and not _is_prime(n):
            raise RingSpecError(f"GF {n}: only prime fields are supported")
        if kind in ("Zmod", "GF"):
            if involution != "trivial":
                raise RingSpecError(f"{kind} only carries the trivial involution")
            r = np.arange(n)
            return RingCtx(kind, f"{kind} {n}", list(range(n)),
                           (r[:, None] + r[None, :]) % n, (r[:, None] * r[None, :]) % n,
                           r, 1 % n, modulus=n)
        if n * n > MAX_RING_SIZE:
            raise RingSpecError("ring too large")
        a = np.repeat(np.arange(n), n)
        b = np.tile(np.arange(n), n)
        idx = lambda x, y: (x % n) * n + (y % n)  # noqa: E731
        add = idx(a[:, None] + a[None, :], b[:, None] + b[None, :])
        mul = idx(a[:, None] * a[None, :] - b[:, None] * b[None, :],
                  a[:, None] * b[None, :] + b[:, None] * a[None, :])
        conj = idx(a, -b) if involution == "conj" else np.arange(n * n)
        labels = [(int(x), int(y)) for x, y in zip(a, b)]
        return RingCtx("GaussMod", f"GaussMod {n}", labels, add, mul, conj, idx(1, 0),
                       involution=involution, modulus=n)
    if kind == "PolyQuot":
        # PolyQuot <base words...> <monic poly>
        if len(parts) < 4:
            raise RingSpecError("expected 'PolyQuot <base> <monic poly>'")
        poly_txt = parts[-1]
        base = _base_ring(" ".join(parts[1:-1]), involution)
        f = _parse_poly(poly_txt)
        if f[-1] != 1:
            raise RingSpecError("PolyQuot modulus must be monic")
        deg = len(f) - 1
        if deg < 1:
            raise RingSpecError("PolyQuot modulus must have positive degree")
        B = base.size
        size = B ** deg
        if size > 256:
            raise RingSpecError("ring too large")
        fb = [base.element(c) for c in f]
        # element index: coefficient c_0 is the most significant digit
        labels = []
        coeff_lists = []
        for x in range(size):
            digits = []
            y = x
            for _ in range(deg):
                digits.append(y % B)
                y //= B
            cs = digits[::-1]
            coeff_lists.append(cs)
            labels.append(tuple(base.labels[c] for c in cs))
        enc = {tuple(cs): i for i, cs in enumerate(coeff_lists)}

        def reduce(prod):
            prod = list(prod)
            for k in range(len(prod) - 1, deg - 1, -1):
                c = prod[k]
                if c:
                    for t in range(deg + 1):
                        prod[k - deg + t] = base.sub(prod[k - deg + t], base.mul(c, fb[t]))
            return tuple(prod[:deg])

        add = np.zeros((size, size), dtype=np.int32)
        mul = np.zeros((size, size), dtype=np.int32)
        for i, ci in enumerate(coeff_lists):
            for j, cj in enumerate(coeff_lists):
                add[i, j] = enc[tuple(base.add(x, y) for x, y in zip(ci, cj))]
                prod = [0] * (2 * deg - 1)
                for p, x in enumerate(ci):
                    if x:
                        for q, y in enumerate(cj):
                            prod[p + q] = base.add(prod[p + q], base.mul(x, y))
                mul[i, j] = enc[reduce(prod)]
        conj = [enc[tuple(base.conj(c) for c in cs)] for cs in coeff_lists]
        one = enc[tuple([base.one] + [0] * (deg - 1))]
        r = RingCtx("PolyQuot", f"PolyQuot {base.description} {poly_txt}", labels,
                    add, mul, conj, one, involution=involution, parent=base)
        r.base_ring = base
        return r
    raise RingSpecError(f"unsupported ring kind {kind!r}")


def make_ring(spec: str) -> RingCtx:
    """Build a ring from ``'<ring>, trivial|conj, lambda=<value>'``.

    >>> make_ring("Zmod 6, trivial, lambda=-1").lam
    5
    """
    m = _SPEC_RE.match(spec)
    if not m:
        raise RingSpecError(f"malformed ring spec {spec!r}")
    ring = _base_ring(m.group("ring"), m.group("inv"))
    ring.check_involution()
    lam_val = _parse_scalar(m.group("lam"))
    if ring.kind == "PolyQuot" and not isinstance(lam_val, list) or (
            ring.kind == "PolyQuot" and isinstance(lam_val, list) and ring.base_ring.kind == "GaussMod"
            and len(lam_val) == 2 and all(isinstance(v, int) for v in lam_val)):
        lam = ring._from_int(lam_val) if isinstance(lam_val, int) else _embed_base(ring, lam_val)
    else:
        lam = ring.element(lam_val)
    ring.lam = lam
    ring.description = f"{ring.description}, {ring.involution}, lambda={_format_scalar(ring.label(lam))}"
    ring.check_lambda()
    return ring


def _embed_base(ring: RingCtx, value) -> int:
    b = ring.base_ring.element(value)
    deg = len(ring.labels[0])
    lab = tuple([ring.base_ring.labels[b]] + [ring.base_ring.labels[0]] * (deg - 1))
    return ring._index[lab]


def all_lambdas(ring: RingCtx) -> list[int]:
    """Every lambda with lambda * conj(lambda) = 1, in index order."""
    return [a for a in ring.elements if ring.mul(a, ring.conj(a)) == ring.one]


# ---------------------------------------------------------------------------
# ideals


def ideal_elements(ring: RingCtx, gens: Iterable[int]) -> frozenset:
    """Elements of the ideal generated by ``gens``."""
    multiples = {ring.mul(g, r) for g in gens for r in ring.elements}
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for m in multiples:
                y = ring.add(x, m)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)


@dataclass(frozen=True)
class Ideal:
    ring: RingCtx
    generators: tuple
    elements: frozenset = field(default=None, compare=False, repr=False)
    # maximal ideals carry their residue-field surjection (element -> class)
    residue: dict | None = field(default=None, compare=False, repr=False)
    residue_field_size: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.elements is None:
            object.__setattr__(self, "elements", ideal_elements(self.ring, self.generators))

    def __contains__(self, a) -> bool:
        return a in self.elements

    def __len__(self):
        return len(self.elements)

    def is_unit_ideal(self) -> bool:
        return self.ring.one in self.elements

    @property
    def labels(self) -> list:
        return sorted((self.ring.label(x) for x in self.elements), key=str)

    def contains_all(self, items) -> bool:
        return all(x in self.elements for x in items)


def principal_ideal(ring: RingCtx, s: int) -> Ideal:
    return Ideal(ring, (s,))


def _minimal_generators(ring: RingCtx, elements) -> tuple:
    gens: list[int] = []
    current = frozenset({0})
    for x in sorted(elements):
        if x not in current:
            gens.append(x)
            current = ideal_elements(ring, gens)
    return tuple(gens)


def idempotents(ring: RingCtx) -> list[int]:
    return [e for e in ring.elements if ring.mul(e, e) == e]


def maximal_ideals(ring: RingCtx) -> list[Ideal]:
    """All maximal ideals of a finite commutative ring.

    Uses the decomposition ``R = prod R e_j`` over primitive idempotents; the
    maximal ideals are the preimages of the unique maximal ideal of each
    local factor ``R e_j``.
    """
    ids = [e for e in idempotents(ring) if e != 0]
    primitive = [e for e in ids if not any(f != e and ring.mul(e, f) == f for f in ids)]
    result = []
    for e in sorted(primitive):
        local = sorted({ring.mul(x, e) for x in ring.elements})
        local_units = {x for x in local if any(ring.mul(x, y) == e for y in local)}
        m = frozenset(x for x in ring.elements if ring.mul(x, e) not in local_units)
        # residue map: x -> coset of x e modulo m e
        me = {ring.mul(x, e) for x in m}
        classes: dict[int, int] = {}
        residue = {}
        for x in ring.elements:
            coset = min(ring.add(ring.mul(x, e), y) for y in me)
            residue[x] = classes.setdefault(coset, len(classes))
        result.append(Ideal(ring, _minimal_generators(ring, m), m, residue, len(classes)))
    return result


# ---------------------------------------------------------------------------
# localization


@dataclass(frozen=True)
class LocalizationMap:
    """``R -> R_s`` realized as ``R -> R e`` where ``(s^k) = (e)``."""

    source: RingCtx
    target: RingCtx
    image: tuple
    s: int
    k: int
    e: int

    def __call__(self, a: int) -> int:
        return self.image[a]

    @cached_property
    def fibers(self) -> dict:
        out: dict[int, list[int]] = {}
        for a, b in enumerate(self.image):
            out.setdefault(b, []).append(a)
        return out

    def preimage(self, b: int) -> int:
        """Least canonical representative of the fiber over ``b``."""
        return self.fibers[b][0]

    @cached_property
    def kernel(self) -> frozenset:
        return frozenset(self.fibers[0])

    @property
    def is_identity(self) -> bool:
        return self.target.size == self.source.size


def localize_at(ring: RingCtx, s) -> LocalizationMap:
    """Localization at a non-nilpotent ``s`` of a finite ring."""
    prev = ideal_elements(ring, [ring.one])
    k = 0
    power = ring.one
    while True:
        nxt_power = ring.mul(power, s)
        nxt = ideal_elements(ring, [nxt_power])
        if nxt == prev:
            break
        prev, power, k = nxt, nxt_power, k + 1
    if prev == frozenset({0}):
        raise NilpotentElement(f"{ring.label(s)} is nilpotent in {ring.description}")
    stable = prev
    e = next(x for x in sorted(stable)
             if ring.mul(x, x) == x and all(ring.mul(x, y) == y for y in stable))
    if ring.conj(e) != e:
        raise ValueError("localization idempotent is not fixed by the involution")
    target = ring.subring(stable, e, "Localization",
                          f"({ring.description})[1/{_format_scalar(ring.label(s))}]")
    pos = {x: i for i, x in enumerate(sorted(stable))}
    image = tuple(pos[ring.mul(a, e)] for a in ring.elements)
    return LocalizationMap(ring, target, image, s, k, e)


# ---------------------------------------------------------------------------
# partition of unity


def partition_of_unity(ring: RingCtx, s_list: Sequence, l: int) -> list[int]:
    """Elements ``b_i`` in ``(s_i^l)`` with ``sum b_i = 1``.

    The lexicographically least solution is returned.
    """
    ideals = [sorted(ideal_elements(ring, [ring.pow(s, l)])) for s in s_list]
    r = len(ideals)
    # reach[i] = set of sums achievable by b_i + ... + b_{r-1}
    reach = [set() for _ in range(r + 1)]
    reach[r] = {0}
    for i in range(r - 1, -1, -1):
        reach[i] = {ring.add(b, t) for b in ideals[i] for t in reach[i + 1]}
    if ring.one not in reach[0]:
        raise NotACover(f"<s_i^{l}> is not the unit ideal")
    out, remaining = [], ring.one
    for i in range(r):
        for b in ideals[i]:
            if ring.sub(remaining, b) in reach[i + 1]:
                out.append(b)
                remaining = ring.sub(remaining, b)
                break
    return out


def ideal_witness(ring: RingCtx, g: int, b: int) -> int:
    """Least ``c`` with ``b = g c``."""
    for c in ring.elements:
        if ring.mul(g, c) == b:
            return c
    raise ValueError(f"{ring.label(b)} is not a multiple of {ring.label(g)}")
