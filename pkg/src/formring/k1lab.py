"""Finite group enumeration and desk-scale K1 experiments.

Matrices are numpy arrays of element indices.  Closures run breadth-first
with whole frontiers multiplied by each generator at once; the element
store is kept sorted by a packed key so membership is a binary search.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import CapExceeded, TooLarge, VerificationFailed
from .formparam import FormParam
from .quadgroup import all_generators, elem, embed_index, slot_position
from .ring import RingCtx, ideal_elements

DEFAULT_CAP = 4_000_000
BRUTE_LIMIT = 10 ** 8


# ---------------------------------------------------------------------------
# vectorized arithmetic


class MatOps:
    """Batched matrix arithmetic over a finite ring."""

    def __init__(self, R: RingCtx, N: int):
        self.R = R
        self.N = N
        self.q = R.size
        self.add = R.add_table.astype(np.int64)
        self.mul = R.mul_table.astype(np.int64)
        self.conj = R.conj_table.astype(np.int64)
        self.modular = R.is_zmod
        self.dtype = np.uint8 if self.q <= 256 else np.uint16
        width = N * N
        self.int_keys = self.q ** width < 2 ** 62
        if self.int_keys:
            self.powers = np.array([self.q ** k for k in range(width - 1, -1, -1)], dtype=np.int64)

    def identity(self) -> np.ndarray:
        M = np.zeros((self.N, self.N), dtype=self.dtype)
        np.fill_diagonal(M, self.R.one)
        return M

    def matmul(self, A: np.ndarray, G: np.ndarray) -> np.ndarray:
        """``A @ G`` for a batch ``A`` (B,N,N) and ``G`` (N,N) or (B,N,N)."""
        if self.modular:
            return (A.astype(np.int64) @ G.astype(np.int64) % self.q).astype(self.dtype)
        A64 = A.astype(np.int64)
        G64 = G.astype(np.int64)
        out = np.zeros(np.broadcast_shapes(A.shape[:-1] + (G.shape[-1],)), dtype=np.int64)
        for k in range(self.N):
            out = self.add[out, self.mul[A64[..., :, k, None], G64[..., None, k, :]]]
        return out.astype(self.dtype)

    def matvec(self, G: np.ndarray, V: np.ndarray) -> np.ndarray:
        """``G v`` for every row ``v`` of ``V`` (B,N)."""
        return self.matmul(V[:, None, :], G.T)[:, 0, :]

    def keys(self, A: np.ndarray) -> np.ndarray:
        flat = A.reshape(A.shape[0], -1)
        if self.int_keys:
            return flat.astype(np.int64) @ self.powers
        flat = np.ascontiguousarray(flat.astype(np.uint16 if self.dtype == np.uint16 else np.uint8))
        return flat.view(np.dtype((np.void, flat.shape[1] * flat.itemsize))).ravel()

    def vec_keys(self, V: np.ndarray) -> np.ndarray:
        p = np.array([self.q ** k for k in range(V.shape[1] - 1, -1, -1)], dtype=np.int64)
        return V.astype(np.int64) @ p

    def inverse_gq(self, M: np.ndarray) -> np.ndarray:
        """``H^-1 M* H`` (valid inside GQ)."""
        n = self.N // 2
        R = self.R
        H = np.zeros((self.N, self.N), dtype=self.dtype)
        Hinv = np.zeros_like(H)
        for i in range(n):
            H[i, n + i] = R.one
            H[n + i, i] = R.lam
            Hinv[i, n + i] = R.lam_bar
            Hinv[n + i, i] = R.one
        star = self.conj[M.astype(np.int64)].swapaxes(-1, -2).astype(self.dtype)
        return self.matmul(self.matmul(Hinv[None], star), H) if M.ndim == 3 else \
            self.matmul(self.matmul(Hinv, star), H)


def to_array(M, dtype=np.uint8) -> np.ndarray:
    return np.array(M.rows, dtype=dtype)


# ---------------------------------------------------------------------------
# group stores


@dataclass
class GroupEnum:
    """A finite matrix group stored as key-sorted arrays."""

    ring: RingCtx
    n: int
    generators: list
    keys: np.ndarray
    elements: np.ndarray
    complete: bool = True
    seconds: float = 0.0
    levels: list = field(default_factory=list)

    @property
    def order(self) -> int:
        return len(self.keys)

    def __len__(self):
        return self.order

    def ops(self) -> MatOps:
        return MatOps(self.ring, 2 * self.n)

    def index_of(self, keys: np.ndarray) -> np.ndarray:
        """Position of each key in the store, ``-1`` when absent."""
        pos = np.searchsorted(self.keys, keys)
        pos = np.minimum(pos, len(self.keys) - 1)
        found = self.keys[pos] == keys
        return np.where(found, pos, -1)

    def contains(self, mats: np.ndarray) -> np.ndarray:
        return self.index_of(self.ops().keys(mats)) >= 0

    def __iter__(self):
        return (tuple(tuple(int(x) for x in row) for row in M) for M in self.elements)


def _merge(store_keys, store_els, new_keys, new_els):
    keys = np.concatenate([store_keys, new_keys])
    els = np.concatenate([store_els, new_els])
    order = np.argsort(keys, kind="stable")
    return keys[order], els[order]


def closure(gens, R: RingCtx, n: int, cap: int = DEFAULT_CAP, inverses: bool = True,
            start=None, chunk: int = 200_000) -> GroupEnum:
    """Breadth-first closure of ``gens`` under right multiplication."""
    t0 = time.perf_counter()
    ops = MatOps(R, 2 * n)
    gens = [np.asarray(g, dtype=ops.dtype) for g in gens]
    if inverses:
        inv = [ops.inverse_gq(g) for g in gens]
        gens = gens + inv
    if gens:
        gk, first = np.unique(ops.keys(np.stack(gens)), return_index=True)
        gens = [gens[i] for i in sorted(first)]
    seed = np.asarray(start, dtype=ops.dtype) if start is not None else ops.identity()[None]
    keys, idx = np.unique(ops.keys(seed), return_index=True)
    els = seed[idx]
    frontier = els
    levels = [len(els)]
    while len(frontier):
        new_keys, new_els = [], []
        for lo in range(0, len(frontier), chunk):
            block = frontier[lo:lo + chunk]
            for g in gens:
                prod = ops.matmul(block, g)
                k = ops.keys(prod)
                k, first = np.unique(k, return_index=True)
                prod = prod[first]
                pos = np.searchsorted(keys, k)
                pos = np.minimum(pos, len(keys) - 1)
                fresh = keys[pos] != k
                new_keys.append(k[fresh])
                new_els.append(prod[fresh])
        if not new_keys:
            break
        k = np.concatenate(new_keys)
        e = np.concatenate(new_els)
        k, first = np.unique(k, return_index=True)
        e = e[first]
        if len(keys) + len(k) > cap:
            keys, els = _merge(keys, els, k, e)
            raise CapExceeded(f"closure exceeded cap {cap}",
                              GroupEnum(R, n, gens, keys, els, False, time.perf_counter() - t0, levels))
        keys, els = _merge(keys, els, k, e)
        frontier = e
        levels.append(len(e))
    return GroupEnum(R, n, gens, keys, els, True, time.perf_counter() - t0, levels)


def eq_generators(R: RingCtx, param: FormParam, n: int, mode: str = "strict") -> list:
    return [to_array(elem(f, i, j, a, n, R, param, mode)) for f, i, j, a in
            all_generators(n, R, param, mode, canonical=True)]


def relative_generators(R: RingCtx, param: FormParam, n: int, ideal) -> list:
    """Elementary generators whose parameter lies in ``ideal``."""
    ideal = set(ideal)
    return [to_array(elem(f, i, j, a, n, R, param)) for f, i, j, a in
            all_generators(n, R, param, canonical=True) if a in ideal]


def enum_eq(R: RingCtx, param: FormParam, n: int, cap: int = DEFAULT_CAP) -> GroupEnum:
    return closure(eq_generators(R, param, n), R, n, cap)


def normal_closure(sub_gens, conj_gens, R: RingCtx, n: int, cap: int = DEFAULT_CAP) -> GroupEnum:
    """Smallest subgroup containing ``sub_gens`` and normalized by ``conj_gens``."""
    ops = MatOps(R, 2 * n)
    conj = [np.asarray(c, dtype=ops.dtype) for c in conj_gens]
    conj = conj + [ops.inverse_gq(c) for c in conj]
    S = [np.asarray(s, dtype=ops.dtype) for s in sub_gens]
    while True:
        H = closure(S, R, n, cap)
        if not S:
            return H
        stack = np.stack(S)
        missing = []
        for c in conj:
            cj = ops.matmul(ops.matmul(c[None], stack), ops.inverse_gq(c))
            out = ~H.contains(cj)
            missing.extend(cj[out])
        if not missing:
            return H
        arr = np.stack(missing)
        _, first = np.unique(ops.keys(arr), return_index=True)
        S = S + [arr[i] for i in sorted(first)]


# ---------------------------------------------------------------------------
# brute-force GQ


def _gram(R: RingCtx, n: int) -> np.ndarray:
    N = 2 * n
    H = np.zeros((N, N), dtype=np.int64)
    for i in range(n):
        H[i, n + i] = R.one
        H[n + i, i] = R.lam
    return H


def _all_vectors(R: RingCtx, N: int) -> np.ndarray:
    q = R.size
    grid = np.indices((q,) * N).reshape(N, -1).T
    return grid.astype(np.int64)


def _hform(ops: MatOps, W: np.ndarray, V: np.ndarray) -> np.ndarray:
    """``sum_t W[b,t] V[c,t]`` for all (b, c) pairs, via the ring tables."""
    out = np.zeros((W.shape[0], V.shape[0]), dtype=np.int64)
    for t in range(W.shape[1]):
        out = ops.add[out, ops.mul[W[:, t, None], V[None, :, t]]]
    return out


def _row_times_gram(ops: MatOps, U: np.ndarray, H: np.ndarray) -> np.ndarray:
    """Rows ``u* H`` for each row ``u`` of ``U``."""
    Uc = ops.conj[U]
    out = np.zeros_like(Uc)
    N = U.shape[1]
    for t in range(N):
        for s in range(N):
            if H[s, t]:
                out[:, t] = ops.add[out[:, t], ops.mul[Uc[:, s], H[s, t]]]
    return out


def _fform_diag(ops: MatOps, V: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(V.shape[0], dtype=np.int64)
    for i in range(n):
        out = ops.add[out, ops.mul[ops.conj[V[:, i]], V[:, n + i]]]
    return out


def enum_gq_bruteforce(R: RingCtx, param: FormParam, n: int, chunk: int = 1 << 16) -> GroupEnum:
    """Every matrix of GQ_2n(R, Lambda), found column by column.

    Column ``k`` must satisfy ``h(c_a, c_k) = H[a, k]`` for ``a <= k`` and
    ``f(c_k, c_k)`` in Lambda; preserving ``h`` forces invertibility.
    """
    t0 = time.perf_counter()
    N = 2 * n
    if R.size ** (N * N) > BRUTE_LIMIT:
        raise TooLarge(f"|R|^(4n^2) = {R.size}^{N * N} exceeds {BRUTE_LIMIT}")
    ops = MatOps(R, N)
    H = _gram(R, n)
    V = _all_vectors(R, N)
    lam_ok = np.zeros(R.size, dtype=bool)
    lam_ok[list(param.elements)] = True
    V = V[lam_ok[_fform_diag(ops, V, n)]]
    VH = _row_times_gram(ops, V, H)
    # h(v, v) for every candidate
    hvv = np.zeros(len(V), dtype=np.int64)
    for t in range(N):
        hvv = ops.add[hvv, ops.mul[VH[:, t], V[:, t]]]
    partial = np.zeros((1, 0), dtype=np.int64)  # rows of chosen candidate indices
    levels = []
    for k in range(N):
        ok_self = hvv == H[k, k]
        ext = []
        for lo in range(0, len(partial), chunk):
            block = partial[lo:lo + chunk]
            mask = np.broadcast_to(ok_self, (len(block), len(V))).copy()
            for a in range(k):
                prev = VH[block[:, a]]
                mask &= _hform(ops, prev, V) == H[a, k]
            b, c = np.nonzero(mask)
            ext.append(np.concatenate([block[b], c[:, None]], axis=1))
        partial = np.concatenate(ext) if ext else np.zeros((0, k + 1), dtype=np.int64)
        levels.append(len(partial))
    mats = V[partial].swapaxes(1, 2).astype(ops.dtype)  # columns -> matrix
    keys = ops.keys(mats)
    order = np.argsort(keys, kind="stable")
    return GroupEnum(R, n, [], keys[order], mats[order], True, time.perf_counter() - t0, levels)


def enum_gq_literal(R: RingCtx, param: FormParam, n: int, limit: int = 1 << 20) -> GroupEnum:
    """Filter every matrix with the defining conditions (tiny cases only)."""
    N = 2 * n
    total = R.size ** (N * N)
    if total > limit:
        raise TooLarge(f"{total} matrices exceed the literal-filter limit {limit}")
    ops = MatOps(R, N)
    H = _gram(R, n).astype(ops.dtype)
    lam_ok = np.zeros(R.size, dtype=bool)
    lam_ok[list(param.elements)] = True
    kept = []
    step = 1 << 16
    for lo in range(0, total, step):
        idx = np.arange(lo, min(total, lo + step), dtype=np.int64)
        digits = np.stack([(idx // R.size ** k) % R.size for k in range(N * N - 1, -1, -1)], axis=1)
        M = digits.reshape(-1, N, N).astype(ops.dtype)
        star = ops.conj[M.astype(np.int64)].swapaxes(1, 2).astype(ops.dtype)
        lhs = ops.matmul(ops.matmul(star, H), M)
        good = np.all(lhs.reshape(len(M), -1) == H.reshape(1, -1), axis=1)
        cols = M.astype(np.int64).swapaxes(1, 2).reshape(-1, N)
        fq = _fform_diag(ops, cols, n).reshape(len(M), N)
        good &= np.all(lam_ok[fq], axis=1)
        kept.append(M[good])
    mats = np.concatenate(kept)
    keys = ops.keys(mats)
    order = np.argsort(keys, kind="stable")
    return GroupEnum(R, n, [], keys[order], mats[order], True)


# ---------------------------------------------------------------------------
# K1


@dataclass
class K1Report:
    ring: str
    lam: object
    Lambda: list
    n: int
    gq_order: int
    eq_order: int
    coset_count: int
    representatives: list
    normal: bool
    abelian: bool | None
    invariants: list | None
    gq_source: str
    lower_bound_only: bool
    below_stable_range: bool
    coset_of: np.ndarray = field(repr=False, default=None)
    gq: GroupEnum = field(repr=False, default=None)
    eq: GroupEnum = field(repr=False, default=None)
    table: list = field(repr=False, default=None)

    def to_json(self):
        R = self.gq.ring
        return {"ring": self.ring, "lambda": self.lam, "Lambda": self.Lambda, "n": self.n,
                "gq_order": self.gq_order, "eq_order": self.eq_order,
                "coset_count": self.coset_count,
                "representatives": [[[R.label(int(x)) for x in row] for row in M]
                                    for M in self.representatives],
                "normal": self.normal, "abelian": self.abelian, "invariants": self.invariants,
                "gq_source": self.gq_source, "lower_bound_only": self.lower_bound_only,
                "below_stable_range": self.below_stable_range}


STRATEGIES = ("auto", "bruteforce", "closure")


def stable_range_ok(R: RingCtx, n: int) -> bool:
    return 2 * n >= max(6, 2 * R.dimension + 2)


def obtain_gq(R: RingCtx, param: FormParam, n: int, strategy: str = "auto",
              cap: int = DEFAULT_CAP, eq: GroupEnum | None = None):
    """GQ by brute force when allowed, else the EQ closure as a lower bound."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {', '.join(STRATEGIES)}")
    if strategy in ("auto", "bruteforce"):
        try:
            return enum_gq_bruteforce(R, param, n), "bruteforce", False
        except TooLarge:
            if strategy == "bruteforce":
                raise
    eq = eq if eq is not None else enum_eq(R, param, n, cap)
    return eq, "closure", True


def coset_decomposition(G: GroupEnum, E: GroupEnum):
    """Left cosets ``gE``: (coset id per element of G, representatives)."""
    ops = G.ops()
    coset_of = np.full(G.order, -1, dtype=np.int64)
    reps = []
    first = int(G.index_of(ops.keys(ops.identity()[None]))[0])  # identity represents EQ
    while True:
        free = np.nonzero(coset_of < 0)[0]
        if not len(free):
            break
        g = G.elements[first if not reps and first >= 0 else free[0]]
        coset = ops.matmul(g[None].repeat(E.order, 0), E.elements) if E.order else g[None]
        idx = G.index_of(ops.keys(coset))
        if np.any(idx < 0):
            raise ValueError("EQ is not contained in GQ")
        coset_of[idx] = len(reps)
        reps.append(g)
    return coset_of, reps


def is_normal(E: GroupEnum, conjugators, eq_gens) -> bool:
    ops = E.ops()
    if not eq_gens:
        return True
    S = np.stack(eq_gens)
    for x in conjugators:
        xi = ops.inverse_gq(x)
        for a, b in ((x, xi), (xi, x)):
            conj = ops.matmul(ops.matmul(a[None].repeat(len(S), 0), S), b)
            if not np.all(E.contains(conj)):
                return False
    return True


def abelian_invariants(table: np.ndarray, identity: int) -> list[int]:
    """Invariant factors of a finite abelian group from its Cayley table."""
    m = len(table)
    if m == 1:
        return []

    def power(x, e):
        r = identity
        for _ in range(e):
            r = table[r, x]
        return r

    primes, k, rem = [], 2, m
    while k * k <= rem:
        while rem % k == 0:
            primes.append(k)
            rem //= k
        k += 1
    if rem > 1:
        primes.append(rem)
    parts: dict = {}
    for p in sorted(set(primes)):
        e = primes.count(p)
        # counts[j] = #{x : x^(p^j) = 1} = p^(sum_i min(j, e_i))
        counts = []
        for j in range(e + 1):
            counts.append(sum(power(x, p ** j) == identity for x in range(m)))
        logs = [round(np.log(c) / np.log(p)) for c in counts]
        # number of cyclic factors of order >= p^j is logs[j] - logs[j-1]
        ge = [logs[j] - logs[j - 1] for j in range(1, e + 1)] + [0]
        parts[p] = [j for j in range(1, e + 1) for _ in range(ge[j - 1] - ge[j])]
    # combine primary parts into invariant factors
    width = max(len(v) for v in parts.values())
    factors = [1] * width
    for p, exps in parts.items():
        for idx, ex in enumerate(sorted(exps, reverse=True)):
            factors[width - 1 - idx] *= p ** ex
    return sorted(f for f in factors if f > 1)


def k1_compute(R: RingCtx, param: FormParam, n: int, strategy: str = "auto",
               cap: int = DEFAULT_CAP) -> K1Report:
    eq_gens = eq_generators(R, param, n)
    E = closure(eq_gens, R, n, cap)
    G, source, lower = obtain_gq(R, param, n, strategy, cap, E)
    coset_of, reps = coset_decomposition(G, E)
    normal = is_normal(E, reps, eq_gens)
    abelian, invariants, table = None, None, None
    if normal:
        ops = G.ops()
        m = len(reps)
        table = np.zeros((m, m), dtype=np.int64)
        R_arr = np.stack(reps)
        for a in range(m):
            prod = ops.matmul(R_arr[a][None].repeat(m, 0), R_arr)
            table[a] = coset_of[G.index_of(ops.keys(prod))]
        abelian = bool(np.all(table == table.T))
        ident = int(coset_of[G.index_of(ops.keys(ops.identity()[None]))[0]])
        invariants = abelian_invariants(table, ident) if abelian else None
    return K1Report(R.description, R.label(R.lam), param.labels, n, G.order, E.order,
                    len(reps), reps, normal, abelian, invariants, source, lower,
                    not stable_range_ok(R, n), coset_of, G, E, table)


# ---------------------------------------------------------------------------
# stabilization


def embed_array(M: np.ndarray, n: int, slot: str = "outer", one: int = 1) -> np.ndarray:
    """Batched ``stab_embed``: identity on the inserted hyperbolic pair."""
    p = slot_position(n, slot)
    m = n + 1
    pos = [(k if k < p else k + 1) + (0 if side == 0 else m)
           for side in (0, 1) for k in range(n)]
    batch = M.ndim == 3
    M3 = M if batch else M[None]
    out = np.zeros((len(M3), 2 * m, 2 * m), dtype=M.dtype)
    for d in range(2 * m):
        out[:, d, d] = one
    out[np.ix_(range(len(M3)), pos, pos)] = M3
    return out if batch else out[0]


@dataclass
class StabMapReport:
    n: int
    source: K1Report
    target: K1Report
    mapping: list
    generators_to_generators: bool
    eq_into_eq: bool
    well_defined: bool
    injective: bool | None  # None when either level is only a lower bound
    surjective: bool | None
    predicted_surjective: bool
    predicted_iso: bool

    def to_json(self):
        return {"n": self.n, "source_cosets": self.source.coset_count,
                "target_cosets": self.target.coset_count, "map": self.mapping,
                "generators_to_generators": self.generators_to_generators,
                "eq_into_eq": self.eq_into_eq, "well_defined": self.well_defined,
                "injective": self.injective, "surjective": self.surjective,
                "predicted_surjective": self.predicted_surjective,
                "predicted_iso": self.predicted_iso,
                "lower_bound_only": self.source.lower_bound_only or self.target.lower_bound_only}


def stab_map_test(R: RingCtx, param: FormParam, n: int, slot: str = "outer",
                  strategy: str = "auto", cap: int = DEFAULT_CAP) -> StabMapReport:
    low = k1_compute(R, param, n, strategy, cap)
    high = k1_compute(R, param, n + 1, strategy, cap)
    one = R.one
    # generators map to generators with shifted indices
    gens_ok = True
    for f, i, j, a in all_generators(n, R, param, canonical=True):
        lhs = embed_array(to_array(elem(f, i, j, a, n, R, param)), n, slot, one)
        rhs = to_array(elem(f, embed_index(n, slot, i), embed_index(n, slot, j), a, n + 1, R, param))
        gens_ok &= bool(np.array_equal(lhs, rhs))
    emb_eq = embed_array(low.eq.elements, n, slot, one)
    eq_into = bool(np.all(high.eq.contains(emb_eq)))
    # sigma^-1 tau in EQ implies the same for the embeddings, so the coset
    # map is well defined exactly when EQ lands in EQ
    well = eq_into
    mapping, injective, surjective = None, None, None
    if not (low.lower_bound_only or high.lower_bound_only):
        ops_hi = MatOps(R, 2 * n + 2)
        idx = high.gq.index_of(ops_hi.keys(embed_array(low.gq.elements, n, slot, one)))
        if np.any(idx < 0):
            raise VerificationFailed("embedded GQ does not land in GQ")
        images = high.coset_of[idx]
        mapping = []
        for c in range(low.coset_count):
            vals = np.unique(images[low.coset_of == c])
            well &= len(vals) == 1
            mapping.append(int(vals[0]))
        injective = well and len(set(mapping)) == len(mapping)
        surjective = well and len(set(mapping)) == high.coset_count
    return StabMapReport(n, low, high, mapping, gens_ok, eq_into, well, injective, surjective,
                         stable_range_ok(R, n + 1), stable_range_ok(R, n))


# ---------------------------------------------------------------------------
# orbits and stabilizers


def is_unimodular(R: RingCtx, v) -> bool:
    return R.one in ideal_elements(R, [int(x) for x in v])


def unimodular_set(R: RingCtx, n: int, ideal) -> np.ndarray:
    """Unimodular vectors congruent to ``e_2n`` modulo ``ideal``."""
    N = 2 * n
    ideal = set(ideal)
    target = np.zeros(N, dtype=np.int64)
    target[N - 1] = R.one
    V = _all_vectors(R, N)
    diff = R.add_table[V, R.neg_table[target][None, :]]
    in_ideal = np.isin(diff, list(ideal)).all(axis=1)
    out = [v for v in V[in_ideal] if is_unimodular(R, v)]
    return np.array(out, dtype=np.int64).reshape(-1, N)


@dataclass
class OrbitReport:
    n: int
    ideal: list
    orbit_size: int
    um_size: int
    transitive: bool
    in_hypothesis: bool
    counterexample: list | None
    frontier_sizes: list

    def to_json(self):
        return {"n": self.n, "ideal": self.ideal, "orbit_size": self.orbit_size,
                "um_size": self.um_size, "transitive": self.transitive,
                "hypothesis": "inside" if self.in_hypothesis else "outside-hypothesis",
                "counterexample": self.counterexample, "frontier_sizes": self.frontier_sizes}


def vector_orbit(gens, R: RingCtx, n: int, start: np.ndarray, cap: int = DEFAULT_CAP):
    """Orbit of ``start`` under the group generated by ``gens``."""
    ops = MatOps(R, 2 * n)
    gens = [np.asarray(g, dtype=np.int64) for g in gens]
    gens = gens + [ops.inverse_gq(g.astype(ops.dtype)).astype(np.int64) for g in gens]
    seen_keys = ops.vec_keys(start[None])
    orbit = start[None].astype(np.int64)
    frontier = orbit
    sizes = [1]
    while len(frontier):
        cand = np.concatenate([ops.matvec(g, frontier).astype(np.int64) for g in gens]) \
            if gens else np.zeros((0, 2 * n), dtype=np.int64)
        k, first = np.unique(ops.vec_keys(cand), return_index=True)
        fresh = ~np.isin(k, seen_keys)
        frontier = cand[first[fresh]]
        if not len(frontier):
            break
        seen_keys = np.concatenate([seen_keys, k[fresh]])
        orbit = np.concatenate([orbit, frontier])
        sizes.append(len(frontier))
        if len(orbit) > cap:
            raise CapExceeded("orbit exceeded cap", orbit)
    order = np.argsort(ops.vec_keys(orbit))
    return orbit[order], sizes


def relative_eq_generators(R: RingCtx, param: FormParam, n: int, ideal, cap: int = DEFAULT_CAP):
    """Generators of the relative elementary group EQ(I) (normal closure in EQ)."""
    ideal = frozenset(ideal)
    full = eq_generators(R, param, n)
    rel = relative_generators(R, param, n, ideal)
    if ideal == frozenset(R.elements) or not rel:
        return rel
    H = normal_closure(rel, full, R, n, cap)
    return list(H.elements)


def unimodular_orbit_test(R: RingCtx, param: FormParam, n: int, ideal=None,
                          cap: int = DEFAULT_CAP) -> OrbitReport:
    ideal = sorted(ideal if ideal is not None else R.elements)
    gens = relative_eq_generators(R, param, n, ideal, cap)
    start = np.zeros(2 * n, dtype=np.int64)
    start[-1] = R.one
    orbit, sizes = vector_orbit(gens, R, n, start, cap)
    um = unimodular_set(R, n, ideal)
    ops = MatOps(R, 2 * n)
    ok_keys = ops.vec_keys(orbit)
    um_keys = ops.vec_keys(um)
    missing = um[~np.isin(um_keys, ok_keys)]
    extra = orbit[~np.isin(ok_keys, um_keys)]
    counter = None
    if len(missing):
        counter = [R.label(int(x)) for x in missing[0]]
    elif len(extra):
        counter = [R.label(int(x)) for x in extra[0]]
    transitive = not len(missing) and not len(extra)
    return OrbitReport(n, [R.label(x) for x in ideal], len(orbit), len(um), transitive,
                       stable_range_ok(R, n), counter, sizes)


@dataclass
class StabilizerReport:
    n: int
    checked: int
    all_pass: bool
    counterexample: list | None
    lower_bound_only: bool

    def to_json(self):
        return {"n": self.n, "checked": self.checked, "all_pass": self.all_pass,
                "counterexample": self.counterexample, "lower_bound_only": self.lower_bound_only}


def stabilizer_decomp_test(R: RingCtx, param: FormParam, n: int, strategy: str = "auto",
                           cap: int = DEFAULT_CAP) -> StabilizerReport:
    """Every Delta fixing ``e_2n`` lies in EQ_2n times the embedded GQ_2n-2."""
    if n < 2:
        raise ValueError("the stabilizer decomposition needs n >= 2")
    top = k1_compute(R, param, n, strategy, cap)
    low_gq, _, low_lower = obtain_gq(R, param, n - 1, strategy, cap)
    G = top.gq
    fixes = G.elements[:, :, -1]
    target = np.zeros(2 * n, dtype=fixes.dtype)
    target[-1] = R.one
    stab = np.all(fixes == target, axis=1)
    ops = G.ops()
    emb = embed_array(low_gq.elements, n - 1, "outer", R.one)
    emb_idx = G.index_of(ops.keys(emb))
    if np.any(emb_idx < 0):
        raise ValueError("embedded GQ does not land in GQ")
    reachable = set(top.coset_of[emb_idx].tolist())
    bad = [i for i in np.nonzero(stab)[0] if int(top.coset_of[i]) not in reachable]
    counter = None
    if bad:
        counter = [[R.label(int(x)) for x in row] for row in G.elements[bad[0]]]
    return StabilizerReport(n, int(stab.sum()), not bad, counter, top.lower_bound_only or low_lower)


@dataclass
class WhiteheadReport:
    n: int
    gq_order: int
    eq_order: int
    commutator_order: int
    equal_eq: bool
    lower_bound_only: bool

    def to_json(self):
        return {"n": self.n, "gq_order": self.gq_order, "eq_order": self.eq_order,
                "commutator_order": self.commutator_order,
                "commutator_equals_eq": self.equal_eq, "label": "EXPERIMENT",
                "lower_bound_only": self.lower_bound_only}


def whitehead_test(R: RingCtx, param: FormParam, n: int, strategy: str = "auto",
                   cap: int = DEFAULT_CAP) -> WhiteheadReport:
    """Commutator subgroup of GQ_2n against EQ_2n at a fixed level."""
    rep = k1_compute(R, param, n, strategy, cap)
    ops = rep.gq.ops()
    gens = eq_generators(R, param, n) + [np.asarray(r) for r in rep.representatives]
    comms = []
    for a in gens:
        ai = ops.inverse_gq(a)
        for b in gens:
            bi = ops.inverse_gq(b)
            comms.append(ops.matmul(ops.matmul(ops.matmul(a[None], b), ai), bi)[0])
    C = normal_closure(comms, gens, R, n, cap)
    same = C.order == rep.eq.order and bool(np.all(rep.eq.contains(C.elements)))
    return WhiteheadReport(n, rep.gq_order, rep.eq_order, C.order, same, rep.lower_bound_only)
