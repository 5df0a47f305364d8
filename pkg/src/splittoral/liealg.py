"""Structure-constant Lie algebras and the generic operations on them.

An algebra is a dense table C with C[i, j, k] = coefficient of b_k in
[b_i, b_j] (packed field elements).  The adjoint map follows ad_x(w) =
[x, w]; on a standard Chevalley basis the eigenvalue of ad_{h} on X_alpha
is then the negative of the root value, which only ever surfaces through
negation-closed eigenvalue multisets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .ff import field_embedding, field_make, is_squarefree, splits_over_field


class LieAlgebraError(Exception):
    pass


class CartanSearchError(LieAlgebraError):
    """Randomized Cartan subalgebra search exhausted its retry budget."""


class StructAlgebra:
    """Lie algebra given by structure constants over a Field."""

    def __init__(self, F, table, provenance=None, check=True):
        self.F = F
        self.table = np.asarray(table, dtype=np.int64)
        if self.table.ndim != 3 or len(set(self.table.shape)) != 1:
            raise ValueError("structure table must be d x d x d")
        self.dim = self.table.shape[0]
        self.provenance = provenance or {}
        self._ad_flat = None
        if check:
            self._check_antisymmetry()

    def _check_antisymmetry(self):
        d = self.dim
        idx = np.arange(d)
        if self.table[idx, idx].any():
            raise ValueError("[b_i, b_i] must be zero")
        neg = self.F.neg_arr(self.table.swapaxes(0, 1))
        if not np.array_equal(self.table, neg):
            raise ValueError("structure table is not antisymmetric")

    # -- basic operations ---------------------------------------------------

    def bracket(self, u, w):
        u = np.asarray(u, dtype=np.int64)
        w = np.asarray(w, dtype=np.int64)
        if u.shape != (self.dim,) or w.shape != (self.dim,):
            raise ValueError("vector dimension mismatch")
        T = self._left_slab(u)
        return self.F.matmul(w[None, :], T)[0]

    def _left_slab(self, u):
        """Matrix T[j, k] = coefficient of b_k in [u, b_j]."""
        F = self.F
        nz = np.nonzero(u)[0]
        if len(nz) == 0:
            return np.zeros((self.dim, self.dim), dtype=np.int64)
        blocks = F.mul_arr(u[nz][:, None, None], self.table[nz])
        return F.sum_arr(blocks, axis=0)

    def ad(self, x):
        """Matrix of w -> [x, w] acting on column vectors."""
        return self._left_slab(np.asarray(x, dtype=np.int64)).T.copy()

    _BATCH_SLAB_MAX = 1 << 22

    def left_slabs(self, rows):
        """Stacked slabs T[a, j, k] = coefficient of b_k in [rows_a, b_j]."""
        rows = np.asarray(rows, dtype=np.int64)
        r = rows.shape[0]
        d = self.dim
        if r == 0:
            return np.zeros((0, d, d), dtype=np.int64)
        if self.F.k == 1 or r * d * d * d <= self._BATCH_SLAB_MAX:
            return self.F.matmul(rows, self.table.reshape(d, d * d)).reshape(r, d, d)
        return np.stack([self._left_slab(u) for u in rows])

    def ad_flat(self):
        """(d^2, d) matrix whose column i is vec(ad(e_i))."""
        if self._ad_flat is None:
            d = self.dim
            cols = [self.table[i].T.reshape(-1) for i in range(d)]
            self._ad_flat = np.stack(cols, axis=1)
        return self._ad_flat

    def random_vector(self, rng, nonzero=False):
        while True:
            v = np.array(
                [rng.randrange(self.F.q) for _ in range(self.dim)], dtype=np.int64
            )
            if not nonzero or v.any():
                return v

    def __repr__(self):
        return f"StructAlgebra(dim={self.dim}, F={self.F!r})"


def from_sparse(F, dim, entries, provenance=None):
    """Build an algebra from sparse (i, j, k, coeff) with i < j.

    The antisymmetric completion is filled in; coefficients are packed
    field elements.
    """
    table = np.zeros((dim, dim, dim), dtype=np.int64)
    for (i, j, k, c) in entries:
        if not (0 <= i < j < dim and 0 <= k < dim):
            raise ValueError(f"bad sparse entry ({i},{j},{k})")
        table[i, j, k] = c % F.q if isinstance(c, (int, np.integer)) else c
        table[j, i, k] = F.neg(int(table[i, j, k]))
    return StructAlgebra(F, table, provenance=provenance)


def to_sparse(L):
    """Sparse (i, j, k, coeff) entries with i < j."""
    out = []
    d = L.dim
    for i in range(d):
        for j in range(i + 1, d):
            for k in np.nonzero(L.table[i, j])[0]:
                out.append((i, j, int(k), int(L.table[i, j, k])))
    return out


@dataclass
class SubspaceHandle:
    """A subspace of an algebra, optionally bracket-closed, with pullback.

    For descent nodes (centralizer quotients) `alg` carries the induced
    structure constants and `phi` maps its coordinates back to the
    original algebra; for plain subspaces `phi` is just the basis matrix.
    """

    parent: StructAlgebra
    subspace: la.Subspace
    alg: StructAlgebra | None = None
    phi: np.ndarray | None = None
    root: StructAlgebra | None = None

    @property
    def dim(self):
        return self.alg.dim if self.alg is not None else self.subspace.dim

    def map_to_root(self, F, v):
        return F.matmul(np.asarray(v, dtype=np.int64)[None, :], self.phi)[0]


def node_full(L):
    """Descent node for the whole algebra."""
    return SubspaceHandle(
        parent=L,
        subspace=la.full_subspace(L.dim),
        alg=L,
        phi=la.eye(L.dim),
        root=L,
    )


# ---------------------------------------------------------------------------
# spans, closures, centralizers
# ---------------------------------------------------------------------------


def jacobi_holds(L, triples=None, rng=None, count=200):
    """Check [[x,y],z] + [[y,z],x] + [[z,x],y] = 0 on basis triples.

    With `triples` given, checks exactly those; otherwise samples `count`
    random basis triples.
    """
    d = L.dim
    if triples is None:
        import random

        rng = rng or random.Random(0)
        triples = ((rng.randrange(d), rng.randrange(d), rng.randrange(d)) for _ in range(count))
    E = la.eye(d)
    for (i, j, k) in triples:
        v = L.bracket(L.bracket(E[i], E[j]), E[k])
        v = L.F.add_arr(v, L.bracket(L.bracket(E[j], E[k]), E[i]))
        v = L.F.add_arr(v, L.bracket(L.bracket(E[k], E[i]), E[j]))
        if v.any():
            return False
    return True


def _bracket_rows(L, U_rows, W_rows):
    """All products [u, w] for u in U_rows, w in W_rows, as stacked rows."""
    d = L.dim
    a = U_rows.shape[0]
    b = W_rows.shape[0]
    if a == 0 or b == 0:
        return np.zeros((0, d), dtype=np.int64)
    if a == d and np.array_equal(U_rows, la.eye(d)):
        T = L.table
    else:
        T = L.left_slabs(U_rows)
    T2 = np.ascontiguousarray(T.transpose(1, 0, 2)).reshape(d, a * d)
    return L.F.matmul(W_rows, T2).reshape(b * a, d)


def bracket_span(L, U: la.Subspace, W: la.Subspace):
    """Span of [u, w] over basis pairs."""
    if U.dim == 0 or W.dim == 0:
        return la.zero_subspace(L.dim)
    P = _bracket_rows(L, U.basis, W.basis)
    return la.subspace_from_rows(L.F, P, n=L.dim)


def derived_subspace(L):
    return bracket_span(L, la.full_subspace(L.dim), la.full_subspace(L.dim))


def _fresh_rows(F, base: la.Subspace, merged: la.Subspace):
    """Rows of merged's basis that lie outside base (spans the growth)."""
    return np.array(
        [r for r in merged.basis if not la.contains_vector(F, base, r)],
        dtype=np.int64,
    ).reshape(-1, merged.n)


def subalgebra_closure(L, V: la.Subspace):
    """Least bracket-closed subspace containing V, as a handle.

    Incremental: each round only brackets the newly adjoined directions
    against the whole current span.
    """
    F = L.F
    S = V
    new = V.basis
    while new.shape[0]:
        # slabs over the (few) new rows; [new, old] spans the same as [old, new]
        prods = _bracket_rows(L, new, S.basis)
        merged = la.subspace_sum(F, S, la.subspace_from_rows(F, prods, n=L.dim))
        if merged.dim == S.dim:
            break
        new = _fresh_rows(F, S, merged)
        S = merged
    return SubspaceHandle(parent=L, subspace=S, root=L, phi=S.basis)


def ideal_closure(L, V: la.Subspace):
    """Least ideal containing V, as a handle (incremental rounds)."""
    F = L.F
    I = V
    new = V.basis
    E = la.eye(L.dim)
    while new.shape[0]:
        prods = _bracket_rows(L, E, new)
        merged = la.subspace_sum(F, I, la.subspace_from_rows(F, prods, n=L.dim))
        if merged.dim == I.dim:
            break
        new = _fresh_rows(F, I, merged)
        I = merged
    return SubspaceHandle(parent=L, subspace=I, root=L, phi=I.basis)


def induced_algebra(L, U: la.Subspace, check_closed=True):
    """Structure constants of a bracket-closed subspace, in its echelon basis."""
    F = L.F
    m = U.dim
    d = L.dim
    if m == 0:
        return StructAlgebra(F, np.zeros((0, 0, 0), dtype=np.int64), check=False)
    T = L.left_slabs(U.basis)  # (a, j, k)
    T2 = np.ascontiguousarray(T.transpose(1, 0, 2)).reshape(d, m * d)
    prods = F.matmul(U.basis, T2).reshape(m, m, d)  # [u_a, u_b] at [b, a]
    flat = prods.reshape(m * m, d)
    # coordinates in the echelon basis: entries at pivots, then check residue
    coeffs = flat[:, list(U.pivots)]
    residue = F.add_arr(flat, F.neg_arr(F.matmul(coeffs, U.basis)))
    if residue.any():
        if check_closed:
            raise LieAlgebraError("subspace is not bracket-closed")
        return None
    table = coeffs.reshape(m, m, m).transpose(1, 0, 2)
    return StructAlgebra(F, np.ascontiguousarray(table), check=False)


def center(L):
    """Center of the algebra, as a Subspace in its own coordinates."""
    d = L.dim
    stacked = np.vstack([L.table[j].T for j in range(d)])
    return la.kernel(L.F, stacked)


def centralizer(L, x):
    """Centralizer of an element: kernel of ad(x), a closed handle."""
    C = la.kernel(L.F, L.ad(x))
    return SubspaceHandle(parent=L, subspace=C, root=L, phi=C.basis)


def centralizer_of_subspace(L, U: la.Subspace):
    """{m : [m, u] = 0 for all u in U} as a Subspace."""
    if U.dim == 0:
        return la.full_subspace(L.dim)
    stacked = np.vstack([L.ad(u) for u in U.basis])
    return la.kernel(L.F, stacked)


def normalizer(L, U: la.Subspace):
    """{x : [x, U] <= U}."""
    F = L.F
    d = L.dim
    if U.dim == 0 or U.dim == d:
        return la.full_subspace(d)
    Q = la.quotient(F, la.full_subspace(d), U)
    proj = np.stack([Q.project(F, e) for e in la.eye(d)], axis=1)
    blocks = []
    for u in U.basis:
        # [x, u] = -ad(u) x must project to zero mod U
        blocks.append(F.matmul(proj, L.ad(u)))
    return la.kernel(F, np.vstack(blocks))


def quotient_algebra(M: StructAlgebra, K: la.Subspace):
    """Quotient of M by an ideal K: (algebra, QuotientMap).

    The section is the deterministic complement from the quotient map, so
    repeated runs produce identical constants.
    """
    F = M.F
    full = la.full_subspace(M.dim)
    for k in K.basis:
        img = bracket_span(M, full, la.subspace_from_rows(F, k[None, :], n=M.dim))
        if not la.contains_subspace(F, K, img):
            raise LieAlgebraError("K is not an ideal")
    Q = la.quotient(F, full, K)
    m = Q.dim
    if m == 0:
        return StructAlgebra(F, np.zeros((0, 0, 0), dtype=np.int64), check=False), Q
    T = M.left_slabs(Q.section)  # (a, j, k)
    T2 = np.ascontiguousarray(T.transpose(1, 0, 2)).reshape(M.dim, m * M.dim)
    prods = F.matmul(Q.section, T2).reshape(m, m, M.dim)  # [s_a, s_b] at [b, a]
    coords = Q.project_rows(F, prods.reshape(m * m, M.dim))
    table = coords.reshape(m, m, m).transpose(1, 0, 2)
    return StructAlgebra(F, np.ascontiguousarray(table), check=False), Q


def node_quotient(node: SubspaceHandle, K: la.Subspace):
    """Quotient a descent node by an ideal of its algebra, composing phi."""
    alg2, Q = quotient_algebra(node.alg, K)
    phi2 = node.root.F.matmul(Q.section, node.phi) if Q.dim else np.zeros(
        (0, node.root.dim), dtype=np.int64
    )
    return SubspaceHandle(
        parent=alg2,
        subspace=la.full_subspace(alg2.dim),
        alg=alg2,
        phi=phi2,
        root=node.root,
    )


def node_descend(node: SubspaceHandle, h):
    """C_M(h) / <h> with pullback composition."""
    F = node.root.F
    M = node.alg
    C = la.kernel(F, M.ad(h))
    Calg = induced_algebra(M, C)
    hc = la.coords_in_subspace(F, C, h)
    assert hc is not None
    K = la.subspace_from_rows(F, hc[None, :], n=C.dim)
    alg2, Q = quotient_algebra(Calg, K)
    sect_in_M = F.matmul(Q.section, C.basis) if Q.dim else np.zeros(
        (0, M.dim), dtype=np.int64
    )
    phi2 = F.matmul(sect_in_M, node.phi) if Q.dim else np.zeros(
        (0, node.root.dim), dtype=np.int64
    )
    return SubspaceHandle(
        parent=alg2,
        subspace=la.full_subspace(alg2.dim),
        alg=alg2,
        phi=phi2,
        root=node.root,
    )


# ---------------------------------------------------------------------------
# semisimplicity and splitness
# ---------------------------------------------------------------------------


def _q_power(F, A, j):
    B = A
    for _ in range(j):
        B = la.mat_pow(F, B, F.q)
    return B


def _stable_exponent(F, dim):
    """Smallest j with q^j >= dim: kills the nilpotent part of any ad."""
    j = 0
    t = 1
    while t < dim:
        t *= F.q
        j += 1
    return max(j, 1)


def semisimple_part_matrix(L, x):
    """The semisimple part of ad(x), via a stabilized q-power."""
    A = L.ad(x)
    return _q_power(L.F, A, _stable_exponent(L.F, L.dim))


def solve_ad_preimage(L, B, within: la.Subspace | None = None):
    """h with ad(h) = B, least-pivot solution, optionally constrained."""
    F = L.F
    target = B.reshape(-1)
    if within is None:
        S = L.ad_flat()
        return la.solve(F, S, target)
    cols = [L.ad(u).reshape(-1) for u in within.basis]
    if not cols:
        return None
    S = np.stack(cols, axis=1)
    c = la.solve(F, S, target)
    if c is None:
        return None
    return F.matmul(c[None, :], within.basis)[0]


def extract_semisimple(L, x, within: la.Subspace | None = None):
    """Solve ad(h) = semisimple part of ad(x); None if not an inner ad."""
    B = semisimple_part_matrix(L, x)
    if not B.any():
        return None
    h = solve_ad_preimage(L, B, within=within)
    return h


def random_semisimple_element(M, rng, tries=40):
    """Random nonzero element with semisimple adjoint action.

    Draws random x, passes to the stabilized q-power of ad(x) and solves
    for a preimage; retries when x is ad-nilpotent or the solve fails.
    """
    for _ in range(tries):
        x = M.random_vector(rng, nonzero=True)
        h = extract_semisimple(M, x)
        if h is not None and np.asarray(h).any():
            return h
    return None


def is_semisimple_element(L, x):
    """ad-operational test: squarefree minimal polynomial and ad(x) inside
    the span of its own iterated q-powers (trivially true for x = 0)."""
    x = np.asarray(x, dtype=np.int64)
    if not x.any():
        return True
    F = L.F
    A = L.ad(x)
    m = la.min_poly(F, A)
    if not is_squarefree(F, m):
        return False
    powers = []
    seen = set()
    B = A
    for _ in range(2 * L.dim + 4):
        B = la.mat_pow(F, B, F.q)
        key = B.tobytes()
        if key in seen:
            break
        seen.add(key)
        powers.append(B.reshape(-1))
    S = np.stack(powers, axis=1)
    return la.solve(F, S, A.reshape(-1)) is not None


def is_split_semisimple(L, x):
    """min_poly(ad_x) divides x^q - x: diagonalizable over the base field."""
    m = la.min_poly(L.F, L.ad(x))
    return splits_over_field(L.F, m)


def split_pullback(L, w):
    """Split semisimple representative of a pullback image, or None.

    Descent pullbacks are determined only modulo previously quotiented
    directions, so w may carry nilpotent drift.  The stabilized q-power
    preimage strips the drift while fixing every F-rational eigenvalue,
    so on clean pullbacks this accepts exactly the split semisimple w
    (returning w up to a central summand) and on drifted ones it
    recovers the usable toral part.
    """
    w = np.asarray(w, dtype=np.int64)
    if not w.any():
        return None
    A = L.ad(w)
    if not A.any():
        return w  # central: ad is zero, trivially split
    B = _q_power(L.F, A, _stable_exponent(L.F, L.dim))
    if not B.any():
        return None
    s = solve_ad_preimage(L, B)
    if s is None or not s.any():
        return None
    return s if is_split_semisimple(L, s) else None


def split_semisimple_part_of_commuting(L, W: la.Subspace):
    """Largest subspace of a commuting family all of whose elements are
    split semisimple: the F-span where ad(w)^q = ad(w).

    Requires the basis elements of W to commute pairwise in L; returns
    None if they do not (caller falls back to element tests).
    """
    F = L.F
    if W.dim == 0:
        return W
    for a in range(W.dim):
        for b in range(a + 1, W.dim):
            if L.bracket(W.basis[a], W.basis[b]).any():
                return None
    # GF(p)-linear system: w -> ad(w)^q - ad(w) is additive on commuting sets;
    # GF(p)-generators of W are s * w_i with s running over the power basis
    gens = []
    vecs = []
    power_basis = [F._ppow[t] for t in range(F.k)]
    for w in W.basis:
        for s in power_basis:
            v = F.mul_arr(np.full(W.n, s, dtype=np.int64), w)
            gens.append(v)
            A = L.ad(v)
            D = F.add_arr(_q_power(F, A, 1), F.neg_arr(A))
            vecs.append(D.reshape(-1))
    # kernel over GF(p) of the map (c_g) -> sum c_g * vec_g, c_g in GF(p)
    cols = np.stack(vecs, axis=1)
    ker = _gfp_kernel_of_packed(F, cols)
    rows = []
    for coeffs in ker:
        v = np.zeros(W.n, dtype=np.int64)
        for c, g in zip(coeffs, gens):
            if c:
                v = F.add_arr(v, F.mul_arr(np.full(W.n, F.from_int(int(c)), dtype=np.int64), g))
        rows.append(v)
    if not rows:
        return la.zero_subspace(W.n)
    out = la.subspace_from_rows(F, np.array(rows), n=W.n)
    # the split elements of a commuting family form an F-subspace; verify
    for w in out.basis:
        assert is_split_semisimple(L, w)
    return out


def _gfp_kernel_of_packed(F, cols):
    """Kernel over GF(p) of sum_g c_g * cols[:, g] = 0 with c_g in GF(p).

    Packed field entries are expanded into their GF(p) coefficient planes.
    """
    p = F.p
    planes = []
    for t in range(F.k):
        planes.append((cols // F._ppow[t]) % p)
    big = np.vstack(planes).astype(np.int64)
    Fp = field_make(p, 1)
    ker = la.kernel(Fp, big)
    return [row for row in ker.basis]


# ---------------------------------------------------------------------------
# toral certificates
# ---------------------------------------------------------------------------


@dataclass
class ToralCertificate:
    subspace: la.Subspace
    min_polys: tuple
    eigenbasis: np.ndarray     # rows: simultaneous eigenbasis of L
    weights: tuple             # ((eigenvalue tuple), block dimension) pairs
    rank: int


@dataclass
class ToralFailure:
    reason: str
    detail: str = ""

    def __bool__(self):
        return False


def is_split_toral(L, H: la.Subspace, d):
    """Certify H as a split maximal toral subalgebra of expected rank d.

    Checks commutativity, per-basis split semisimplicity, simultaneous
    diagonalizability over F, and dim H = d; returns a ToralCertificate
    or a ToralFailure naming the violated condition.
    """
    F = L.F
    for a in range(H.dim):
        for b in range(a + 1, H.dim):
            if L.bracket(H.basis[a], H.basis[b]).any():
                return ToralFailure("not commutative", f"basis pair ({a},{b})")
    mps = []
    for i, h in enumerate(H.basis):
        m = la.min_poly(F, L.ad(h))
        if not splits_over_field(F, m):
            return ToralFailure("not split semisimple", f"basis element {i}")
        mps.append(m)
    # simultaneous eigenspace refinement
    blocks = [(la.full_subspace(L.dim), ())]
    for h in H.basis:
        A = L.ad(h)
        new_blocks = []
        for (U, w) in blocks:
            Ar = la.restrict_matrix(F, A, U)
            from .ff import roots_in_field

            mloc = la.min_poly(F, Ar)
            evs = sorted(roots_in_field(F, mloc))
            covered = 0
            for v in evs:
                E = la.eigenspace(F, Ar, v)
                if E.dim == 0:
                    continue
                sub = la.subspace_from_rows(F, F.matmul(E.basis, U.basis), n=L.dim)
                new_blocks.append((sub, w + (v,)))
                covered += E.dim
            if covered != U.dim:
                return ToralFailure("not simultaneously diagonalizable")
        blocks = new_blocks
    total = sum(U.dim for (U, _) in blocks)
    if total != L.dim:
        return ToralFailure("not simultaneously diagonalizable", f"covered {total}")
    if H.dim != d:
        return ToralFailure("rank mismatch", f"dim H = {H.dim}, expected {d}")
    eigenbasis = np.vstack([U.basis for (U, _) in blocks])
    weights = tuple((w, U.dim) for (U, w) in blocks)
    return ToralCertificate(H, tuple(mps), eigenbasis, weights, d)


def is_regular_semisimple(L, x):
    """True iff the centralizer of x is a maximal toral subalgebra."""
    F = L.F
    T = la.kernel(F, L.ad(np.asarray(x, dtype=np.int64)))
    for a in range(T.dim):
        for b in range(a + 1, T.dim):
            if L.bracket(T.basis[a], T.basis[b]).any():
                return False
    for t in T.basis:
        if not is_semisimple_element(L, t):
            return False
    # maximality: semisimple parts of C_L(T) must stay inside T
    C = centralizer_of_subspace(L, T)
    for c in C.basis:
        if la.contains_vector(F, T, c):
            continue
        s = extract_semisimple(L, c, within=C)
        if s is None:
            continue
        if not la.contains_vector(F, T, s):
            return False
    return True


# ---------------------------------------------------------------------------
# Cartan subalgebras and reductive rank
# ---------------------------------------------------------------------------


def _is_nilpotent_algebra(alg):
    S = la.full_subspace(alg.dim)
    while S.dim:
        S2 = bracket_span(alg, la.full_subspace(alg.dim), S)
        if S2.dim >= S.dim:
            return False
        S = S2
    return True


def _is_ad_nilpotent(F, A):
    return not la.mat_pow(F, A, A.shape[0]).any()


def cartan_subalgebra(L, rng, max_restarts=12, max_probe=30):
    """A nilpotent self-normalizing subalgebra, by Fitting-null descent.

    Randomized; raises CartanSearchError when the retry budget runs out
    (callers may re-seed or pass to an extension field).
    """
    F = L.F
    for _ in range(max_restarts):
        K = la.full_subspace(L.dim)
        while True:
            alg = induced_algebra(L, K)
            if _is_nilpotent_algebra(alg):
                if normalizer(L, K).dim == K.dim:
                    return SubspaceHandle(
                        parent=L, subspace=K, alg=alg, phi=K.basis, root=L
                    )
                break  # nilpotent but not self-normalizing: restart
            x = None
            for t in range(max_probe):
                cand = (
                    alg.random_vector(rng, nonzero=True)
                    if t >= alg.dim
                    else la.eye(alg.dim)[t]
                )
                A = alg.ad(cand)
                if not _is_ad_nilpotent(F, A):
                    x = cand
                    Ax = A
                    break
            if x is None:
                break  # should not happen: non-nilpotent algebra has such x
            fit = la.kernel(F, la.mat_pow(F, Ax, alg.dim))
            K = la.subspace_from_rows(F, F.matmul(fit.basis, K.basis), n=L.dim)
    raise CartanSearchError("no Cartan subalgebra found within retry budget")


def extend_scalars(L, m):
    """The same structure constants over GF(p^(k*m))."""
    F = L.F
    G = field_make(F.p, F.k * m)
    emb = field_embedding(F, G)
    table = emb[L.table]
    return StructAlgebra(G, table, provenance=dict(L.provenance), check=False)


def reductive_rank(L, rng, max_restarts=12):
    """dim C_L(H-hat) for a computed Cartan subalgebra H-hat.

    Falls back to an extension field with more than dim L elements when
    the base-field search fails; the dimension is extension-invariant.
    """
    try:
        hat = cartan_subalgebra(L, rng, max_restarts=max_restarts)
        return centralizer_of_subspace(L, hat.subspace).dim
    except CartanSearchError:
        m = 2
        while L.F.q**m <= L.dim:
            m += 1
        L2 = extend_scalars(L, m)
        hat = cartan_subalgebra(L2, rng, max_restarts=4 * max_restarts)
        return centralizer_of_subspace(L2, hat.subspace).dim


# ---------------------------------------------------------------------------
# basis scrambling
# ---------------------------------------------------------------------------


def random_invertible(F, n, rng):
    while True:
        P = np.array(
            [[rng.randrange(F.q) for _ in range(n)] for _ in range(n)],
            dtype=np.int64,
        )
        if la.rank(F, P) == n:
            return P


def invert_matrix(F, P):
    n = P.shape[0]
    R, piv = la.rref(F, np.hstack([P, la.eye(n)]))
    if piv != tuple(range(n)):
        raise ValueError("matrix is singular")
    return R[:, n:].copy()


def change_basis(L, P):
    """Structure constants on the basis b'_a = sum_i P[a, i] b_i."""
    F = L.F
    d = L.dim
    Pinv = invert_matrix(F, P)
    C = L.table
    T1 = F.matmul(P, C.reshape(d, d * d)).reshape(d, d, d)
    T1 = np.ascontiguousarray(T1.transpose(1, 0, 2))  # (j, a, k)
    T2 = F.matmul(P, T1.reshape(d, d * d)).reshape(d, d, d)  # (b, a, k)
    T2 = np.ascontiguousarray(T2.transpose(1, 0, 2))  # (a, b, k)
    T3 = F.matmul(T2.reshape(d * d, d), Pinv).reshape(d, d, d)
    return StructAlgebra(F, T3, provenance=dict(L.provenance), check=False)


def scramble(L, rng):
    """Conjugate the table by a uniformly random invertible matrix.

    Returns the scrambled algebra and the hidden change of basis P (rows
    = new basis in old coordinates), for test oracles only.
    """
    P = random_invertible(L.F, L.dim, rng)
    return change_basis(L, P), P
