"""Integral Chevalley Lie algebras from root data, and their reductions.

The bracket on the lattice Y + sum Z X_alpha is fixed by four rules:
toral elements commute; [X_alpha, y] = <alpha, y> X_alpha; [X_-alpha,
X_alpha] = alpha-vee; and [X_alpha, X_beta] = N_{alpha,beta} X_{alpha+beta}
when alpha + beta is a root.  The integers N are +-(p_{alpha,beta} + 1)
with signs fixed here by making every extraspecial pair positive and
deriving the rest, after which the whole table is checked against the
Jacobi identity over the integers.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg as la
from .liealg import StructAlgebra, SubspaceHandle
from .rootdata import RootDatum, RootSystem


class StructureConstantError(Exception):
    """Internal consistency failure while building the constant table."""


def _tsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _tneg(a):
    return tuple(-x for x in a)


def _tadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


class _NTable:
    """Pair constants N_{alpha,beta} for all root pairs with root sum."""

    def __init__(self, rs: RootSystem):
        self.rs = rs
        self.pos = rs.roots[: rs.npos]
        self.posset = set(self.pos)
        self.npos_by_pair = {}
        self._fill_positive_pairs()
        self.full = {}
        for a in rs.roots:
            for b in rs.roots:
                if a == b or a == _tneg(b):
                    continue
                s = _tadd(a, b)
                if s in rs.index:
                    self.full[(a, b)] = self._n_full(a, b)

    def p_string(self, a, b):
        return self.rs.root_string_p(a, b)

    def _norm(self, a):
        return Fraction(self.rs.normsq(a))

    def _fill_positive_pairs(self):
        rs = self.rs
        order = {r: i for i, r in enumerate(self.pos)}
        for gamma in self.pos:
            if sum(gamma) == 1:
                continue
            decomps = []
            for a in self.pos:
                if order[a] >= order[gamma]:
                    break
                b = _tsub(gamma, a)
                if b in self.posset and order[a] < order[b]:
                    decomps.append((a, b))
            decomps.sort(key=lambda ab: order[ab[0]])
            assert decomps, f"no decomposition of {gamma}"
            a1, b1 = decomps[0]
            n1 = self.p_string(a1, b1) + 1
            self._set(a1, b1, n1)
            for (a, b) in decomps[1:]:
                self._set(a, b, self._derive(a, b, a1, b1, gamma, n1))

    def _set(self, a, b, val):
        self.npos_by_pair[(a, b)] = val
        self.npos_by_pair[(b, a)] = -val

    def _derive(self, a, b, a1, b1, gamma, n1):
        """Sign of a special pair from the extraspecial one.

        The Jacobi identity on (X_{a1}, X_{-a}, X_{-b}) forces
        N_{a1,-a} N_{a1-a,-b} + N_{-a,-b} N_{-gamma,a1}
            + N_{-b,a1} N_{a1-b,-a} = 0,
        and the cyclic relation turns N_{-gamma,a1} into a multiple of the
        extraspecial constant.
        """
        t1 = Fraction(0)
        d1 = _tsub(a1, a)
        if d1 in self.rs.index:
            t1 = self._n_mixed(a1, _tneg(a)) * self._n_mixed(d1, _tneg(b))
        t3 = Fraction(0)
        d3 = _tsub(a1, b)
        if d3 in self.rs.index:
            t3 = self._n_mixed(_tneg(b), a1) * self._n_mixed(d3, _tneg(a))
        n_gamma_a1 = Fraction(n1) * self._norm(b1) / self._norm(gamma)
        if n_gamma_a1 == 0 or (t1 == 0 and t3 == 0):
            raise StructureConstantError(
                f"degenerate sign relation at {a} + {b} = {gamma}"
            )
        val = (t1 + t3) / n_gamma_a1
        expected = self.p_string(a, b) + 1
        if val.denominator != 1 or abs(val) != expected:
            raise StructureConstantError(
                f"derived N({a},{b}) = {val}, expected +-{expected}"
            )
        return int(val)

    def _n_mixed(self, x, y):
        """N for any sign pattern, reduced to the positive-pair table.

        Uses N_{-a,-b} = -N_{a,b} and, for zero-sum triples (a, b, c),
        N_{a,b}/(c,c) = N_{b,c}/(a,a) = N_{c,a}/(b,b).
        """
        s = _tadd(x, y)
        assert s in self.rs.index
        xpos = x in self.posset
        ypos = y in self.posset
        if xpos and ypos:
            return Fraction(self.npos_by_pair[(x, y)])
        if not xpos and not ypos:
            return -self._n_mixed(_tneg(x), _tneg(y))
        if not xpos:
            return -self._n_mixed(y, x)
        b = _tneg(y)
        if s in self.posset:
            return -(self._norm(s) / self._norm(x)) * Fraction(
                self.npos_by_pair[(b, s)]
            )
        u = _tneg(s)
        return (self._norm(u) / self._norm(b)) * Fraction(self.npos_by_pair[(u, x)])

    def _n_full(self, a, b):
        v = self._n_mixed(a, b)
        assert v.denominator == 1
        n = int(v)
        expected = self.p_string(a, b) + 1
        if abs(n) != expected:
            raise StructureConstantError(
                f"N({a},{b}) = {n}, expected +-{expected}"
            )
        return n


@dataclass(frozen=True, eq=False)
class ChevalleyBasisInfo:
    """Integral structure data on the basis h_1..h_n, X_alpha (root order)."""

    datum: RootDatum
    n_table: dict            # (root tuple, root tuple) -> N integer
    p_table: dict            # same keys -> p_{alpha,beta}
    pairing: np.ndarray      # (nroots, n): <alpha_r, y_j>
    coroot_coords: np.ndarray  # (nroots, n): alpha_r-vee in the Y-basis
    int_table: dict          # (i, j) with i < j -> tuple of (k, coeff)

    @property
    def dim(self):
        return self.datum.rank + self.datum.rs.nroots

    @property
    def rank(self):
        return self.datum.rank

    def labels(self):
        n = self.datum.rank
        out = [f"h{i + 1}" for i in range(n)]
        out += [f"X{r}" for r in self.datum.rs.roots]
        return out

    def dense_int(self):
        d = self.dim
        T = np.zeros((d, d, d), dtype=np.int64)
        for (i, j), terms in self.int_table.items():
            for (k, c) in terms:
                T[i, j, k] = c
                T[j, i, k] = -c
        return T


def _jacobi_residual_dense(T):
    """Max |Jacobi defect| of an integer table via exact float contractions."""
    d = T.shape[0]
    Tf = T.astype(np.float64)
    flat = Tf.reshape(d, d * d)
    worst = 0.0
    for i in range(d):
        t1 = Tf[i] @ flat                     # (j, kl)
        t2 = flat.reshape(d * d, d) @ Tf[:, i, :]   # (jk, l)
        t3 = Tf[:, i, :] @ flat               # (k, jl)
        total = (
            t1.reshape(d, d, d)
            + t2.reshape(d, d, d)
            + t3.reshape(d, d, d).transpose(1, 0, 2)
        )
        m = float(np.abs(total).max())
        worst = max(worst, m)
    return worst


def _jacobi_random_triples(T, count, seed=0):
    import random

    rng = random.Random(seed)
    d = T.shape[0]
    U = np.ascontiguousarray(T.transpose(1, 0, 2).astype(np.float64))
    Tf = T.astype(np.float64)
    for _ in range(count):
        i, j, k = (rng.randrange(d) for _ in range(3))
        v = Tf[i, j] @ U[k] + Tf[j, k] @ U[i] + Tf[k, i] @ U[j]
        if v.any():
            return False
    return True


_EXHAUSTIVE_JACOBI_MAX = 64


@functools.lru_cache(maxsize=None)
def _structure_constants_cached(datum: RootDatum):
    rs = datum.rs
    n = rs.rank
    nt = _NTable(rs)
    p_table = {
        (a, b): nt.p_string(a, b) for (a, b) in nt.full
    }
    pairing = datum.alpha_in_x.copy()
    coroot_coords = datum.coroot_in_y.copy()

    idx = {r: n + i for i, r in enumerate(rs.roots)}
    table = {}

    def put(i, j, terms):
        if i == j:
            raise StructureConstantError("diagonal bracket")
        terms = tuple((k, int(c)) for (k, c) in terms if c)
        if not terms:
            return
        if i < j:
            table[(i, j)] = terms
        else:
            table[(j, i)] = tuple((k, -c) for (k, c) in terms)

    for r, alpha in enumerate(rs.roots):
        i = idx[alpha]
        # [X_alpha, h_j] = <alpha, y_j> X_alpha
        for j in range(n):
            c = int(pairing[r, j])
            if c:
                put(i, j, [(i, c)])
    for r in range(rs.npos):
        alpha = rs.roots[r]
        i_pos = idx[alpha]
        i_neg = idx[_tneg(alpha)]
        # [X_-alpha, X_alpha] = alpha-vee
        terms = [(j, int(coroot_coords[r, j])) for j in range(n)]
        put(i_neg, i_pos, terms)
    for (a, b), nval in nt.full.items():
        put(idx[a], idx[b], [(idx[_tadd(a, b)], nval)])

    info = ChevalleyBasisInfo(datum, dict(nt.full), p_table, pairing, coroot_coords, table)

    # consistency gates: N antisymmetry under negation, then Jacobi over Z
    for (a, b), v in info.n_table.items():
        if info.n_table[(_tneg(a), _tneg(b))] != -v:
            raise StructureConstantError("N(-a,-b) = -N(a,b) violated")
    T = info.dense_int()
    if info.dim <= _EXHAUSTIVE_JACOBI_MAX:
        if _jacobi_residual_dense(T) != 0.0:
            raise StructureConstantError("Jacobi identity fails over Z")
    else:
        if not _jacobi_random_triples(T, 10_000):
            raise StructureConstantError("Jacobi identity fails over Z")
    return info


def structure_constants(datum: RootDatum):
    """Sign-consistent integral structure constants for a root datum."""
    return _structure_constants_cached(datum)


def chevalley_algebra(datum: RootDatum, F):
    """The algebra over F plus a handle on the standard toral subalgebra."""
    info = structure_constants(datum)
    d = info.dim
    T = np.zeros((d, d, d), dtype=np.int64)
    for (i, j), terms in info.int_table.items():
        for (k, c) in terms:
            cc = c % F.p
            T[i, j, k] = cc
            T[j, i, k] = F.neg(cc)
    alg = StructAlgebra(
        F,
        T,
        provenance={"label": datum.label, "basis": "chevalley"},
        check=False,
    )
    n = datum.rank
    H = la.subspace_from_rows(F, la.eye(d)[:n], n=d)
    handle = SubspaceHandle(parent=alg, subspace=H, phi=H.basis, root=alg)
    return alg, handle


def root_function(datum: RootDatum, F, root_index, t_coords):
    """alpha-bar(h) = sum t_i <alpha, y_i>, reduced into F."""
    t = np.asarray(t_coords, dtype=np.int64)
    if t.shape != (datum.rank,):
        raise ValueError("coordinate length mismatch")
    acc = 0
    for i in range(datum.rank):
        acc = F.add(acc, F.mul(int(t[i]) % F.q, F.from_int(int(datum.alpha_in_x[root_index, i]))))
    return acc


def root_space(L, H: SubspaceHandle, datum: RootDatum, root_index):
    """Joint eigenspace of the standard toral subalgebra for one root.

    With ad_x(w) = [x, w] the eigenvalue of ad_{h_i} on X_alpha is
    -<alpha, y_i>, so the kernels are shifted by +alpha-bar(h_i) to make
    X_alpha itself land in the returned space.
    """
    F = L.F
    n = datum.rank
    expected = la.subspace_from_rows(F, la.eye(L.dim)[:n], n=L.dim)
    if H.subspace != expected:
        raise ValueError("root spaces are defined for the standard toral handle")
    space = la.full_subspace(L.dim)
    for i in range(n):
        A = L.ad(la.eye(L.dim)[i])
        v = F.from_int(int(datum.alpha_in_x[root_index, i]))
        shifted = A.copy()
        idx = np.arange(L.dim)
        shifted[idx, idx] = F.add_arr(shifted[idx, idx], np.full(L.dim, v, dtype=np.int64))
        space = la.subspace_intersect(F, space, la.kernel(F, shifted))
    return space
