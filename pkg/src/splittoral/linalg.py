"""Dense exact linear algebra over a Field.

Matrices are 2-D numpy int64 arrays of packed field elements; vectors are
1-D arrays.  Matrices act on column vectors (A @ v).  Subspaces carry a
reduced-row-echelon basis with sorted pivot columns, so equal subspaces
have bytewise-equal bases and all downstream section choices are
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ff import poly_monic, poly_mul, poly_trim


def zeros(n, m=None):
    return np.zeros((n, m if m is not None else n), dtype=np.int64)


def eye(n):
    return np.eye(n, dtype=np.int64)


def as_mat(rows):
    return np.array(rows, dtype=np.int64)


def rref(F, A):
    """Reduced row-echelon form; returns (R, pivot column tuple)."""
    R = np.array(A, dtype=np.int64, copy=True)
    if R.ndim != 2:
        raise ValueError("matrix must be 2-D")
    nrows, ncols = R.shape
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        col = R[r:, c]
        nz = np.nonzero(col)[0]
        if len(nz) == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            R[[r, i]] = R[[i, r]]
        piv = int(R[r, c])
        if piv != 1:
            R[r] = F.mul_arr(np.full(ncols, F.inv(piv), dtype=np.int64), R[r])
        others = np.nonzero(R[:, c])[0]
        others = others[others != r]
        if len(others):
            factors = F.neg_arr(R[others, c])
            R[others] = F.add_arr(R[others], F.mul_arr(factors[:, None], R[r][None, :]))
        pivots.append(c)
        r += 1
    return R, tuple(pivots)


def rank(F, A):
    return len(rref(F, A)[1])


@dataclass(frozen=True)
class Subspace:
    """Row space in canonical reduced echelon form."""

    n: int
    basis: np.ndarray  # (dim, n), rref, no zero rows
    pivots: tuple

    @property
    def dim(self):
        return self.basis.shape[0]

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self.n == other.n
            and self.pivots == other.pivots
            and np.array_equal(self.basis, other.basis)
        )

    def __hash__(self):
        return hash((self.n, self.pivots, self.basis.tobytes()))


def subspace_from_rows(F, rows, n=None):
    rows = np.asarray(rows, dtype=np.int64)
    if rows.ndim == 1:
        rows = rows[None, :]
    if rows.size == 0:
        if n is None:
            raise ValueError("ambient dimension required for empty input")
        return Subspace(n, np.zeros((0, n), dtype=np.int64), ())
    R, piv = rref(F, rows)
    return Subspace(rows.shape[1], R[: len(piv)].copy(), piv)


def zero_subspace(n):
    return Subspace(n, np.zeros((0, n), dtype=np.int64), ())


def full_subspace(n):
    return Subspace(n, eye(n), tuple(range(n)))


def reduce_vector(F, U: Subspace, v):
    """Residue of v after elimination against U's echelon basis.

    Single-pass because the basis is reduced echelon: each basis row is
    zero at every other pivot column.
    """
    v = np.asarray(v, dtype=np.int64)
    if U.dim == 0:
        return v.copy()
    coeffs = v[list(U.pivots)]
    if not coeffs.any():
        return v.copy()
    return F.add_arr(v, F.neg_arr(F.matmul(coeffs[None, :], U.basis)[0]))

def contains_vector(F, U: Subspace, v):
    return not reduce_vector(F, U, v).any()


def contains_subspace(F, U: Subspace, W: Subspace):
    return all(contains_vector(F, U, w) for w in W.basis)


def coords_in_subspace(F, U: Subspace, v):
    """Coordinates of v in U's echelon basis, or None if v is outside U."""
    v = np.asarray(v, dtype=np.int64)
    coeffs = v[list(U.pivots)].copy()
    if U.dim == 0:
        return coeffs if not v.any() else None
    residue = F.add_arr(v, F.neg_arr(F.matmul(coeffs[None, :], U.basis)[0]))
    if residue.any():
        return None
    return coeffs


def subspace_sum(F, U: Subspace, W: Subspace):
    if U.n != W.n:
        raise ValueError("ambient dimension mismatch")
    if U.dim == 0:
        return W
    if W.dim == 0:
        return U
    return subspace_from_rows(F, np.vstack([U.basis, W.basis]))


def subspace_intersect(F, U: Subspace, W: Subspace):
    if U.n != W.n:
        raise ValueError("ambient dimension mismatch")
    if U.dim == 0 or W.dim == 0:
        return zero_subspace(U.n)
    stacked = np.vstack([U.basis, W.basis])  # (a+b, n)
    ker = kernel(F, stacked.T)  # combos x with x1*U + x2*W^T ... rows
    a = U.dim
    if ker.dim == 0:
        return zero_subspace(U.n)
    combos = F.matmul(ker.basis[:, :a], U.basis)
    return subspace_from_rows(F, combos, n=U.n)


def kernel(F, A):
    """Right null space {v : A v = 0} as a canonical Subspace."""
    A = np.asarray(A, dtype=np.int64)
    m = A.shape[1]
    R, piv = rref(F, A)
    free = [c for c in range(m) if c not in piv]
    if not free:
        return zero_subspace(m)
    basis = np.zeros((len(free), m), dtype=np.int64)
    for i, c in enumerate(free):
        basis[i, c] = 1
        for r, pc in enumerate(piv):
            basis[i, pc] = F.neg(int(R[r, c]))
    # rows are already reduced echelon after sorting by free column
    return subspace_from_rows(F, basis, n=m)


def solve(F, A, b):
    """One solution of A x = b (free variables zero), or None."""
    A = np.asarray(A, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    aug = np.hstack([A, b[:, None]])
    R, piv = rref(F, aug)
    m = A.shape[1]
    if m in piv:
        return None
    x = np.zeros(m, dtype=np.int64)
    for r, c in enumerate(piv):
        x[c] = R[r, m]
    return x


@dataclass(frozen=True)
class QuotientMap:
    """Quotient of a subspace M by a subspace K with a chosen section.

    The section rows are basis vectors of M; projection of K is zero and
    projection o section is the identity on the quotient.
    """

    M: Subspace
    K: Subspace
    dim: int
    section: np.ndarray      # (dim, n) ambient representatives
    _k_in_m: np.ndarray      # K in M-coordinates, rref
    _k_pivots: tuple
    _free: tuple             # non-pivot M-coordinate slots, ascending

    def project(self, F, v):
        """Quotient coordinates of an ambient vector v in M."""
        return self.project_rows(F, np.asarray(v, dtype=np.int64)[None, :])[0]

    def project_rows(self, F, rows):
        """Quotient coordinates of a batch of ambient vectors (as rows)."""
        rows = np.asarray(rows, dtype=np.int64)
        if self.M.dim == 0:
            if rows.any():
                raise ValueError("vector outside the ambient subspace")
            return np.zeros((rows.shape[0], 0), dtype=np.int64)
        c = rows[:, list(self.M.pivots)]
        residue = F.add_arr(rows, F.neg_arr(F.matmul(c, self.M.basis)))
        if residue.any():
            raise ValueError("vector outside the ambient subspace")
        if len(self._k_pivots):
            kc = c[:, list(self._k_pivots)]
            c = F.add_arr(c, F.neg_arr(F.matmul(kc, self._k_in_m)))
        if self.dim == 0:
            return np.zeros((rows.shape[0], 0), dtype=np.int64)
        return c[:, list(self._free)]

    def lift(self, F, w):
        """Ambient representative of quotient coordinates w."""
        if self.dim == 0:
            return np.zeros(self.M.n, dtype=np.int64)
        return F.matmul(np.asarray(w, dtype=np.int64)[None, :], self.section)[0]


def quotient(F, M: Subspace, K: Subspace):
    """Quotient map M/K with the deterministic complement section."""
    if M.n != K.n:
        raise ValueError("ambient dimension mismatch")
    if not contains_subspace(F, M, K):
        raise ValueError("K is not contained in M")
    if K.dim == 0:
        kc = np.zeros((0, M.dim), dtype=np.int64)
        kp = ()
    else:
        rows = np.vstack([coords_in_subspace(F, M, k) for k in K.basis])
        R, kp = rref(F, rows)
        kc = R[: len(kp)]
    free = tuple(i for i in range(M.dim) if i not in kp)
    section = M.basis[list(free)].copy() if free else np.zeros((0, M.n), dtype=np.int64)
    return QuotientMap(M, K, len(free), section, kc, kp, free)


# ---------------------------------------------------------------------------
# minimal / characteristic polynomials and eigenspaces
# ---------------------------------------------------------------------------


class _Echelon:
    """Maintained reduced echelon with optional combination tracking.

    Every stored row is 1 at its own pivot and 0 at all other pivots, so
    reducing a vector is a single coefficient-matmul step regardless of
    how many rows are present.
    """

    def __init__(self, F, n, track=False):
        self.F = F
        self.n = n
        self.rows = np.zeros((0, n), dtype=np.int64)
        self.pivots = []
        self.track = track
        self.combs = np.zeros((0, n + 1), dtype=np.int64)

    @property
    def dim(self):
        return len(self.pivots)

    def reduce(self, v, comb=None):
        F = self.F
        v = np.asarray(v, dtype=np.int64)
        if not self.pivots:
            return v.copy(), (None if comb is None else comb.copy())
        coeffs = v[self.pivots]
        if not coeffs.any():
            return v.copy(), (None if comb is None else comb.copy())
        res = F.add_arr(v, F.neg_arr(F.matmul(coeffs[None, :], self.rows)[0]))
        rcomb = None
        if comb is not None:
            rcomb = F.add_arr(comb, F.neg_arr(F.matmul(coeffs[None, :], self.combs)[0]))
        return res, rcomb

    def insert(self, res, comb=None):
        """Insert an already-reduced nonzero vector, keeping RREF."""
        F = self.F
        piv = int(np.nonzero(res)[0][0])
        inv = F.inv(int(res[piv]))
        if inv != 1:
            res = F.mul_arr(np.full(self.n, inv, dtype=np.int64), res)
            if comb is not None:
                comb = F.mul_arr(np.full(len(comb), inv, dtype=np.int64), comb)
        if self.dim:
            facs = self.rows[:, piv].copy()
            if facs.any():
                negf = F.neg_arr(facs)
                self.rows = F.add_arr(self.rows, F.mul_arr(negf[:, None], res[None, :]))
                if self.track:
                    self.combs = F.add_arr(
                        self.combs, F.mul_arr(negf[:, None], comb[None, :])
                    )
        self.rows = np.vstack([self.rows, res[None, :]])
        self.pivots.append(piv)
        if self.track:
            if comb is None:
                comb = np.zeros(self.n + 1, dtype=np.int64)
            self.combs = np.vstack([self.combs, comb[None, :]])

    def zero_combs(self):
        self.combs[:] = 0


def _krylov_sweep(F, A, v, ech: _Echelon):
    """Run the Krylov chain of v against ech (with tracking), inserting new
    vectors; returns the monic order polynomial of v relative to the span
    ech held on entry."""
    n = len(v)
    w = np.asarray(v, dtype=np.int64).copy()
    t = 0
    while True:
        comb = np.zeros(n + 1, dtype=np.int64)
        comb[t] = 1
        res, rcomb = ech.reduce(w, comb)
        if not res.any():
            return poly_monic(F, poly_trim(rcomb[: t + 1]))
        ech.insert(res, rcomb)
        w = F.matvec(A, w)
        t += 1


def min_poly(F, A):
    """Monic minimal polynomial via lcm of absolute Krylov order polynomials.

    A union echelon of swept Krylov spaces is kept only to skip covered
    seed vectors; that is sound because the union is A-invariant, so a
    covered seed cannot raise the lcm.
    """
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[0]
    if A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    if n == 0:
        return (1,)
    m = (1,)
    union = _Echelon(F, n)
    for i in range(n):
        v = np.zeros(n, dtype=np.int64)
        v[i] = 1
        res, _ = union.reduce(v)
        if not res.any():
            continue
        ech = _Echelon(F, n, track=True)
        f = _krylov_sweep(F, A, v, ech)
        m = _poly_lcm(F, m, f)
        if len(m) - 1 == n:
            break
        for r in ech.rows:
            res, _ = union.reduce(r)
            if res.any():
                union.insert(res)
    return m


def _poly_lcm(F, f, g):
    from .ff import poly_divmod, poly_gcd

    if not f or not g:
        return ()
    d = poly_gcd(F, f, g)
    q, r = poly_divmod(F, f, d)
    assert not r
    return poly_monic(F, poly_mul(F, q, g))


def char_poly(F, A):
    """Characteristic polynomial as a product of relative order polynomials.

    Each sweep computes the order polynomial of a fresh seed modulo the
    A-invariant space swept so far; the product over sweeps is det(xI - A).
    """
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[0]
    if A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    cp = (1,)
    ech = _Echelon(F, n, track=True)
    for i in range(n):
        if ech.dim == n:
            break
        v = np.zeros(n, dtype=np.int64)
        v[i] = 1
        res, _ = ech.reduce(v)
        if not res.any():
            continue
        ech.zero_combs()  # previous sweeps become part of the invariant block
        f = _krylov_sweep(F, A, v, ech)
        cp = poly_mul(F, cp, f)
    assert len(cp) - 1 == n
    return cp


def eigenspace(F, A, v):
    """Kernel of (A - v I); possibly zero-dimensional."""
    A = np.asarray(A, dtype=np.int64)
    if A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    shifted = A.copy()
    d = F.neg(int(v) % F.q if not isinstance(v, (int, np.integer)) else int(v))
    idx = np.arange(A.shape[0])
    shifted[idx, idx] = F.add_arr(shifted[idx, idx], np.full(A.shape[0], d, dtype=np.int64))
    return kernel(F, shifted)


def restrict_matrix(F, A, U: Subspace):
    """Matrix of A on an A-invariant subspace U, in U's echelon basis."""
    if U.dim == 0:
        return np.zeros((0, 0), dtype=np.int64)
    images = F.matmul(A, U.basis.T).T  # rows: A u_i
    rows = []
    for img in images:
        c = coords_in_subspace(F, U, img)
        if c is None:
            raise ValueError("subspace is not invariant")
        rows.append(c)
    # column convention: entry [k, j] = coefficient of u_k in A u_j
    return np.array(rows, dtype=np.int64).T


def mat_pow(F, A, e):
    n = A.shape[0]
    r = eye(n)
    b = np.asarray(A, dtype=np.int64)
    while e:
        if e & 1:
            r = F.matmul(r, b)
        b = F.matmul(b, b)
        e >>= 1
    return r
