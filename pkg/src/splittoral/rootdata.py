"""Root systems and root data of the irreducible Cartan types.

Roots live in simple-root coordinates (integer tuples).  A root datum
fixes a character lattice X between the root lattice and the weight
lattice; its basis is stored in fundamental-weight coordinates and the
cocharacter lattice Y carries the dual basis, so the pairing matrix of
the chosen bases is the identity and both the roots-in-X and the
coroots-in-Y coordinate matrices are integral.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_form

_ADMISSIBLE = {
    "A": lambda n: n >= 1,
    "B": lambda n: n >= 2,
    "C": lambda n: n >= 3,  # B2 = C2 is handled under the B label
    "D": lambda n: n >= 4,
    "E": lambda n: n in (6, 7, 8),
    "F": lambda n: n == 4,
    "G": lambda n: n == 2,
}

ROOT_COUNTS = {
    "A": lambda n: n * (n + 1),
    "B": lambda n: 2 * n * n,
    "C": lambda n: 2 * n * n,
    "D": lambda n: 2 * n * (n - 1),
    "E": lambda n: {6: 72, 7: 126, 8: 240}[n],
    "F": lambda n: 48,
    "G": lambda n: 12,
}


def check_type(ctype, rank):
    ctype = ctype.upper()
    ok = _ADMISSIBLE.get(ctype)
    if ok is None or not ok(rank):
        raise ValueError(f"inadmissible Cartan type {ctype}{rank}")
    return ctype


def cartan_matrix(ctype, rank):
    """Cartan matrix C[i][j] = <alpha_i, alpha_j^vee> (Bourbaki numbering)."""
    ctype = check_type(ctype, rank)
    n = rank
    C = 2 * np.eye(n, dtype=np.int64)

    def bond(i, j, cij=-1, cji=-1):
        C[i, j] = cij
        C[j, i] = cji

    if ctype in ("A", "B", "C"):
        for i in range(n - 1):
            bond(i, i + 1)
        if ctype == "B" and n >= 2:
            bond(n - 2, n - 1, -2, -1)  # alpha_n short
        if ctype == "C":
            bond(n - 2, n - 1, -1, -2)  # alpha_n long
    elif ctype == "D":
        for i in range(n - 2):
            bond(i, i + 1)
        bond(n - 3, n - 1)
    elif ctype == "E":
        chain = [(0, 2), (2, 3), (3, 4), (4, 5)] + [(i, i + 1) for i in range(5, n - 1)]
        for i, j in chain:
            bond(i, j)
        bond(1, 3)
    elif ctype == "F":
        bond(0, 1)
        bond(1, 2, -2, -1)  # alpha_1, alpha_2 long
        bond(2, 3)
    elif ctype == "G":
        bond(0, 1, -1, -3)  # alpha_1 short
    return C


def _symmetrizer(C):
    """Positive integers d with C_ij d_j = C_ji d_i; d_i = (alpha_i, alpha_i)/2.

    The symmetrized invariant form is then S = C @ diag(d).
    """
    n = C.shape[0]
    d = [None] * n
    d[0] = Fraction(1)
    todo = [0]
    while todo:
        i = todo.pop()
        for j in range(n):
            if i != j and C[i, j] != 0 and d[j] is None:
                d[j] = d[i] * Fraction(int(C[j, i]), int(C[i, j]))
                todo.append(j)
    assert all(x is not None for x in d)
    denom = 1
    for x in d:
        denom = denom * x.denominator // np.gcd(denom, x.denominator)
    ints = [int(x * denom) for x in d]
    g = 0
    for x in ints:
        g = int(np.gcd(g, x))
    return np.array([x // g for x in ints], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class RootSystem:
    """All roots of an irreducible type, in simple-root coordinates.

    Positive roots are ordered by height then reverse-lexicographically
    (alpha_1 before alpha_2 at equal height); negatives follow in the
    matching order, so index(-roots[r]) = r + npos.
    """

    ctype: str
    rank: int
    cartan: np.ndarray
    roots: tuple          # all roots as coordinate tuples
    npos: int
    index: dict           # root tuple -> index in roots
    sym_d: np.ndarray     # symmetrizer diagonal

    @property
    def nroots(self):
        return len(self.roots)

    def height(self, r):
        return sum(self.roots[r]) if isinstance(r, int) else sum(r)

    def neg_index(self, r):
        return r + self.npos if r < self.npos else r - self.npos

    def normsq(self, r):
        a = np.array(self.roots[r] if isinstance(r, int) else r, dtype=np.int64)
        S = self.cartan * self.sym_d[None, :]
        return int(a @ S @ a)

    def coroot(self, r):
        """Coroot coordinates in the simple-coroot basis."""
        a = self.roots[r] if isinstance(r, int) else r
        nsq = self.normsq(a)
        out = []
        for i, ai in enumerate(a):
            num = ai * 2 * int(self.sym_d[i])
            assert num % nsq == 0
            out.append(num // nsq)
        return tuple(out)

    def pairing_with_coroot(self, alpha, j):
        """<alpha, alpha_j^vee> for a root in simple-root coordinates."""
        a = self.roots[alpha] if isinstance(alpha, int) else alpha
        return int(sum(ai * int(self.cartan[i, j]) for i, ai in enumerate(a)))

    def root_string_p(self, a, b):
        """Largest p with a - p*b a root (a, b root tuples, a != +-b)."""
        p = 0
        cur = tuple(x - y for x, y in zip(a, b))
        while cur in self.index:
            p += 1
            cur = tuple(x - y for x, y in zip(cur, b))
        return p


@functools.lru_cache(maxsize=None)
def root_system(ctype, rank):
    """Generate the root system by reflection closure from the Cartan matrix."""
    ctype = check_type(ctype, rank)
    C = cartan_matrix(ctype, rank)
    n = rank
    simple = [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
    seen = set(simple)
    frontier = list(simple)
    while frontier:
        nxt = []
        for a in frontier:
            for j in range(n):
                pair = sum(a[i] * int(C[i, j]) for i in range(n))
                b = tuple(a[i] - (pair if i == j else 0) for i in range(n))
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    pos = sorted(
        (r for r in seen if sum(r) > 0),
        key=lambda r: (sum(r), tuple(-c for c in r)),
    )
    neg = [tuple(-c for c in r) for r in pos]
    roots = tuple(pos + neg)
    assert len(roots) == ROOT_COUNTS[ctype](rank)
    index = {r: i for i, r in enumerate(roots)}
    return RootSystem(ctype, rank, C, roots, len(pos), index, _symmetrizer(C))


@functools.lru_cache(maxsize=None)
def fundamental_group(ctype, rank):
    """Invariant factors (> 1) of the weight/root lattice quotient."""
    C = cartan_matrix(ctype, rank)
    snf = smith_normal_form(Matrix(C.tolist()))
    factors = [int(snf[i, i]) for i in range(rank)]
    return tuple(sorted(abs(f) for f in factors if abs(f) > 1))


# ---------------------------------------------------------------------------
# integer lattice helpers
# ---------------------------------------------------------------------------


def _hnf_rows(rows):
    """Row-style Hermite normal form basis of the lattice spanned by rows."""
    m = [list(map(int, r)) for r in rows]
    nrows = len(m)
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if m[i][c]:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        # euclidean elimination below the pivot
        changed = True
        while changed:
            changed = False
            for i in range(r + 1, nrows):
                if m[i][c]:
                    qd = m[i][c] // m[r][c]
                    m[i] = [x - qd * y for x, y in zip(m[i], m[r])]
                    if m[i][c]:
                        m[r], m[i] = m[i], m[r]
                        changed = True
        if m[r][c] < 0:
            m[r] = [-x for x in m[r]]
        for i in range(r):
            qd = m[i][c] // m[r][c]
            if qd:
                m[i] = [x - qd * y for x, y in zip(m[i], m[r])]
        r += 1
    return [row for row in m[:r]]


def _solve_right_exact(B, M):
    """X with X @ M == B over the rationals; raises if inconsistent."""
    Ms = Matrix([[int(x) for x in row] for row in M])
    Bs = Matrix([[int(x) for x in row] for row in B])
    X = Bs * Ms.inv()
    return X


def _int_matrix_or_none(X):
    rows = []
    for i in range(X.rows):
        row = []
        for j in range(X.cols):
            v = X[i, j]
            if v.q != 1:
                return None
            row.append(int(v))
        rows.append(row)
    return np.array(rows, dtype=np.int64)


# ---------------------------------------------------------------------------
# root data
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RootDatum:
    """Root datum: root system plus a character lattice of chosen isogeny.

    x_basis rows are the X-basis in fundamental-weight coordinates; the
    Y-basis is dual, so pairing(e_i, f_j) = delta_ij, alpha_in_x[r] gives
    <alpha_r, f_j> as its j-th entry, and coroot_in_y[r] expresses the
    coroot of root r in the Y-basis.
    """

    rs: RootSystem
    isogeny: str
    x_basis: np.ndarray      # (n, n) in weight coordinates
    alpha_in_x: np.ndarray   # (nroots, n)
    coroot_in_y: np.ndarray  # (nroots, n)

    @property
    def rank(self):
        return self.rs.rank

    @property
    def label(self):
        return f"{self.rs.ctype}{self.rs.rank}:{self.isogeny}"

    @property
    def pairing(self):
        return np.eye(self.rank, dtype=np.int64)

    def pair_root_basis(self, r, j):
        """<alpha_r, y_j> for the chosen Y-basis."""
        return int(self.alpha_in_x[r, j])

    def x_mod_root_lattice(self):
        """Invariant factors (> 1) of X / Z-span(roots)."""
        n = self.rank
        simple_rows = Matrix(self.alpha_in_x[:n].tolist())
        snf = smith_normal_form(simple_rows)
        out = []
        for i in range(min(snf.rows, snf.cols)):
            v = abs(int(snf[i, i]))
            if v > 1:
                out.append(v)
        return tuple(sorted(out))


def _normalize_isogeny(ctype, rank, isogeny):
    s = str(isogeny).strip().lower()
    if s in ("ad", "adjoint"):
        return "ad"
    if s in ("sc", "simplyconnected", "simply-connected"):
        return "sc"
    if ctype == "A":
        try:
            k = int(s)
        except ValueError:
            raise ValueError(f"invalid isogeny label {isogeny!r} for type A")
        if k < 1 or (rank + 1) % k != 0:
            raise ValueError(
                f"invalid isogeny A{rank}^({k}): {k} does not divide {rank + 1}"
            )
        if k == 1:
            return "ad"
        if k == rank + 1:
            return "sc"
        return str(k)
    if ctype == "D":
        valid = {"1"} if rank % 2 else {"1", "n-1", "n"}
        if s == str(rank):
            s = "n"
        elif s == str(rank - 1):
            s = "n-1"
        if s not in valid:
            raise ValueError(f"invalid isogeny label {isogeny!r} for D{rank}")
        return s
    raise ValueError(f"type {ctype}{rank} admits only 'ad' and 'sc' isogenies")


def isogeny_labels(ctype, rank):
    """All valid isogeny labels for the type, canonical spelling."""
    labels = ["ad", "sc"]
    if ctype == "A":
        labels += [str(k) for k in range(2, rank + 1) if (rank + 1) % k == 0]
    elif ctype == "D":
        labels += ["1"] if rank % 2 else ["1", "n-1", "n"]
    return labels


@functools.lru_cache(maxsize=None)
def root_datum(ctype, rank, isogeny="ad"):
    """Construct the root datum of the given type and isogeny class."""
    ctype = check_type(ctype, rank)
    rs = root_system(ctype, rank)
    iso = _normalize_isogeny(ctype, rank, isogeny)
    n = rank
    C = rs.cartan
    if iso == "ad":
        # HNF gives a canonical basis of the root lattice, so types with
        # trivial fundamental group get bit-identical ad and sc data
        basis = _hnf_rows([list(map(int, C[i])) for i in range(n)])
    elif iso == "sc":
        basis = [[1 if j == i else 0 for j in range(n)] for i in range(n)]
    else:
        extra = []
        if ctype == "A":
            k = int(iso)
            w = [0] * n
            w[0] = (rank + 1) // k
            extra.append(w)
        else:  # type D intermediate: adjoin one fundamental weight
            j = {"1": 0, "n-1": n - 2, "n": n - 1}[iso]
            w = [0] * n
            w[j] = 1
            extra.append(w)
        basis = _hnf_rows([list(map(int, C[i])) for i in range(n)] + extra)
        assert len(basis) == n
    M = np.array(basis, dtype=np.int64)

    # roots in X-coordinates: weight coords are a @ C, then change basis
    weight_coords = [
        [rs.pairing_with_coroot(r, j) for j in range(n)] for r in range(rs.nroots)
    ]
    X = _solve_right_exact(weight_coords, M.tolist())
    alpha_in_x = _int_matrix_or_none(X)
    if alpha_in_x is None:  # pragma: no cover - construction guarantees Q <= X
        raise ValueError("lattice does not contain the root lattice")

    # coroots in the dual Y-basis: integral for any X <= weight lattice
    coroot_in_y = np.array(
        [list(rs.coroot(r)) for r in range(rs.nroots)], dtype=np.int64
    ) @ M.T.astype(np.int64)

    datum = RootDatum(rs, iso, M, alpha_in_x, coroot_in_y)

    # structural validation: <alpha, alpha^vee> = 2 and the isogeny invariant
    for r in range(rs.nroots):
        assert int(alpha_in_x[r] @ coroot_in_y[r]) == 2
    expected = _expected_quotient(ctype, rank, iso)
    got = datum.x_mod_root_lattice()
    assert got == expected, (datum.label, got, expected)
    return datum


def _expected_quotient(ctype, rank, iso):
    if iso == "ad":
        return ()
    if iso == "sc":
        return fundamental_group(ctype, rank)
    if ctype == "A":
        return (int(iso),)
    return (2,)  # intermediate D-type labels all have order-2 quotient


def parse_label(text):
    """Parse a CLI label like 'A3:sc', 'A5:2', 'D6:n-1', or 'E8'."""
    text = text.strip()
    body, _, iso = text.partition(":")
    ctype = body[:1].upper()
    try:
        rank = int(body[1:])
    except ValueError:
        raise ValueError(f"cannot parse type/rank from {text!r}")
    if not iso:
        iso = "ad"
    return ctype, rank, iso
