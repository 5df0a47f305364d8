"""Arithmetic in GF(p^k) plus the univariate polynomial helpers built on it.

Field elements are plain Python ints in [0, q).  The base-p digits of the
int are the coefficients (ascending) of the residue polynomial modulo the
defining polynomial, so equal elements are identical ints and matrices can
live in numpy integer arrays.

Polynomials over a field are tuples of element ints, ascending degree,
with no trailing zeros; the zero polynomial is the empty tuple ().
"""

from __future__ import annotations

import functools

import numpy as np
from sympy import factorint, isprime

# Multiplication uses exp/log tables up to this field size; beyond it we
# fall back to direct packed-polynomial arithmetic (correct, much slower).
_TABLE_MAX = 1 << 16


def _digits(a, p, k):
    out = []
    for _ in range(k):
        out.append(a % p)
        a //= p
    return out


def _pack(coeffs, p):
    v = 0
    for c in reversed(coeffs):
        v = v * p + (c % p)
    return v


class Field:
    """GF(p^k) with canonical packed-int element representation.

    Instances are immutable; obtain them through :func:`field_make` so
    that equal (p, k, defining_poly) triples share one object.
    """

    def __init__(self, p, k, defining_poly=None):
        if k < 1:
            raise ValueError(f"extension degree must be >= 1, got {k}")
        if not isprime(p):
            raise ValueError(f"characteristic must be prime, got {p}")
        self.p = int(p)
        self.k = int(k)
        self.q = self.p ** self.k
        if defining_poly is None:
            defining_poly = _default_irreducible(self.p, self.k)
        defining_poly = tuple(int(c) % p for c in defining_poly)
        if len(defining_poly) != k + 1 or defining_poly[-1] != 1:
            raise ValueError("defining polynomial must be monic of degree k")
        if k > 1:
            prime = Field(p, 1) if self.k > 1 else self
            if not _is_irreducible(prime, defining_poly):
                raise ValueError("defining polynomial is reducible")
        elif defining_poly != (0, 1):
            raise ValueError("degree-1 defining polynomial must be x")
        self.poly = defining_poly
        self._ppow = [self.p ** i for i in range(self.k + 1)]
        self._exp = None
        self._log = None
        self._gen = None
        if self.q <= _TABLE_MAX:
            self._build_tables()

    # -- construction helpers -------------------------------------------

    def _build_tables(self):
        q = self.q
        g = self._find_generator()
        exp = np.zeros(2 * (q - 1), dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        e = 1
        for i in range(q - 1):
            exp[i] = e
            exp[i + q - 1] = e
            log[e] = i
            e = self._mul_raw(e, g)
        assert e == 1, "generator order mismatch"
        self._exp = exp
        self._log = log
        self._gen = g
        # sentinel tables: log(0) points into an all-zero region of exp,
        # so array multiplication is a single gather without zero masks
        sentinel = 2 * (q - 1)
        logz = np.empty(q, dtype=np.int64)
        logz[0] = sentinel
        logz[1:] = log[1:]
        expz = np.zeros(2 * sentinel + 1, dtype=np.int64)
        expz[: 2 * (q - 1)] = exp
        self._logz = logz
        self._expz = expz

    def _find_generator(self):
        if self.q == 2:
            return 1
        fac = list(factorint(self.q - 1))
        cofactors = [(self.q - 1) // ell for ell in fac]
        cand = 1
        while True:
            cand += 1
            if cand >= self.q:
                raise RuntimeError("no generator found")  # pragma: no cover
            if all(self._pow_raw(cand, m) != 1 for m in cofactors):
                return cand

    # -- raw scalar arithmetic (no tables) -------------------------------

    def _mul_raw(self, a, b):
        p, k = self.p, self.k
        if k == 1:
            return (a * b) % p
        da = _digits(a, p, k)
        db = _digits(b, p, k)
        conv = [0] * (2 * k - 1)
        for i, ca in enumerate(da):
            if ca:
                for j, cb in enumerate(db):
                    conv[i + j] += ca * cb
        # reduce degree >= k terms with x^k = -(poly[:k])
        red = [(-c) % p for c in self.poly[:k]]
        for t in range(2 * k - 2, k - 1, -1):
            c = conv[t] % p
            if c:
                conv[t] = 0
                for j, r in enumerate(red):
                    conv[t - k + j] += c * r
        return _pack([c % p for c in conv[:k]], p)

    def _pow_raw(self, a, e):
        r = 1
        b = a
        while e:
            if e & 1:
                r = self._mul_raw(r, b)
            b = self._mul_raw(b, b)
            e >>= 1
        return r

    def _inv_raw(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return self._pow_raw(a, self.q - 2)

    # -- scalar operations ------------------------------------------------

    def add(self, a, b):
        p = self.p
        if p == 2:
            return a ^ b
        if self.k == 1:
            return (a + b) % p
        out = 0
        for pe in self._ppow[: self.k]:
            out += ((a // pe + b // pe) % p) * pe
        return out

    def neg(self, a):
        p = self.p
        if p == 2:
            return a
        if self.k == 1:
            return (-a) % p
        out = 0
        for pe in self._ppow[: self.k]:
            out += ((-(a // pe)) % p) * pe
        return out

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        if self._exp is not None:
            return int(self._exp[self._log[a] + self._log[b]])
        return self._mul_raw(a, b)

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self._exp is not None:
            return int(self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)])
        return self._inv_raw(a)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e):
        if e < 0:
            return self.pow(self.inv(a), -e)
        if a == 0:
            return 0 if e else 1
        if self._exp is not None:
            return int(self._exp[(self._log[a] * e) % (self.q - 1)])
        return self._pow_raw(a, e)

    def frobenius(self, a):
        return self.pow(a, self.p)

    def from_int(self, n):
        """Embed an integer via n * 1 (reduction of a rational integer)."""
        return n % self.p

    def coeffs(self, a):
        return tuple(_digits(a, self.p, self.k))

    def from_coeffs(self, coeffs):
        if len(coeffs) > self.k:
            raise ValueError("too many coefficients")
        return _pack(list(coeffs) + [0] * (self.k - len(coeffs)), self.p)

    def elements(self):
        return range(self.q)

    # -- vectorized operations on numpy int arrays ------------------------

    def add_arr(self, A, B):
        p = self.p
        if p == 2:
            return np.bitwise_xor(A, B)
        if self.k == 1:
            return (A + B) % p
        out = np.zeros(np.broadcast(A, B).shape, dtype=np.int64)
        for pe in self._ppow[: self.k]:
            out += ((A // pe + B // pe) % p) * pe
        return out

    def neg_arr(self, A):
        p = self.p
        if p == 2:
            return A.copy() if isinstance(A, np.ndarray) else np.asarray(A)
        if self.k == 1:
            return (-A) % p
        out = np.zeros(np.shape(A), dtype=np.int64)
        for pe in self._ppow[: self.k]:
            out += ((-(A // pe)) % p) * pe
        return out

    def sub_arr(self, A, B):
        return self.add_arr(A, self.neg_arr(B))

    def sum_arr(self, A, axis=0):
        """Field sum reduction along an axis of a packed-element array."""
        A = np.asarray(A, dtype=np.int64)
        p = self.p
        if p == 2:
            return np.bitwise_xor.reduce(A, axis=axis)
        if self.k == 1:
            return A.sum(axis=axis) % p
        out = None
        for pe in self._ppow[: self.k]:
            plane = (((A // pe) % p).sum(axis=axis) % p) * pe
            out = plane if out is None else out + plane
        return out

    def mul_arr(self, A, B):
        A = np.asarray(A)
        B = np.asarray(B)
        if self.k == 1:
            if self.p == 2:
                return A & B
            return (A * B) % self.p
        if self._exp is not None:
            return self._expz[self._logz[A] + self._logz[B]]
        mul = np.frompyfunc(self._mul_raw, 2, 1)
        return mul(A, B).astype(np.int64)

    def _planes(self, A):
        p = self.p
        return [((A // pe) % p).astype(np.float64) for pe in self._ppow[: self.k]]

    @functools.cached_property
    def _reduction_rows(self):
        # row t = coefficients of x^t mod defining poly, 0 <= t <= 2k-2
        prime = Field(self.p, 1) if self.k > 1 else self
        rows = []
        for t in range(2 * self.k - 1):
            xt = (0,) * t + (1,)
            r = poly_mod(prime, xt, self.poly)
            rows.append(list(r) + [0] * (self.k - len(r)))
        return rows

    _LOOKUP_MATMUL_MAX = 1 << 21

    def matmul(self, A, B):
        """Exact matrix product of packed-element arrays."""
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        p, k = self.p, self.k
        n_inner = A.shape[-1]
        if k == 1:
            if n_inner * (p - 1) ** 2 < 2**53:
                C = np.rint(A.astype(np.float64) @ B.astype(np.float64))
                return C.astype(np.int64) % p
            return (A @ B) % p
        if (
            self._exp is not None
            and A.shape[0] * n_inner * B.shape[1] <= self._LOOKUP_MATMUL_MAX
        ):
            prods = self.mul_arr(A[:, :, None], B[None, :, :])
            return self.sum_arr(prods, axis=1)
        ap = self._planes(A)
        bp = self._planes(B)
        conv = [None] * (2 * k - 1)
        for i in range(k):
            for j in range(k):
                prod = ap[i] @ bp[j]
                t = i + j
                conv[t] = prod if conv[t] is None else conv[t] + prod
        conv = [np.rint(c).astype(np.int64) % p for c in conv]
        red = self._reduction_rows
        out = np.zeros(conv[0].shape, dtype=np.int64)
        for s in range(k):
            plane = np.zeros(conv[0].shape, dtype=np.int64)
            for t in range(2 * k - 1):
                r = red[t][s]
                if r:
                    plane += r * conv[t]
            out += (plane % p) * self._ppow[s]
        return out

    def matvec(self, A, v):
        v = np.asarray(v, dtype=np.int64)
        if self.k == 1 or self._exp is not None:
            return self.sum_arr(self.mul_arr(A, v[None, :]), axis=1)
        return self.matmul(A, v[:, None])[:, 0]

    # -- misc --------------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, Field)
            and (self.p, self.k, self.poly) == (other.p, other.k, other.poly)
        )

    def __hash__(self):
        return hash((self.p, self.k, self.poly))

    def __repr__(self):
        if self.k == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.k})"

    def describe(self):
        return {"p": self.p, "k": self.k, "defining_poly": list(self.poly)}


@functools.lru_cache(maxsize=None)
def _cached_field(p, k, poly):
    return Field(p, k, poly)


def field_make(p, k, defining_poly=None):
    """Return GF(p^k), choosing the default defining polynomial if omitted.

    The default is the lexicographically least monic irreducible of degree
    k over GF(p) (least packed integer of the non-leading coefficients),
    so two calls with the same (p, k) are interoperable.
    """
    if defining_poly is not None:
        defining_poly = tuple(int(c) for c in defining_poly)
    else:
        if k < 1:
            raise ValueError(f"extension degree must be >= 1, got {k}")
        if not isprime(p):
            raise ValueError(f"characteristic must be prime, got {p}")
        defining_poly = _default_irreducible(p, k)
    return _cached_field(int(p), int(k), defining_poly)


@functools.lru_cache(maxsize=None)
def _default_irreducible(p, k):
    if k == 1:
        return (0, 1)
    prime = Field(p, 1)
    for low in range(p**k):
        f = tuple(_digits(low, p, k)) + (1,)
        if _is_irreducible(prime, f):
            return f
    raise RuntimeError("no irreducible polynomial found")  # pragma: no cover


def _is_irreducible(prime_field, f):
    """Rabin's test for f over GF(p); f monic of degree >= 1 assumed."""
    k = len(f) - 1
    if k == 1:
        return True
    x = (0, 1)
    # x^(p^k) == x mod f
    t = x
    for _ in range(k):
        t = poly_pow_mod(prime_field, t, prime_field.p, f)
    if poly_trim(poly_sub(prime_field, t, x)) != ():
        return False
    for ell in factorint(k):
        t = x
        for _ in range(k // ell):
            t = poly_pow_mod(prime_field, t, prime_field.p, f)
        g = poly_gcd(prime_field, poly_sub(prime_field, t, x), f)
        if poly_deg(g) != 0:
            return False
    return True


# ---------------------------------------------------------------------------
# polynomials: tuples of element ints, ascending, trimmed
# ---------------------------------------------------------------------------


def poly_trim(cs):
    cs = tuple(cs)
    n = len(cs)
    while n > 0 and cs[n - 1] == 0:
        n -= 1
    return cs[:n]


def poly_deg(f):
    return len(f) - 1


def poly_add(F, f, g):
    if len(f) < len(g):
        f, g = g, f
    out = list(f)
    for i, c in enumerate(g):
        out[i] = F.add(out[i], c)
    return poly_trim(out)


def poly_neg(F, f):
    return tuple(F.neg(c) for c in f)


def poly_sub(F, f, g):
    return poly_add(F, f, poly_neg(F, g))


def poly_scale(F, c, f):
    if c == 0:
        return ()
    return poly_trim(F.mul(c, a) for a in f)


def poly_mul(F, f, g):
    if not f or not g:
        return ()
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                if b:
                    out[i + j] = F.add(out[i + j], F.mul(a, b))
    return poly_trim(out)


def poly_divmod(F, f, g):
    g = poly_trim(g)
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    f = list(poly_trim(f))
    dg = len(g) - 1
    inv_lead = F.inv(g[-1])
    quot = [0] * max(0, len(f) - dg)
    while len(f) - 1 >= dg and f:
        c = F.mul(f[-1], inv_lead)
        shift = len(f) - 1 - dg
        quot[shift] = c
        for i, b in enumerate(g):
            f[shift + i] = F.sub(f[shift + i], F.mul(c, b))
        while f and f[-1] == 0:
            f.pop()
    return poly_trim(quot), poly_trim(f)


def poly_mod(F, f, g):
    return poly_divmod(F, f, g)[1]


def poly_monic(F, f):
    f = poly_trim(f)
    if not f or f[-1] == 1:
        return f
    return poly_scale(F, F.inv(f[-1]), f)


def poly_gcd(F, f, g):
    """Monic gcd; poly_gcd(f, 0) is monic(f)."""
    a, b = poly_trim(f), poly_trim(g)
    while b:
        a, b = b, poly_mod(F, a, b)
    return poly_monic(F, a)


def poly_eval(F, f, a):
    acc = 0
    for c in reversed(f):
        acc = F.add(F.mul(acc, a), c)
    return acc


def poly_eval_many(F, f, points):
    """Evaluate f at a numpy array of points (vectorized Horner)."""
    pts = np.asarray(points, dtype=np.int64)
    acc = np.zeros(pts.shape, dtype=np.int64)
    for c in reversed(f):
        acc = F.add_arr(F.mul_arr(acc, pts), np.full(pts.shape, c, dtype=np.int64))
    return acc


def poly_deriv(F, f):
    return poly_trim(F.mul(F.from_int(i), c) for i, c in enumerate(f) if i >= 1)


def poly_pow_mod(F, base, e, m):
    if poly_deg(m) < 1:
        raise ValueError("modulus must have degree >= 1")
    r = (1,)
    b = poly_mod(F, base, m)
    while e:
        if e & 1:
            r = poly_mod(F, poly_mul(F, r, b), m)
        b = poly_mod(F, poly_mul(F, b, b), m)
        e >>= 1
    return r


def xq_mod(F, m):
    """x^q mod m by repeated squaring (q = |F|), never materializing x^q."""
    if poly_deg(m) < 1:
        raise ValueError("modulus must have degree >= 1")
    return poly_pow_mod(F, (0, 1), F.q, m)


def is_squarefree(F, f):
    f = poly_trim(f)
    if poly_deg(f) <= 0:
        return True
    d = poly_deriv(F, f)
    if not d:
        return False  # f = g^p in characteristic p
    return poly_deg(poly_gcd(F, f, d)) == 0


def splits_over_field(F, f):
    """True iff f divides x^q - x (all roots in F, squarefree aside)."""
    f = poly_trim(f)
    if poly_deg(f) < 1:
        return True
    xq = xq_mod(F, f)
    return poly_trim(poly_sub(F, xq, poly_mod(F, (0, 1), f))) == ()


_EXHAUSTIVE_ROOTS_MAX = 4096


def roots_in_field(F, m, rng=None):
    """All roots of m lying in F, as a dict {root: multiplicity}.

    Exhaustive evaluation for small fields; for larger fields the split
    part gcd(m, x^q - x) is extracted and factored into linear pieces by
    randomized splitting.
    """
    m = poly_trim(m)
    if not m:
        raise ValueError("zero polynomial")
    if poly_deg(m) == 0:
        return {}
    if F.q <= _EXHAUSTIVE_ROOTS_MAX:
        pts = np.arange(F.q, dtype=np.int64)
        vals = poly_eval_many(F, m, pts)
        roots = [int(r) for r in pts[vals == 0]]
    else:
        import random

        rng = rng or random.Random(0xF1E1D)
        g = poly_gcd(F, m, poly_sub(F, xq_mod(F, m), poly_mod(F, (0, 1), m)))
        roots = sorted(_linear_roots(F, g, rng))
    out = {}
    for r in roots:
        lin = (F.neg(r), 1)
        mult = 0
        rem = m
        while True:
            quo, res = poly_divmod(F, rem, lin)
            if res:
                break
            mult += 1
            rem = quo
        out[r] = mult
    return out


def _linear_roots(F, g, rng):
    """Roots of a squarefree product of linear factors, by random splitting."""
    g = poly_monic(F, g)
    d = poly_deg(g)
    if d <= 0:
        return []
    if d == 1:
        return [F.neg(g[0])]
    if g[0] == 0:
        return [0] + _linear_roots(F, poly_trim(g[1:]), rng)
    while True:
        a = rng.randrange(1, F.q)
        if F.p == 2:
            # trace polynomial of a*x separates roots by absolute trace
            t = (0, a)
            acc = t
            for _ in range(F.k - 1):
                t = poly_mod(F, poly_mul(F, t, t), g)
                acc = poly_add(F, acc, t)
            h = poly_gcd(F, g, acc)
        else:
            b = rng.randrange(F.q)
            # split g(x + b): roots r of g correspond to roots r - b of the shift
            shifted = _compose_linear(F, g, b)
            s = poly_pow_mod(F, (0, 1), (F.q - 1) // 2, shifted)
            h0 = poly_gcd(F, shifted, poly_sub(F, s, (1,)))
            h = _compose_linear(F, h0, F.neg(b))
        dh = poly_deg(h)
        if 0 < dh < d:
            rest = poly_divmod(F, g, h)[0]
            return _linear_roots(F, h, rng) + _linear_roots(F, rest, rng)


def _compose_linear(F, f, b):
    """f(x + b)."""
    out = ()
    for c in reversed(f):
        out = poly_add(F, poly_mul(F, out, (b, 1)), (c,))
    return out


def field_embedding(F, G):
    """Lookup array mapping elements of F into an extension field G.

    Requires F.p == G.p and F.k | G.k.  The image of x is the root of F's
    defining polynomial in G with the least packed encoding, making the
    embedding deterministic.
    """
    if F.p != G.p or G.k % F.k != 0:
        raise ValueError("no embedding between these fields")
    if F.k == 1:
        table = np.arange(F.p, dtype=np.int64)
        return table
    img_poly = tuple(c for c in F.poly)  # coefficients already in GF(p) c G
    roots = sorted(roots_in_field(G, img_poly))
    theta = roots[0]
    table = np.zeros(F.q, dtype=np.int64)
    for a in range(F.q):
        acc = 0
        for c in reversed(F.coeffs(a)):
            acc = G.add(G.mul(acc, theta), c)
        table[a] = acc
    return table
