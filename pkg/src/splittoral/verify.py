"""Machine-checkable reproductions of the structural facts the solvers rely on.

Covers the characteristic-2 eigenspace table (dimensions of S = <V>,
[S,S], [S,S] n H, I = (V), [I,I] and the fired case per root-space class),
the absence of regular semisimple elements for the degenerate symplectic
families, the rank-4 symplectic counterexample where a 3-dimensional
split toral subalgebra extends to no split 4-dimensional one, and the
reductive-rank invariance of dim C_L(H-hat) over Cartan subalgebras.
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import linalg as la
from . import liealg as lie
from .chevalley import chevalley_algebra
from .ff import field_make
from .linalg import char_poly
from .rootdata import root_datum


@dataclass
class Table1Row:
    label: str
    mult_dim: int
    mult_count: int
    zero_weight: bool
    dim_s: int
    dim_ss: int
    dim_ss_cap_h: int
    dim_i: int
    dim_ii: int
    ii_equals_i: bool
    dim_l: int
    case: str

    def i_code(self):
        if self.dim_i == self.dim_l:
            return "L"
        if self.dim_i == self.dim_l - 1:
            return "L-1"
        return str(self.dim_i)

    def ii_code(self):
        return "=I" if self.ii_equals_i else str(self.dim_ii)


def _guard_case(dim_v, S, SS, I, II):
    """The case ladder of the eigenspace subroutine, guards in order."""
    if SS.dim == 1:
        return "A"
    if II == I and SS.dim in (2, 3):
        return "B"
    if I.dim != 0 and I.dim % 2 == 0 and II.dim == 0 and SS.dim == 0:
        return "C"
    if S.dim == 6 and II == S and SS.dim == 2:
        return "D"
    if I.dim != 0 and I.dim % 2 == 0 and II.dim != 0 and SS.dim == 0:
        return "E"
    if dim_v % 2 == 0 and SS.dim != 0:
        return "F"
    return "-"


def compute_table1_rows(ctype, rank, isogeny, q):
    """Root-space classes of L over GF(q) (q a power of 2) with their
    generated subalgebra/ideal data and the fired case label."""
    p, k = _split_power_of_two(q)
    F = field_make(2, k)
    dat = root_datum(ctype, rank, isogeny)
    L, H = chevalley_algebra(dat, F)
    n = dat.rank
    groups = defaultdict(list)
    for r in range(dat.rs.nroots):
        w = tuple(F.from_int(int(x)) for x in dat.alpha_in_x[r])
        groups[w].append(n + r)
    classes = {}
    for w, idxs in sorted(groups.items()):
        V = la.subspace_from_rows(F, la.eye(L.dim)[idxs], n=L.dim)
        key = (V.dim, not any(w))
        entry = classes.setdefault(key, {"count": 0, "rep": V})
        entry["count"] += 1
    rows = []
    label = dat.label
    for (dim_v, bold), entry in sorted(classes.items(), key=lambda kv: (-kv[0][0], kv[0][1])):
        V = entry["rep"]
        S = lie.subalgebra_closure(L, V).subspace
        I = lie.ideal_closure(L, V).subspace
        SS = lie.bracket_span(L, S, S)
        II = lie.bracket_span(L, I, I)
        SSH = la.subspace_intersect(F, SS, H.subspace)
        rows.append(
            Table1Row(
                label=label,
                mult_dim=dim_v,
                mult_count=entry["count"],
                zero_weight=bold,
                dim_s=S.dim,
                dim_ss=SS.dim,
                dim_ss_cap_h=SSH.dim,
                dim_i=I.dim,
                dim_ii=II.dim,
                ii_equals_i=(II == I),
                dim_l=L.dim,
                case=_guard_case(dim_v, S, SS, I, II),
            )
        )
    return rows


def _split_power_of_two(q):
    k = 0
    t = q
    while t > 1 and t % 2 == 0:
        t //= 2
        k += 1
    if t != 1 or k == 0:
        raise ValueError(f"{q} is not a positive power of 2")
    return 2, k


# Reference rows, one tuple per recorded source row:
# (mult_dim, mult_count, bold, S, SS, SS^H, I-code, II-code-or-None, case)
# None means the cell is blank in the source table (unreported).
def _comb2(n):
    return n * (n - 1) // 2


def expected_table1(ctype, rank, isogeny, dim_l):
    n = rank
    key = f"{ctype}{rank}:{isogeny}"
    fixed = {
        "A1:ad": [(2, 1, False, 2, 0, 0, "2", "2", "C")],
        "A1:sc": [(2, 1, True, 3, 1, 1, "3", "1", "A")],
        "A3:sc": [(4, 3, False, 6, 2, 2, "L", "=I", "B")],
        "A3:2": [(4, 3, False, 5, 1, 1, "L-1", "=I", "A")],
        "B2:ad": [
            (4, 1, False, 5, 1, 1, "9", "5", "A"),
            (2, 2, False, 2, 0, 0, "4", "0", "C"),
        ],
        "B2:sc": [
            (4, 1, False, 5, 1, 1, "5", "1", "A"),
            (4, 1, True, 6, 2, 2, "L", "6", "D"),
        ],
        "B3:sc": [(6, 3, False, 8, 2, 2, "L", "=I", "B")],
        "B4:sc": [
            (8, 3, False, 11, 3, 3, "L", "=I", "B"),
            (2, 4, False, 3, 1, 1, "9", "1", "A"),
        ],
        "D4:sc": [(8, 3, False, 11, 3, 3, "L", "=I", "B")],
        "D4:1": [(4, 6, False, 5, 1, 1, "L-1", "=I", "A")],
        "D4:n-1": [(4, 6, False, 5, 1, 1, "L-1", "=I", "A")],
        "D4:n": [(4, 6, False, 5, 1, 1, "L-1", "=I", "A")],
        "F4:ad": [
            (8, 3, False, 11, 3, 3, "L", "=I", "B"),
            (2, 12, False, 3, 1, 1, "26", "=I", "A"),
        ],
        "G2:ad": [(4, 3, False, 5, 1, 1, "L", "=I", "A")],
    }
    if key in fixed:
        return fixed[key]
    if ctype == "B" and isogeny == "ad" and n >= 3:
        return [
            (4, _comb2(n), False, 5, 1, 1, "L-1", "=I", "A"),
            (2, n, False, 2, 0, 0, str(2 * n), "0", "C"),
        ]
    if ctype == "B" and isogeny == "sc" and n >= 5:
        return [
            (4, _comb2(n), False, 6, 2, 2, "L", "=I", "B"),
            (2, n, False, 3, 1, 1, str(2 * n + 1), "1", "A"),
        ]
    if ctype == "C" and isogeny == "ad" and n >= 3:
        return [
            (2 * n, 1, False, 3 * n - 1, n - 1, n - 1, "L", None, "F"),
            (2, n * (n - 1), False, 3, 1, 1, None, "=I", "A"),
        ]
    if ctype == "C" and isogeny == "sc" and n >= 3:
        return [
            (2 * n, 1, True, 3 * n, n, n, "L", None, "F"),
            (4, _comb2(n), False, 5, 1, 1, None, "=I", "A"),
        ]
    if ctype == "D" and isogeny == "sc" and n >= 5:
        return [(4, _comb2(n), False, 6, 2, 2, "L", "=I", "B")]
    if ctype == "D" and isogeny == "1" and n >= 5:
        return [(4, _comb2(n), False, 5, 1, 1, "L-1", "=I", "A")]
    raise ValueError(f"no reference rows for {key}")


# Cells where a faithful computation provably deviates from the recorded
# reference values; each run re-detects them and reports them as logged
# discrepancies instead of failures.  Keys: (label, zero_weight, mult_dim, cell).
KNOWN_DISCREPANCIES = {
    # reference [I,I] = 2, but [V, V] = 0 for the 2-dimensional root space
    # of A1:ad (the coroot vanishes modulo 2)
    ("A1:ad", False, 2, "ii"): {"reference": "2", "computed": "0"},
    # reference I = L, but the span of coroots modulo 2 has corank 1 in H
    # for the adjoint symplectic family
    ("C:ad-long", False, None, "i"): {"reference": "L", "computed": "L-1"},
    # reference case (D); the literal guard [I,I] = S fails as subspaces
    # (equal dimensions, different spaces) and case (F) fires with the
    # identical action (random nonzero element of [S,S])
    ("B2:sc", True, 4, "case"): {"reference": "D", "computed": "F"},
}


@dataclass
class RowComparison:
    label: str
    row: Table1Row
    expected: tuple
    mismatches: list = dc_field(default_factory=list)
    logged: list = dc_field(default_factory=list)

    @property
    def ok(self):
        return not self.mismatches


def _discrepancy_key(label, ctype, isogeny, bold, mult_dim, cell):
    if (label, bold, mult_dim, cell) in KNOWN_DISCREPANCIES:
        return (label, bold, mult_dim, cell)
    if ctype == "C" and isogeny == "ad" and cell == "i" and not bold:
        key = ("C:ad-long", False, None, "i")
        if key in KNOWN_DISCREPANCIES:
            return key
    return None


def check_table1(ctype, rank, isogeny, q=2):
    """Compare computed rows against the recorded reference rows.

    Returns a list of RowComparison; unreported (blank) reference cells
    are recorded but never counted as mismatches, and the known reference
    discrepancies are logged rather than failed.
    """
    rows = compute_table1_rows(ctype, rank, isogeny, q)
    expected = expected_table1(ctype, rank, isogeny, rows[0].dim_l if rows else 0)
    label = f"{ctype}{rank}:{isogeny}"
    out = []
    matched = set()
    for exp in expected:
        (e_dim, e_count, e_bold, e_s, e_ss, e_ssh, e_icode, e_iicode, e_case) = exp
        row = next(
            (
                r
                for r in rows
                if (r.mult_dim, r.zero_weight) == (e_dim, e_bold)
            ),
            None,
        )
        comp = RowComparison(label=label, row=row, expected=exp)
        if row is None:
            comp.mismatches.append(("missing class", (e_dim, e_bold)))
            out.append(comp)
            continue
        matched.add((row.mult_dim, row.zero_weight))

        def cell(name, got, want):
            if want is None:
                return
            got_s, want_s = str(got), str(want)
            if got_s == want_s:
                return
            key = _discrepancy_key(label, ctype, isogeny, row.zero_weight, row.mult_dim, name)
            if key is not None:
                known = KNOWN_DISCREPANCIES[key]
                if known["reference"] == want_s and known["computed"] == got_s:
                    comp.logged.append((name, want_s, got_s))
                    return
            comp.mismatches.append((name, want_s, got_s))

        cell("mult_count", row.mult_count, e_count)
        cell("s", row.dim_s, e_s)
        cell("ss", row.dim_ss, e_ss)
        cell("ss_cap_h", row.dim_ss_cap_h, e_ssh)
        # integer I-codes compare by dimension so "L" matches dim L exactly
        cell("i", row.i_code(), _canon_icode(e_icode, row.dim_l))
        cell("ii", row.ii_code(), _canon_iicode(e_iicode, row))
        cell("case", row.case, e_case)
        out.append(comp)
    for r in rows:
        if (r.mult_dim, r.zero_weight) not in matched:
            comp = RowComparison(label=label, row=r, expected=None)
            comp.mismatches.append(("unexpected class", (r.mult_dim, r.zero_weight)))
            out.append(comp)
    return out


def _canon_icode(code, dim_l):
    if code is None:
        return None
    if code == "L":
        return "L"
    if code == "L-1":
        return "L-1"
    v = int(code)
    if v == dim_l:
        return "L"
    if v == dim_l - 1:
        return "L-1"
    return str(v)


def _canon_iicode(code, row):
    if code is None:
        return None
    if code == "=I":
        return "=I"
    if int(code) == row.dim_i and row.ii_equals_i:
        return "=I"
    return str(code)


TABLE1_ACCEPTANCE_LABELS = [
    ("A", 1, "ad"), ("A", 1, "sc"), ("A", 3, "sc"), ("A", 3, "2"),
    ("B", 2, "ad"), ("B", 2, "sc"), ("B", 3, "ad"), ("B", 3, "sc"),
    ("B", 4, "sc"), ("B", 5, "sc"),
    ("C", 3, "ad"), ("C", 3, "sc"), ("C", 4, "ad"), ("C", 4, "sc"),
    ("D", 4, "sc"), ("D", 4, "1"), ("D", 5, "sc"), ("D", 5, "1"),
    ("F", 4, "ad"), ("G", 2, "ad"),
]


# ---------------------------------------------------------------------------
# absence of regular semisimple elements
# ---------------------------------------------------------------------------


@dataclass
class Prop1Record:
    label: str
    q: int
    mode: str            # "exhaustive" or "structural"
    ok: bool
    detail: str


def prop1_check(ctype, rank, q, mode="auto"):
    """No regular semisimple elements in the listed char-2 families.

    Exhaustive scan for tiny instances; otherwise structural: the
    standard toral subalgebra is a proper subspace of its centralizer
    because zero-weight root spaces exist.  `mode` forces either path.
    """
    allowed = (ctype == "A" and rank == 1) or (ctype == "B" and rank == 2) or (
        ctype == "C" and rank >= 3
    )
    if not allowed:
        raise ValueError(f"{ctype}{rank}^sc is not covered by this statement")
    _, k = _split_power_of_two(q)
    F = field_make(2, k)
    dat = root_datum(ctype, rank, "sc")
    L, H = chevalley_algebra(dat, F)
    label = dat.label
    exhaustive = F.q**L.dim <= 2**10 and F.q == 2 if mode == "auto" else (
        mode == "exhaustive"
    )
    if exhaustive:
        bad = []
        for code in range(F.q**L.dim):
            v = np.array(
                [(code >> i) & 1 for i in range(L.dim)], dtype=np.int64
            )
            if lie.is_regular_semisimple(L, v):
                bad.append(v)
        return Prop1Record(
            label, q, "exhaustive", not bad, f"scanned {F.q ** L.dim} elements"
        )
    C = lie.centralizer_of_subspace(L, H.subspace)
    ok = C.dim > rank
    return Prop1Record(
        label,
        q,
        "structural",
        ok,
        f"dim C_L(H_std) = {C.dim} > rank {rank}: zero-weight root spaces force "
        "H c C_L(H) strictly, so no centralizer is exactly a maximal torus",
    )


# ---------------------------------------------------------------------------
# the rank-4 symplectic counterexample
# ---------------------------------------------------------------------------


@dataclass
class Prop2Record:
    ok: bool
    eigenspace_dims: tuple
    dim_centralizer_l0: int
    candidates_checked: int
    all_candidates_nonsplit: bool
    charpoly_matches: bool
    detail: str = ""


def prop2_counterexample():
    """A 3-dimensional split toral subalgebra of C4^sc / GF(2) that no
    4-dimensional split toral subalgebra contains."""
    F = field_make(2, 1)
    dat = root_datum("C", 4, "sc")
    L, _ = chevalley_algebra(dat, F)
    rs = dat.rs
    n = 4

    def xv(coords):
        return n + rs.index[tuple(coords)]

    def elem(h_idx=(), roots=()):
        v = np.zeros(L.dim, dtype=np.int64)
        for i in h_idx:
            v[i] = 1
        for c in roots:
            v[xv(c)] = 1
        return v

    y1 = elem(h_idx=(0, 2))
    y2 = elem(h_idx=(0,), roots=[(0, 1, 2, 1), (-1, -1, -1, 0)])
    y3 = elem(
        h_idx=(1,),
        roots=[(0, 0, 1, 0), (0, 0, -1, 0), (1, 2, 2, 1), (-1, -2, -2, -1)],
    )

    Z = lie.center(L)
    ok = la.contains_vector(F, Z, y1)
    H = la.subspace_from_rows(F, np.vstack([y1, y2, y3]), n=L.dim)
    ok = ok and H.dim == 3
    cert = lie.is_split_toral(L, H, 3)
    ok = ok and isinstance(cert, lie.ToralCertificate)
    dims = tuple(sorted(d for (_, d) in cert.weights)) if ok else ()
    ok = ok and dims == (8, 8, 8, 12)

    zero_blocks = [U for (w, d), U in zip(cert.weights, _blocks_of(cert)) if not any(w)]
    L0 = zero_blocks[0]
    C = lie.centralizer_of_subspace(L, L0)
    ok = ok and C.dim == 4
    for y in (y1, y2, y3):
        ok = ok and la.contains_vector(F, C, y)

    # every element of C_L(L0) outside H must fail to be split semisimple
    candidates = 0
    all_nonsplit = True
    for code in range(1, F.q**C.dim):
        coeffs = np.array([(code >> i) & 1 for i in range(C.dim)], dtype=np.int64)
        y = F.matmul(coeffs[None, :], C.basis)[0]
        if la.contains_vector(F, H, y):
            continue
        candidates += 1
        if lie.is_split_semisimple(L, y):
            all_nonsplit = False
    ok = ok and all_nonsplit

    y_special = elem(
        h_idx=(2, 3),
        roots=[
            (0, 0, 1, 0),
            (0, 1, 1, 1),
            (0, 1, 2, 1),
            (0, 0, -1, 0),
            (-1, -1, 0, 0),
        ],
    )
    ok_member = la.contains_vector(F, C, y_special) and not la.contains_vector(
        F, H, y_special
    )
    cp = char_poly(F, L.ad(y_special))
    expected = _c4_charpoly(F)
    charpoly_matches = cp == expected
    ok = ok and ok_member and charpoly_matches
    return Prop2Record(
        ok,
        dims,
        C.dim,
        candidates,
        all_nonsplit,
        charpoly_matches,
        detail="x^16 (x+1)^4 (x^2+x+1)^8" if charpoly_matches else f"char poly {cp}",
    )


def _blocks_of(cert):
    """Recover the eigenspace blocks (as Subspaces) from a certificate."""
    F2 = field_make(2, 1)
    out = []
    start = 0
    for (_, d) in cert.weights:
        rows = cert.eigenbasis[start : start + d]
        out.append(la.subspace_from_rows(F2, rows, n=cert.eigenbasis.shape[1]))
        start += d
    return out


def _c4_charpoly(F):
    from .ff import poly_mul

    f = (1,)
    for factor, mult in (((0, 1), 16), ((1, 1), 4), ((1, 1, 1), 8)):
        for _ in range(mult):
            f = poly_mul(F, f, factor)
    return f


# ---------------------------------------------------------------------------
# reductive rank via Cartan subalgebras
# ---------------------------------------------------------------------------


@dataclass
class LemmaRecord:
    label: str
    q: int
    ranks_seen: tuple
    ok: bool


def lemma_rank_check(ctype, rank, isogeny, q, seeds=(0, 1, 2, 3, 4)):
    """dim C_L(H-hat) equals the rank for independently seeded Cartan
    subalgebras."""
    p, k = _factor_prime_power(q)
    F = field_make(p, k)
    dat = root_datum(ctype, rank, isogeny)
    L, _ = chevalley_algebra(dat, F)
    dims = []
    for s in seeds:
        hat = lie.cartan_subalgebra(L, random.Random(s))
        dims.append(lie.centralizer_of_subspace(L, hat.subspace).dim)
    return LemmaRecord(dat.label, q, tuple(dims), all(d == rank for d in dims))


def _factor_prime_power(q):
    from sympy import factorint

    fac = factorint(q)
    if len(fac) != 1:
        raise ValueError(f"{q} is not a prime power")
    p, k = next(iter(fac.items()))
    return int(p), int(k)


# ---------------------------------------------------------------------------
# the full claim suite
# ---------------------------------------------------------------------------


def run_claims(progress=None):
    """Run every structural claim; returns {claim: {"pass": bool, ...}}."""

    def note(msg):
        if progress:
            progress(msg)

    report = {}
    t1 = {}
    all_ok = True
    for (t, n, iso) in TABLE1_ACCEPTANCE_LABELS:
        comps = check_table1(t, n, iso, q=2)
        ok = all(c.ok for c in comps)
        logged = [
            (c.label, name, want, got)
            for c in comps
            for (name, want, got) in c.logged
        ]
        t1[f"{t}{n}:{iso}"] = {
            "pass": ok,
            "rows": len(comps),
            "logged_discrepancies": logged,
            "mismatches": [
                (c.label, c.mismatches) for c in comps if not c.ok
            ],
        }
        all_ok = all_ok and ok
        note(f"table1 {t}{n}:{iso} {'PASS' if ok else 'FAIL'}")
    report["table1"] = {"pass": all_ok, "labels": t1}

    p1 = []
    for (t, n, q) in [("A", 1, 2), ("B", 2, 2), ("C", 3, 2), ("C", 4, 2),
                      ("B", 2, 4), ("C", 3, 4), ("C", 4, 4)]:
        rec = prop1_check(t, n, q)
        p1.append(rec)
        note(f"no-rss {rec.label} GF({q}) [{rec.mode}] {'PASS' if rec.ok else 'FAIL'}")
    report["no_regular_semisimple"] = {
        "pass": all(r.ok for r in p1),
        "records": [r.__dict__ for r in p1],
    }

    rec2 = prop2_counterexample()
    note(f"toral-extension counterexample {'PASS' if rec2.ok else 'FAIL'}")
    report["toral_extension_counterexample"] = {
        "pass": rec2.ok,
        **{k: v for k, v in rec2.__dict__.items() if k != "ok"},
    }

    lem = []
    for (t, n, iso, q) in [("A", 2, "ad", 3), ("B", 2, "sc", 2),
                           ("C", 3, "sc", 2), ("C", 3, "sc", 4)]:
        rec = lemma_rank_check(t, n, iso, q)
        lem.append(rec)
        note(f"cartan-rank {rec.label} GF({q}) {'PASS' if rec.ok else 'FAIL'}")
    report["cartan_centralizer_rank"] = {
        "pass": all(r.ok for r in lem),
        "records": [r.__dict__ for r in lem],
    }

    report["all_pass"] = all(
        section["pass"]
        for key, section in report.items()
        if isinstance(section, dict) and "pass" in section
    )
    return report
