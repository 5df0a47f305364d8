import random
from collections import Counter, defaultdict

import numpy as np
import pytest

from splittoral import chevalley as ch
from splittoral import ff, liealg as lie, linalg as la
from splittoral.rootdata import root_datum

F2 = ff.field_make(2, 1)
F3 = ff.field_make(3, 1)
F101 = ff.field_make(101, 1)


def test_a1_adjoint_constants_exact():
    # on the basis (X_a, X_-a, h) the nonzero constants are exactly
    # c123=-2, c131=1, c213=2, c232=-1, c311=-1, c322=1
    info = ch.structure_constants(root_datum("A", 1, "ad"))
    T = info.dense_int()
    perm = [1, 2, 0]  # our basis order is (h, X_a, X_-a)
    got = {}
    for i in range(3):
        for j in range(3):
            for k in range(3):
                v = int(T[perm[i], perm[j], perm[k]])
                if v:
                    got[(i + 1, j + 1, k + 1)] = v
    assert got == {
        (1, 2, 3): -2,
        (1, 3, 1): 1,
        (2, 1, 3): 2,
        (2, 3, 2): -1,
        (3, 1, 1): -1,
        (3, 2, 2): 1,
    }


def test_a1_simply_connected_constants():
    T = ch.structure_constants(root_datum("A", 1, "sc")).dense_int()
    assert T[1, 2, 0] == -1  # [X_a, X_-a] = -h
    assert T[1, 0, 1] == 2   # [X_a, h] = 2 X_a
    assert T[2, 0, 2] == -2  # [X_-a, h] = -2 X_-a


def test_rank_is_n_plus_roots():
    for (t, n, iso) in [("A", 1, "ad"), ("C", 4, "sc"), ("G", 2, "ad"), ("E", 6, "sc")]:
        dat = root_datum(t, n, iso)
        info = ch.structure_constants(dat)
        assert info.dim == dat.rank + dat.rs.nroots


@pytest.mark.parametrize(
    "ctype,rank,iso",
    [
        ("A", 2, "sc"), ("A", 3, "2"), ("B", 2, "ad"), ("B", 2, "sc"),
        ("B", 4, "sc"), ("C", 3, "ad"), ("C", 4, "sc"), ("D", 4, "n-1"),
        ("F", 4, "ad"), ("G", 2, "ad"),
    ],
)
def test_n_table_invariants(ctype, rank, iso):
    dat = root_datum(ctype, rank, iso)
    info = ch.structure_constants(dat)
    rs = dat.rs
    for (a, b), n in info.n_table.items():
        na = tuple(-x for x in a)
        nb = tuple(-x for x in b)
        assert info.n_table[(na, nb)] == -n
        assert abs(n) == info.p_table[(a, b)] + 1
        assert info.n_table[(b, a)] == -n


def test_jacobi_fails_loudly_on_corruption():
    info = ch.structure_constants(root_datum("A", 2, "ad"))
    T = info.dense_int()
    T[2, 3, 4] += 1
    assert ch._jacobi_residual_dense(T) != 0.0


@pytest.mark.parametrize("ctype,rank,iso", [("A", 2, "sc"), ("B", 2, "ad"), ("C", 3, "sc"), ("G", 2, "ad")])
def test_cbz3_coroot_brackets(ctype, rank, iso):
    dat = root_datum(ctype, rank, iso)
    info = ch.structure_constants(dat)
    T = info.dense_int()
    rs = dat.rs
    n = rs.rank
    for r in range(rs.nroots):
        i_pos = n + r
        i_neg = n + rs.neg_index(r)
        assert np.array_equal(T[i_neg, i_pos, :n], info.coroot_coords[r])
        assert not T[i_neg, i_pos, n:].any()


def test_derived_dims_distinguish_a1_isogenies_in_char_2():
    Lad, _ = ch.chevalley_algebra(root_datum("A", 1, "ad"), F2)
    Lsc, _ = ch.chevalley_algebra(root_datum("A", 1, "sc"), F2)
    # [X_a, X_-a] = -2h vanishes for the adjoint form, so its derived
    # subalgebra is the 2-dimensional root-vector span; the simply
    # connected form keeps only the 1-dimensional span of h
    assert lie.derived_subspace(Lad).dim == 2
    assert lie.derived_subspace(Lsc).dim == 1


def test_a2_root_spaces_odd_char():
    dat = root_datum("A", 2, "ad")
    L, H = ch.chevalley_algebra(dat, F3)
    spaces = [ch.root_space(L, H, dat, r) for r in range(6)]
    assert all(s.dim == 1 for s in spaces)
    assert len({s.basis.tobytes() for s in spaces}) == 6

    dat = root_datum("A", 2, "sc")
    L, H = ch.chevalley_algebra(dat, F3)
    rs = dat.rs
    s1 = ch.root_space(L, H, dat, rs.index[(1, 0)])
    s2 = ch.root_space(L, H, dat, rs.index[(0, 1)])
    s3 = ch.root_space(L, H, dat, rs.index[(-1, -1)])
    assert s1 == s2 == s3 and s1.dim == 3
    expected = la.subspace_from_rows(
        F3,
        la.eye(8)[[2 + rs.index[(1, 0)], 2 + rs.index[(0, 1)], 2 + rs.index[(-1, -1)]]],
        n=8,
    )
    assert s1 == expected


def test_a2_root_space_large_field():
    dat = root_datum("A", 2, "ad")
    L, H = ch.chevalley_algebra(dat, F101)
    rs = dat.rs
    s = ch.root_space(L, H, dat, rs.index[(0, 1)])
    assert s.dim == 1
    assert s.basis[0, 2 + rs.index[(0, 1)]] == 1


def test_char2_root_spaces_merge_with_negatives():
    for iso in ("ad", "sc"):
        dat = root_datum("A", 2, iso)
        L, H = ch.chevalley_algebra(dat, F2)
        rs = dat.rs
        for r in range(rs.nroots):
            s = ch.root_space(L, H, dat, r)
            sneg = ch.root_space(L, H, dat, rs.neg_index(r))
            assert s == sneg and s.dim == 2


def test_c4_sc_gf2_root_space_profile():
    dat = root_datum("C", 4, "sc")
    L, H = ch.chevalley_algebra(dat, F2)
    rs = dat.rs
    groups = defaultdict(list)
    for r in range(rs.nroots):
        w = tuple(int(x) % 2 for x in dat.alpha_in_x[r])
        groups[w].append(r)
    dims = []
    zero_dim = None
    for w, idxs in groups.items():
        s = ch.root_space(L, H, dat, idxs[0])
        if any(w):
            dims.append(s.dim)
        else:
            zero_dim = s.dim
    assert sorted(dims) == [4] * 6
    assert zero_dim == 12


def test_root_space_sum_covers_algebra():
    for (t, n, iso, F) in [("A", 2, "sc", F3), ("B", 2, "sc", F2), ("G", 2, "ad", F2)]:
        dat = root_datum(t, n, iso)
        L, H = ch.chevalley_algebra(dat, F)
        total = la.zero_subspace(L.dim)
        seen = set()
        for r in range(dat.rs.nroots):
            w = tuple(ch.root_function(dat, F, r, e) for e in la.eye(dat.rank))
            if w in seen:
                continue
            seen.add(w)
            total = la.subspace_sum(F, total, ch.root_space(L, H, dat, r))
        if (0,) * dat.rank not in seen:
            # add the zero-weight space through the centralizer of H
            total = la.subspace_sum(
                F, total, lie.centralizer_of_subspace(L, H.subspace)
            )
        assert total.dim == L.dim


def test_root_function_values():
    assert ch.root_function(root_datum("A", 1, "ad"), F3, 0, [1]) == 1
    assert ch.root_function(root_datum("A", 1, "sc"), F3, 0, [1]) == 2
    assert ch.root_function(root_datum("A", 1, "sc"), F2, 0, [1]) == 0
    assert ch.root_function(root_datum("A", 1, "sc"), F2, 0, [0]) == 0
    with pytest.raises(ValueError):
        ch.root_function(root_datum("A", 2, "ad"), F2, 0, [1])


def test_root_space_requires_standard_handle():
    dat = root_datum("A", 2, "ad")
    L, H = ch.chevalley_algebra(dat, F3)
    other = lie.SubspaceHandle(
        parent=L,
        subspace=la.subspace_from_rows(F3, la.eye(8)[3:5], n=8),
        root=L,
    )
    with pytest.raises(ValueError):
        ch.root_space(L, other, dat, 0)


def test_ad_eigenvalues_match_root_functions():
    dat = root_datum("A", 2, "ad")
    L, H = ch.chevalley_algebra(dat, F3)
    A = L.ad(la.eye(8)[0])
    got = Counter(ff.roots_in_field(F3, la.char_poly(F3, A)))
    want = Counter()
    for r in range(6):
        want[F3.neg(ch.root_function(dat, F3, r, [1, 0]))] += 1
    want[0] += 2
    assert got == want


def test_field_reduction_respects_char():
    # 2h vanishes only in characteristic 2
    Tsc = ch.structure_constants(root_datum("A", 1, "sc")).dense_int()
    L2, _ = ch.chevalley_algebra(root_datum("A", 1, "sc"), F2)
    L3, _ = ch.chevalley_algebra(root_datum("A", 1, "sc"), F3)
    assert not L2.table[1, 0].any()       # [X_a, h] = 2 X_a = 0 mod 2
    assert L3.table[1, 0, 1] == 2


def test_structure_constant_cache_reuse():
    a = ch.structure_constants(root_datum("B", 3, "sc"))
    b = ch.structure_constants(root_datum("B", 3, "sc"))
    assert a is b
