"""Las Vegas search for split maximal toral subalgebras (char 2 and 3).

Both solvers descend through centralizer quotients C_M(h')/<h'> while
joining pullbacks of split semisimple elements into H, and give up after
a bounded number of random tries per level plus a bounded number of full
restarts.  A returned success always carries a freshly validated
certificate, so failures are the only possible bad outcome.
"""

from __future__ import annotations

import random
import time
from collections import Counter
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import linalg as la
from . import liealg as lie
from .ff import roots_in_field


@dataclass(frozen=True)
class SearchLimits:
    max_tries: int = 25
    max_restarts: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.max_tries < 0 or self.max_restarts < 0:
            raise ValueError("limits must be nonnegative")


@dataclass
class SmtsaResult:
    success: bool
    subspace: la.Subspace | None
    certificate: lie.ToralCertificate | None
    rank: int | None
    stats: dict = dc_field(default_factory=dict)

    def trace_key(self):
        """Deterministic digest of the run (excludes wall time)."""
        basis = self.subspace.basis.tobytes() if self.subspace is not None else b""
        return (
            self.success,
            self.rank,
            basis,
            self.stats.get("levels"),
            self.stats.get("restarts"),
            self.stats.get("tries"),
            tuple(sorted(self.stats.get("cases", {}).items())),
        )


def find_split_semisimple_elt(V: la.Subspace, node, rng, stats=None):
    """Candidate split semisimple element from an eigenspace V of M.

    Returns (element in M coordinates or None, fired case label or None).
    The case guards run strictly in the order (A)..(F).
    """
    M = node.alg
    L = node.root
    F = M.F
    S = lie.subalgebra_closure(M, V).subspace
    I = lie.ideal_closure(M, V).subspace
    SS = lie.bracket_span(M, S, S)
    II = lie.bracket_span(M, I, I)
    case = None
    h = None
    if SS.dim == 1:
        case = "A"
        h = SS.basis[0].copy()
    elif II == I and SS.dim in (2, 3):
        case = "B"
        h = _random_nonzero_in(F, SS, rng)
    elif I.dim != 0 and I.dim % 2 == 0 and II.dim == 0 and SS.dim == 0:
        case = "C"
        h = _solve_identity_action(M, within=None, targets=I)
    elif S.dim == 6 and II == S and SS.dim == 2:
        case = "D"
        h = _random_nonzero_in(F, SS, rng)
    elif I.dim != 0 and I.dim % 2 == 0 and II.dim != 0 and SS.dim == 0:
        case = "E"
        h = _solve_identity_action(M, within=I, targets=S)
    elif V.dim % 2 == 0 and SS.dim != 0:
        case = "F"
        h = _random_nonzero_in(F, SS, rng)
    if stats is not None and case is not None:
        stats["case_attempts"][case] += 1
    if h is None or not h.any():
        return None, case
    if lie.split_pullback(L, node.map_to_root(F, h)) is not None:
        return h, case
    return None, case


def _random_nonzero_in(F, U: la.Subspace, rng, tries=20):
    if U.dim == 0:
        return None
    for _ in range(tries):
        c = np.array([rng.randrange(F.q) for _ in range(U.dim)], dtype=np.int64)
        if c.any():
            return F.matmul(c[None, :], U.basis)[0]
    return None


def _solve_identity_action(M, within, targets: la.Subspace):
    """h (in `within`, or all of M) with [h, e] = e for every e in targets."""
    F = M.F
    if targets.dim == 0:
        return None
    blocks = []
    rhs = []
    basis = within.basis if within is not None else la.eye(M.dim)
    for e in targets.basis:
        # [sum c_a u_a, e] = -ad(e) @ (c @ basis)
        A = F.neg_arr(M.ad(e))
        blocks.append(F.matmul(A, basis.T))
        rhs.append(e)
    sol = la.solve(F, np.vstack(blocks), np.concatenate(rhs))
    if sol is None:
        return None
    h = F.matmul(sol[None, :], basis)[0]
    for e in targets.basis:
        assert np.array_equal(M.bracket(h, e), e)
    return h


def _join(F, H: la.Subspace, rows):
    rows = np.atleast_2d(np.asarray(rows, dtype=np.int64))
    if rows.size == 0:
        return H
    return la.subspace_sum(F, H, la.subspace_from_rows(F, rows, n=H.n))


def _fresh_stats():
    return {
        "levels": 0,          # descents through C_M(h')/<h'>
        "center_steps": 0,    # quotients by Z(M)
        "restarts": 0,
        "tries": 0,
        "cases": Counter(),
        "case_attempts": Counter(),
        "center_joins": 0,
        "level_reached": 0,
    }


def _validated_success(L, H, d, stats, t0):
    cert = lie.is_split_toral(L, H, d)
    if isinstance(cert, lie.ToralCertificate):
        stats["wall_time"] = time.perf_counter() - t0
        return SmtsaResult(True, H, cert, d, stats)
    return None


def _failure(L, d, stats, t0):
    stats["wall_time"] = time.perf_counter() - t0
    return SmtsaResult(False, None, None, d, stats)


def smtsa2(L, limits: SearchLimits = SearchLimits()):
    """Characteristic-2 solver.

    Repeatedly strips the center of M (joining its split part into H),
    otherwise hunts for a split semisimple element directly or through
    the eigenspace case ladder, and descends into C_M(h')/<h'>.
    """
    if L.F.p != 2:
        raise ValueError("smtsa2 requires characteristic 2")
    return _run(L, limits, strip_center=True)


def smtsa3(L, limits: SearchLimits = SearchLimits()):
    """Odd-characteristic solver.

    Uses products of random elements from opposite eigenspace pairs
    (v, -v) of a random semisimple element; the abelian base case joins
    the whole pullback of M when it is split semisimple.
    """
    if L.F.p == 2:
        raise ValueError("smtsa3 requires odd characteristic")
    return _run(L, limits, strip_center=False)


def _run(L, limits, strip_center):
    F = L.F
    rng = random.Random(limits.seed)
    t0 = time.perf_counter()
    stats = _fresh_stats()
    d = lie.reductive_rank(L, rng)
    for restart in range(max(limits.max_restarts, 1)):
        stats["restarts"] = restart
        stats["levels"] = 0
        stats["center_steps"] = 0
        H = la.zero_subspace(L.dim)
        node = lie.node_full(L)
        level_ok = True
        while node.alg.dim > 0 and H.dim < d:
            if strip_center:
                stepped = _center_step(L, node, H, stats)
                if stepped is not None:
                    node, H = stepped
                    continue
            else:
                base = _abelian_base_case(L, node, H, stats)
                if base == "fail":
                    level_ok = False
                    break
                if base is not None:
                    H = base
                    break
            advanced = _random_element_step(L, node, H, rng, limits, stats, strip_center)
            if advanced is None:
                level_ok = False
                break
            node, H = advanced
            stats["levels"] += 1
        stats["level_reached"] = max(stats["level_reached"], stats["levels"])
        if level_ok and H.dim == d:
            result = _validated_success(L, H, d, stats, t0)
            if result is not None:
                return result
    return _failure(L, d, stats, t0)


def _center_step(L, node, H, stats):
    """Take out Z(M), joining the split part of its pullback; None if Z = 0."""
    F = L.F
    Z = lie.center(node.alg)
    if Z.dim == 0:
        return None
    rows = np.vstack([node.map_to_root(F, z) for z in Z.basis])
    W = la.subspace_from_rows(F, rows, n=L.dim)
    Ws = lie.split_semisimple_part_of_commuting(L, W)
    if Ws is None:
        # raw pullbacks drifted out of commutation: retry on their
        # stabilized semisimple representatives
        corrected = [lie.split_pullback(L, w) for w in W.basis]
        corrected = [c for c in corrected if c is not None]
        if corrected:
            W2 = la.subspace_from_rows(F, np.vstack(corrected), n=L.dim)
            Ws = lie.split_semisimple_part_of_commuting(L, W2)
    if Ws is None:
        Ws = la.zero_subspace(L.dim)
    if Ws.dim:
        stats["center_joins"] += 1
    H2 = la.subspace_sum(F, H, Ws)
    node2 = lie.node_quotient(node, Z)
    stats["center_steps"] += 1
    return node2, H2


def _abelian_base_case(L, node, H, stats):
    """Base case: commutative M whose pullback is split semisimple ends
    the run; drifted pullbacks are corrected to their stabilized
    representatives first."""
    F = L.F
    M = node.alg
    if lie.derived_subspace(M).dim != 0:
        return None
    if M.dim == 0:
        return H
    rows = np.vstack([node.map_to_root(F, e) for e in la.eye(M.dim)])
    W = la.subspace_from_rows(F, rows, n=L.dim)
    Ws = lie.split_semisimple_part_of_commuting(L, W)
    if Ws is not None and Ws.dim == W.dim:
        return la.subspace_sum(F, H, W)
    corrected = [lie.split_pullback(L, w) for w in W.basis]
    if all(c is not None for c in corrected):
        W2 = la.subspace_from_rows(F, np.vstack(corrected), n=L.dim)
        Ws = lie.split_semisimple_part_of_commuting(L, W2)
        if Ws is not None and Ws.dim == W2.dim:
            return la.subspace_sum(F, H, W2)
    return "fail"


def _random_element_step(L, node, H, rng, limits, stats, strip_center):
    """One level of random search; returns (new node, new H) or None."""
    F = L.F
    M = node.alg
    for _ in range(limits.max_tries):
        stats["tries"] += 1
        h = lie.random_semisimple_element(M, rng)
        if h is None:
            continue
        found = None
        case = None
        if strip_center:
            if lie.split_pullback(L, node.map_to_root(F, h)) is not None:
                found = h
            else:
                A = M.ad(h)
                evs = sorted(roots_in_field(F, la.min_poly(F, A)))
                for v in evs:
                    V = la.eigenspace(F, A, v)
                    cand, case = find_split_semisimple_elt(V, node, rng, stats)
                    if cand is not None:
                        found = cand
                        break
        else:
            A = M.ad(h)
            evs = sorted(roots_in_field(F, la.min_poly(F, A)))
            pairs = [
                (v, F.neg(v)) for v in evs if v != 0 and F.neg(v) in evs and v <= F.neg(v)
            ]
            for (vp, vm) in pairs:
                Vp = la.eigenspace(F, A, vp)
                Vm = la.eigenspace(F, A, vm)
                sp = _random_in(F, Vp, rng)
                sm = _random_in(F, Vm, rng)
                hp = M.bracket(sp, sm)
                if not hp.any():
                    continue
                if lie.split_pullback(L, node.map_to_root(F, hp)) is not None:
                    found = hp
                    break
        if found is None or not found.any():
            continue
        # join the drift-corrected representative; descend on the M-element
        join_vec = lie.split_pullback(L, node.map_to_root(F, found))
        if join_vec is None:
            continue
        H2 = _join(F, H, join_vec)
        if H2.dim == H.dim:
            continue  # no new toral direction; spend another try
        if case is not None:
            stats["cases"][case] += 1
        return lie.node_descend(node, found), H2
    return None


def _random_in(F, U: la.Subspace, rng):
    if U.dim == 0:
        return np.zeros(U.n, dtype=np.int64)
    c = np.array([rng.randrange(F.q) for _ in range(U.dim)], dtype=np.int64)
    return F.matmul(c[None, :], U.basis)[0]


def solve(L, limits: SearchLimits = SearchLimits()):
    """Dispatch on the characteristic: 2 -> smtsa2, odd -> smtsa3."""
    return smtsa2(L, limits) if L.F.p == 2 else smtsa3(L, limits)


def verify_result(L, result: SmtsaResult, rng=None):
    """Independent re-validation: fresh reductive rank, fresh certificate."""
    if not result.success or result.subspace is None:
        return False
    rng = rng or random.Random(0xC0FFEE)
    d = lie.reductive_rank(L, rng)
    cert = lie.is_split_toral(L, result.subspace, d)
    return isinstance(cert, lie.ToralCertificate)
