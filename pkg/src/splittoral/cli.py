"""Command-line interface: gen, solve, verify, claims, bench.

Algebras travel as JSON: a field descriptor {p, k, defining_poly}, the
dimension, and sparse constants [i, j, k, coeff] with i < j (coefficients
are ascending GF(p) coefficient arrays).  Exit codes: 0 success, 1 a
failed Las Vegas run or failed check, 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import random
import statistics
import sys
import time

import numpy as np

from . import linalg as la
from . import liealg as lie
from . import smtsa
from .chevalley import chevalley_algebra
from .ff import field_make
from .rootdata import isogeny_labels, parse_label, root_datum
from .verify import run_claims

SCHEMA_VERSION = 1


class InputError(Exception):
    pass


def parse_field(text):
    """Field strings like '2', '2^6', '3^10'."""
    text = text.strip()
    base, _, exp = text.partition("^")
    try:
        p = int(base)
        k = int(exp) if exp else 1
    except ValueError:
        raise InputError(f"cannot parse field {text!r}")
    try:
        return field_make(p, k)
    except ValueError as e:
        raise InputError(str(e))


def field_to_json(F):
    return {"p": F.p, "k": F.k, "defining_poly": list(F.poly)}


def field_from_json(obj):
    try:
        return field_make(obj["p"], obj["k"], tuple(obj["defining_poly"]))
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"bad field descriptor: {e}")


def elem_to_coeffs(F, a):
    return list(F.coeffs(int(a)))


def elem_from_coeffs(F, coeffs):
    try:
        return F.from_coeffs([int(c) % F.p for c in coeffs])
    except (TypeError, ValueError) as e:
        raise InputError(f"bad element {coeffs!r}: {e}")


def algebra_to_json(L):
    entries = []
    for (i, j, k, c) in lie.to_sparse(L):
        entries.append([i, j, k, elem_to_coeffs(L.F, c)])
    return {
        "schema": SCHEMA_VERSION,
        "field": field_to_json(L.F),
        "dim": L.dim,
        "constants": entries,
        "provenance": L.provenance,
    }


def algebra_from_json(obj):
    try:
        if obj["schema"] != SCHEMA_VERSION:
            raise InputError(f"unsupported schema {obj.get('schema')}")
        F = field_from_json(obj["field"])
        dim = int(obj["dim"])
        entries = [
            (int(i), int(j), int(k), elem_from_coeffs(F, c))
            for (i, j, k, c) in obj["constants"]
        ]
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"malformed algebra file: {e}")
    try:
        return lie.from_sparse(F, dim, entries, provenance=obj.get("provenance") or {})
    except ValueError as e:
        raise InputError(str(e))


def vectors_to_json(F, rows):
    return [[elem_to_coeffs(F, a) for a in row] for row in np.atleast_2d(rows)]


def vectors_from_json(F, data, dim):
    rows = []
    for row in data:
        if len(row) != dim:
            raise InputError("vector length mismatch")
        rows.append([elem_from_coeffs(F, c) for c in row])
    return np.array(rows, dtype=np.int64).reshape(-1, dim)


def result_to_json(L, res: smtsa.SmtsaResult):
    out = {
        "success": res.success,
        "rank": res.rank,
        "stats": {
            "levels": res.stats.get("levels"),
            "restarts": res.stats.get("restarts"),
            "tries": res.stats.get("tries"),
            "cases": dict(res.stats.get("cases", {})),
            "case_attempts": dict(res.stats.get("case_attempts", {})),
            "wall_time": res.stats.get("wall_time"),
            "level_reached": res.stats.get("level_reached"),
        },
    }
    if res.success:
        cert = res.certificate
        out["H"] = vectors_to_json(L.F, res.subspace.basis)
        out["certificate"] = {
            "min_polys": [[elem_to_coeffs(L.F, c) for c in m] for m in cert.min_polys],
            "weights": [
                {"weight": [elem_to_coeffs(L.F, v) for v in w], "dim": d}
                for (w, d) in cert.weights
            ],
            "rank": cert.rank,
        }
    return out


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read {path}: {e}")


def _dump(obj, path):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if path in (None, "-"):
        print(text)
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_gen(args):
    try:
        ctype, rank, iso = parse_label(args.label)
        dat = root_datum(ctype, rank, iso)
    except ValueError as e:
        raise InputError(str(e))
    F = parse_field(args.field)
    L, H = chevalley_algebra(dat, F)
    answers = {"label": dat.label, "standard_toral": vectors_to_json(F, H.subspace.basis)}
    if args.scramble:
        rng = random.Random(args.seed)
        L2, P = lie.scramble(L, rng)
        L2.provenance.update({"scrambled": True, "seed": args.seed})
        Pinv = lie.invert_matrix(F, P)
        Himg = la.subspace_from_rows(F, F.matmul(H.subspace.basis, Pinv), n=L.dim)
        answers["standard_toral"] = vectors_to_json(F, Himg.basis)
        answers["basis_change"] = vectors_to_json(F, P)
        L = L2
    _dump(algebra_to_json(L), args.out)
    if args.answers:
        _dump(answers, args.answers)
    return 0


def cmd_solve(args):
    L = algebra_from_json(_load_json(args.file))
    limits = smtsa.SearchLimits(
        max_tries=args.max_tries, max_restarts=args.restarts, seed=args.seed
    )
    res = smtsa.solve(L, limits)
    _dump(result_to_json(L, res), args.out)
    return 0 if res.success else 1


def cmd_verify(args):
    L = algebra_from_json(_load_json(args.algebra))
    sol = _load_json(args.solution)
    if not sol.get("success"):
        print("solution file records a failed run", file=sys.stderr)
        return 1
    try:
        H_rows = vectors_from_json(L.F, sol["H"], L.dim)
    except (KeyError, TypeError) as e:
        raise InputError(f"malformed solution file: {e}")
    H = la.subspace_from_rows(L.F, H_rows, n=L.dim)
    rng = random.Random(args.seed)
    d = lie.reductive_rank(L, rng)
    cert = lie.is_split_toral(L, H, d)
    if isinstance(cert, lie.ToralCertificate):
        print(f"OK: split maximal toral subalgebra of dimension {d}")
        return 0
    print(f"FAIL: {cert.reason} ({cert.detail})")
    return 1


def cmd_claims(args):
    report = run_claims(progress=lambda m: print(m))
    if args.out:
        _dump(report, args.out)
    print("ALL PASS" if report["all_pass"] else "FAILURES PRESENT")
    return 0 if report["all_pass"] else 1


def _bench_labels(args):
    if args.types:
        try:
            return [parse_label(t) for t in args.types.split(",")]
        except ValueError as e:
            raise InputError(str(e))
    lo, _, hi = args.ranks.partition("..")
    lo, hi = int(lo), int(hi or lo)
    out = []
    for ctype, least in [("A", 1), ("B", 2), ("C", 3), ("D", 4), ("E", 6), ("F", 4), ("G", 2)]:
        for rank in range(max(lo, least), hi + 1):
            try:
                from .rootdata import check_type

                check_type(ctype, rank)
            except ValueError:
                continue
            for iso in isogeny_labels(ctype, rank):
                out.append((ctype, rank, iso))
    return out


def cmd_bench(args):
    fields = [parse_field(f) for f in args.fields.split(",")]
    labels = _bench_labels(args)
    rows = []
    for (ctype, rank, iso) in labels:
        dat = root_datum(ctype, rank, iso)
        cells = []
        for F in fields:
            L, _ = chevalley_algebra(dat, F)
            times = []
            fails = 0
            for rep in range(args.reps):
                rng = random.Random((args.seed, dat.label, F.q, rep).__hash__())
                L2, _ = lie.scramble(L, rng)
                limits = smtsa.SearchLimits(seed=rng.randrange(2**31))
                t0 = time.perf_counter()
                res = smtsa.solve(L2, limits)
                times.append(time.perf_counter() - t0)
                if not res.success:
                    fails += 1
            cells.append((statistics.median(times), fails))
        rows.append((dat.label, rank, cells))

    headers = ["R"] + [repr(F) for F in fields]
    widths = [max(len(headers[0]), max(len(r[0]) for r in rows))] + [
        max(len(h), 8) for h in headers[1:]
    ]
    line = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
    print(line)
    print("-" * len(line))
    for (label, rank, cells) in rows:
        cols = [label.ljust(widths[0])]
        for (med, fails), w in zip(cells, widths[1:]):
            text = f"{med:.2f}" + (f" !{fails}" if fails else "")
            cols.append(text.ljust(w))
        print("  ".join(cols))

    if args.out_csv:
        with open(args.out_csv, "w") as fh:
            fh.write("label,rank," + ",".join(f"median_s_{repr(F)}" for F in fields))
            fh.write("," + ",".join(f"fails_{repr(F)}" for F in fields) + "\n")
            for (label, rank, cells) in rows:
                med = ",".join(f"{m:.6f}" for (m, _) in cells)
                fl = ",".join(str(f) for (_, f) in cells)
                fh.write(f"{label},{rank},{med},{fl}\n")
        print(f"wrote {args.out_csv}")

    if args.fig:
        _render_bench_figure(rows, fields, args.fig)
        print(f"wrote {args.fig}")
    return 0


def _render_bench_figure(rows, fields, path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for fi, F in enumerate(fields):
        by_rank = {}
        for (label, rank, cells) in rows:
            by_rank.setdefault(rank, []).append(cells[fi][0])
        ranks = sorted(by_rank)
        med = [statistics.median(by_rank[r]) for r in ranks]
        ax.plot(ranks, med, marker="o", label=repr(F))
    ax.set_xlabel("rank")
    ax.set_ylabel("median wall time (s)")
    ax.set_yscale("log")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def build_parser():
    ap = argparse.ArgumentParser(
        prog="splittoral",
        description="Chevalley Lie algebras over small-characteristic finite "
        "fields and split maximal toral subalgebra search",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="emit a (optionally scrambled) algebra file")
    g.add_argument("label", help="root datum label, e.g. A3:sc, A5:2, D6:n-1, E8")
    g.add_argument("field", help="field, e.g. 2, 2^6, 3^10")
    g.add_argument("--scramble", action="store_true")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=None)
    g.add_argument("--answers", default=None, help="also write the hidden answer data")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="find a split maximal toral subalgebra")
    s.add_argument("file")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-tries", type=int, default=25)
    s.add_argument("--restarts", type=int, default=10)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="re-check a solution file against an algebra")
    v.add_argument("algebra")
    v.add_argument("solution")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("claims", help="run the structural claim suite")
    c.add_argument("--out", default=None, help="write the JSON report here")
    c.set_defaults(func=cmd_claims)

    b = sub.add_parser("bench", help="seeded timing grid over types and fields")
    b.add_argument("--ranks", default="1..3", help="rank range, e.g. 2..5")
    b.add_argument("--types", default=None, help="explicit labels, comma separated")
    b.add_argument("--fields", default="2,3", help="comma separated field strings")
    b.add_argument("--reps", type=int, default=3)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out-csv", default=None)
    b.add_argument("--fig", default=None, help="write a median-time figure (png)")
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
