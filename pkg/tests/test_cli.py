import json
import random

import numpy as np
import pytest

from splittoral import cli, ff, liealg as lie
from splittoral.chevalley import chevalley_algebra
from splittoral.rootdata import root_datum


def run(argv):
    return cli.main([str(a) for a in argv])


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def test_parse_field():
    assert cli.parse_field("2").q == 2
    assert cli.parse_field("2^6").q == 64
    assert cli.parse_field("3^10").q == 3**10
    with pytest.raises(cli.InputError):
        cli.parse_field("six")
    with pytest.raises(cli.InputError):
        cli.parse_field("4")


def test_gen_examples(tmp_path):
    out = tmp_path / "a1.json"
    assert run(["gen", "A1:ad", "2", "--out", out]) == 0
    data = read_json(out)
    assert data["dim"] == 3 and data["field"] == {"p": 2, "k": 1, "defining_poly": [0, 1]}

    out = tmp_path / "c4.json"
    assert run(["gen", "C4:sc", "2", "--out", out]) == 0
    assert read_json(out)["dim"] == 36


def test_gen_e8_dimension(tmp_path):
    out = tmp_path / "e8.json"
    assert run(["gen", "E8", "3^6", "--out", out]) == 0
    data = read_json(out)
    assert data["dim"] == 248
    assert data["field"]["p"] == 3 and data["field"]["k"] == 6


def test_gen_bad_inputs():
    assert run(["gen", "A5:4", "2"]) == 2
    assert run(["gen", "Q9:sc", "2"]) == 2
    assert run(["gen", "A2:sc", "6"]) == 2


def test_algebra_file_roundtrip_bit_exact(tmp_path):
    F = ff.field_make(2, 2)
    L, _ = chevalley_algebra(root_datum("B", 2, "sc"), F)
    L2, _ = lie.scramble(L, random.Random(3))
    blob = cli.algebra_to_json(L2)
    text = json.dumps(blob)
    back = cli.algebra_from_json(json.loads(text))
    assert np.array_equal(back.table, L2.table)
    assert back.F is L2.F
    assert json.dumps(cli.algebra_to_json(back), sort_keys=True) == json.dumps(
        blob, sort_keys=True
    )


def test_gen_solve_verify_roundtrip(tmp_path):
    # every label of rank <= 3 over GF(2) and GF(3), fixed seed list
    from splittoral.rootdata import isogeny_labels

    labels = [
        f"{t}{n}:{iso}"
        for (t, n) in [("A", 1), ("A", 2), ("A", 3), ("B", 2), ("B", 3), ("C", 3), ("G", 2)]
        for iso in isogeny_labels(t, n)
    ]
    fixed_seeds = [0, 1]
    for label in labels:
        for field in ("2", "3"):
            for seed in fixed_seeds:
                stem = f"{label.replace(':', '_')}_{field}_{seed}"
                alg = tmp_path / f"{stem}.json"
                sol = tmp_path / f"{stem}_sol.json"
                assert run(["gen", label, field, "--scramble", "--seed", seed, "--out", alg]) == 0
                assert run(["solve", alg, "--seed", seed + 10, "--out", sol]) == 0, (label, field, seed)
                assert run(["verify", alg, sol]) == 0


def test_solve_exit_codes(tmp_path):
    alg = tmp_path / "a2.json"
    run(["gen", "A2:sc", "3", "--scramble", "--seed", 5, "--out", alg])
    sol = tmp_path / "sol.json"
    assert run(["solve", alg, "--max-tries", 0, "--restarts", 1, "--out", sol]) == 1
    assert not read_json(sol)["success"]
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema": 1, "nope": true}')
    assert run(["solve", bad]) == 2
    notjson = tmp_path / "notjson.json"
    notjson.write_text("{{{{")
    assert run(["solve", notjson]) == 2


def test_solver_trace_deterministic(tmp_path):
    alg = tmp_path / "b3.json"
    run(["gen", "B3:sc", "2", "--scramble", "--seed", 2, "--out", alg])
    sols = []
    for i in range(2):
        sol = tmp_path / f"sol{i}.json"
        assert run(["solve", alg, "--seed", 42, "--out", sol]) == 0
        data = read_json(sol)
        data["stats"].pop("wall_time")
        sols.append(json.dumps(data, sort_keys=True))
    assert sols[0] == sols[1]


def test_verify_rejects_tampered_solution(tmp_path):
    alg = tmp_path / "alg.json"
    sol = tmp_path / "sol.json"
    run(["gen", "B2:sc", "2", "--scramble", "--seed", 7, "--out", alg])
    assert run(["solve", alg, "--seed", 1, "--out", sol]) == 0
    data = read_json(sol)
    # replace the first basis vector of H by a standard basis vector
    data["H"][0] = [[0]] * len(data["H"][0])
    data["H"][0][3] = [1]
    tampered = tmp_path / "tampered.json"
    tampered.write_text(json.dumps(data))
    assert run(["verify", alg, tampered]) == 1


def test_answers_file_contains_hidden_torus(tmp_path):
    alg = tmp_path / "alg.json"
    ans = tmp_path / "ans.json"
    run(["gen", "B2:sc", "2", "--scramble", "--seed", 3, "--out", alg, "--answers", ans])
    data = read_json(ans)
    assert data["label"] == "B2:sc"
    assert len(data["standard_toral"]) == 2
    assert len(data["basis_change"]) == 10
    # the hidden torus verifies against the scrambled algebra
    L = cli.algebra_from_json(read_json(alg))
    from splittoral import linalg as la

    rows = cli.vectors_from_json(L.F, data["standard_toral"], L.dim)
    H = la.subspace_from_rows(L.F, rows, n=L.dim)
    cert = lie.is_split_toral(L, H, 2)
    assert isinstance(cert, lie.ToralCertificate)


def test_claims_command(tmp_path):
    out = tmp_path / "claims.json"
    assert run(["claims", "--out", out]) == 0
    rep = read_json(out)
    assert rep["all_pass"]


def test_bench_grid_csv_and_figure(tmp_path):
    csv = tmp_path / "bench.csv"
    fig = tmp_path / "bench.png"
    assert run([
        "bench", "--types", "A1:ad,A1:sc,B2:sc", "--fields", "2,3",
        "--reps", 2, "--seed", 1, "--out-csv", csv, "--fig", fig,
    ]) == 0
    lines = csv.read_text().strip().splitlines()
    assert lines[0].startswith("label,rank,median_s_")
    assert len(lines) == 4
    assert fig.stat().st_size > 0


def test_bench_rank_range(tmp_path):
    csv = tmp_path / "bench2.csv"
    assert run([
        "bench", "--ranks", "1..2", "--fields", "2", "--reps", 1,
        "--seed", 0, "--out-csv", csv,
    ]) == 0
    lines = csv.read_text().strip().splitlines()
    labels = {ln.split(",")[0] for ln in lines[1:]}
    assert labels == {"A1:ad", "A1:sc", "A2:ad", "A2:sc", "B2:ad", "B2:sc", "G2:ad", "G2:sc"}
