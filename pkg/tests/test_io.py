import json

import jsonschema
import numpy as np
import pytest

from hierarchy_lab.counterexample import lasserre_certificate, sdsos_certificate
from hierarchy_lab.errors import ParseError
from hierarchy_lab.io import (
    certificate_from_dict,
    certificate_to_dict,
    data_path,
    format_certificate,
    load_certificate,
    load_problem,
    load_schema,
    problem_from_dict,
    problem_to_dict,
    read_native,
    save_certificate,
    save_problem,
    sdpa_text,
    write_native,
    write_sdpa,
)
from hierarchy_lab.relaxations import PolyProblem, build_dsos, build_lasserre, build_sdsos
from hierarchy_lab.solver import solve

from .conftest import NAMES, poly


def parse_sdpa(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("*")]
    m = int(lines[0])
    nblocks = int(lines[1])
    struct = [int(t) for t in lines[2].split()]
    c = np.array([float(t) for t in lines[3].split()])
    entries = [tuple(ln.split()) for ln in lines[4:]]
    entries = [(int(a), int(b), int(i), int(j), float(v)) for a, b, i, j, v in entries]
    return m, nblocks, struct, c, entries


def sdpa_matrices(text):
    """Dense F_0..F_m per block from SDPA sparse text."""
    m, _, struct, c, entries = parse_sdpa(text)
    F = [[np.zeros((abs(s), abs(s))) for s in struct] for _ in range(m + 1)]
    for k, b, i, j, v in entries:
        F[k][b - 1][i - 1, j - 1] = v
        F[k][b - 1][j - 1, i - 1] = v
    return c, F, struct


def test_bundled_problem(problem):
    loaded, meta = load_problem(data_path("counterexample.json"))
    assert loaded.objective == problem.objective
    assert loaded.constraints == problem.constraints
    assert meta["global_value"] == "6-4*sqrt2"


def test_problem_round_trip(tmp_path, problem):
    path = tmp_path / "p.json"
    save_problem(problem, path, {"tag": 1})
    loaded, meta = load_problem(path)
    assert loaded.objective == problem.objective and loaded.constraints == problem.constraints
    assert meta == {"tag": 1}
    jsonschema.validate(json.loads(path.read_text()), load_schema("problem"))


def test_problem_with_surd_coefficients(tmp_path):
    p = PolyProblem(poly("sqrt2*x1^2 - 1/3*x2"), (), NAMES)
    doc = problem_to_dict(p)
    assert any("sqrt2" in t for t in doc["objective"])
    back, _ = problem_from_dict(json.loads(json.dumps(doc)))
    assert back.objective == p.objective


@pytest.mark.parametrize("coef", [0.5, "0.5", "1e-3", True, None, "x"])
def test_inexact_coefficients_rejected(coef):
    doc = {"variables": ["x"], "objective": [{"exponents": [1], "coefficient": coef}]}
    with pytest.raises(ParseError):
        problem_from_dict(doc)


@pytest.mark.parametrize(
    "doc",
    [
        [],
        {"objective": []},
        {"variables": ["x", "x"], "objective": []},
        {"variables": ["x"]},
        {"variables": ["x"], "objective": [{"exponents": [1, 0], "coefficient": 1}]},
        {"variables": ["x"], "objective": [{"exponents": [-1], "coefficient": 1}]},
        {"variables": ["x"], "objective": [{"coefficient": 1}]},
        {"variables": ["x"], "objective": [], "constraints": {}},
    ],
)
def test_malformed_problem_rejected(doc):
    with pytest.raises(ParseError):
        problem_from_dict(doc)


def test_invalid_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ParseError):
        load_problem(path)


def test_repeated_terms_accumulate():
    doc = {"variables": ["x"], "objective": [{"exponents": [1], "coefficient": 1},
                                             {"exponents": [1], "coefficient": "1/2", "sqrt2": 1}]}
    p, _ = problem_from_dict(doc)
    assert p.objective == poly("(3/2 + sqrt2)*x", ("x",))


@pytest.mark.parametrize("make", [lasserre_certificate, sdsos_certificate])
def test_certificate_round_trip(tmp_path, problem, make):
    cert = make()
    path = tmp_path / "c.json"
    save_certificate(cert, path, NAMES)
    jsonschema.validate(json.loads(path.read_text()), load_schema("certificate"))
    back = load_certificate(path, NAMES)
    assert back.lam == cert.lam
    assert [s.polynomial() for s in back.sigmas] == [s.polynomial() for s in cert.sigmas]


def test_certificate_rejects_wrong_names():
    doc = certificate_to_dict(lasserre_certificate(), NAMES)
    with pytest.raises(ParseError):
        certificate_from_dict(doc, ("u", "v"))


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("sigmas"),
    lambda d: d.update(r=-1),
    lambda d: d.pop("lambda"),
    lambda d: d["sigmas"][0]["squares"][0].update(weight="-1"),
    lambda d: d["sigmas"][0]["squares"][0].update(weight="0.5"),
    lambda d: d["sigmas"][0].update(cone="dsos", squares=[{"weight": "1", "poly": "1 + x1 + x2"}]),
])
def test_malformed_certificate(mutate):
    doc = certificate_to_dict(lasserre_certificate(), NAMES)
    mutate(doc)
    with pytest.raises(ParseError):
        certificate_from_dict(doc, NAMES)


def test_format_certificate():
    text = format_certificate(lasserre_certificate(), NAMES)
    lines = text.splitlines()
    assert lines[0] == "lambda = 6-4*sqrt2"
    assert lines[1].startswith("sigma_0 = (-1+sqrt2)*(")
    assert lines[2] == "sigma_1 = (-2+2*sqrt2)*(1)^2"


def test_native_round_trip(tmp_path, problem):
    for build in (build_lasserre, build_sdsos, build_dsos):
        cp = build(problem, 2)
        path = tmp_path / "cp.json"
        write_native(cp, path)
        back = read_native(path)
        assert back == cp
        assert abs(solve(back).dual_value - solve(cp).dual_value) < 1e-12


def test_native_malformed(tmp_path):
    path = tmp_path / "cp.json"
    path.write_text(json.dumps({"num_vars": 2}))
    with pytest.raises(ParseError):
        read_native(path)


def test_sdpa_lasserre_order1(problem):
    m, nblocks, struct, c, entries = parse_sdpa(sdpa_text(build_lasserre(problem, 1)))
    assert struct == [3, 1]
    assert nblocks == 2
    assert m == len(c) == 5


def test_sdpa_sdsos_order1(problem):
    _, _, struct, _, _ = parse_sdpa(sdpa_text(build_sdsos(problem, 1)))
    assert struct == [2, 2, 2, -4]


def test_sdpa_dsos_is_pure_lp(problem):
    _, nblocks, struct, _, _ = parse_sdpa(sdpa_text(build_dsos(problem, 2)))
    assert nblocks == 1 and len(struct) == 1 and struct[0] < 0


def test_sdpa_entries_upper_and_sorted(problem):
    _, _, struct, _, entries = parse_sdpa(sdpa_text(build_sdsos(problem, 2)))
    assert entries == sorted(entries, key=lambda e: e[:4])
    for k, b, i, j, _ in entries:
        assert 1 <= i <= j <= abs(struct[b - 1])
        if struct[b - 1] < 0:
            assert i == j


@pytest.mark.parametrize("build", [build_lasserre, build_sdsos])
def test_sdpa_describes_same_program(problem, build):
    # feasibility of the solver's point in the exported program: sum F_i x_i - F_0 PSD
    cp = build(problem, 2)
    res = solve(cp)
    c, F, struct = sdpa_matrices(sdpa_text(cp))
    for b in range(len(struct)):
        M = sum(F[i + 1][b] * res.z[i] for i in range(len(res.z))) - F[0][b]
        assert np.linalg.eigvalsh(M)[0] > -1e-7
    header = [ln for ln in sdpa_text(cp).splitlines() if ln.startswith("* objective constant")]
    const = float(header[0].split()[3])
    assert abs(c @ res.z + const - res.primal_value) < 1e-9


def test_write_sdpa_comment(tmp_path, problem):
    path = tmp_path / "out.dat-s"
    write_sdpa(build_lasserre(problem, 1), path, comment="hello\nworld")
    text = path.read_text()
    assert text.startswith("* hierarchy-lab SDPA sparse export\n* hello\n* world\n")
    assert "x1 = y(1,0)" in text
