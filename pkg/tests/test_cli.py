import json
import os

import pytest

from hgcsp.cli import main
from hgcsp.csp import CspInstance, brute_force_solve

from conftest import fano_plane


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_width_single_edge(workdir, capsys):
    hg = write(workdir / "h.hg", "a b c d\n")
    assert main(["width", hg, "--measure", "tw"]) == 0
    assert capsys.readouterr().out.strip() == "tw = 3"
    assert main(["--format", "json", "width", hg, "--measure", "fhw"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["value"] == "1"


def test_width_fano_json(workdir, capsys):
    hg = write(workdir / "f.hg", fano_plane().to_text())
    assert main(["--format", "json", "width", hg, "--measure", "fhw"]) == 0
    assert json.loads(capsys.readouterr().out)["value"] == "7/3"


def test_solve_exit_codes(workdir, capsys):
    sat = write(workdir / "s.csp",
                "var x y\ndomain a b\nconstraint x y\n  a b\nend\n")
    assert main(["solve", sat, "--c0", "auto-fhw"]) == 0
    out = capsys.readouterr().out
    assert "verdict SAT" in out and "x = a" in out
    unsat = write(workdir / "u.csp",
                  "var x\ndomain a\nconstraint x\nend\n")
    assert main(["solve", unsat]) == 1
    assert "verdict UNSAT" in capsys.readouterr().out


def test_split_writes_pieces(workdir, capsys):
    csp = write(workdir / "i.csp", "\n".join([
        "var x y", "domain a b c",
        "constraint x y", "  a a", "  a b", "  a c", "  b a", "end", ""]))
    assert main(["split", csp, "--eps", "1/8", "--out-dir",
                 str(workdir / "pieces")]) == 0
    assert (workdir / "pieces" / "trace.txt").exists()
    pieces = sorted(p for p in os.listdir(workdir / "pieces")
                    if p.startswith("piece_"))
    assert pieces
    solutions = set()
    original = CspInstance.from_text((workdir / "i.csp").read_text())
    for p in pieces:
        piece = CspInstance.from_text((workdir / "pieces" / p).read_text(),
                                      prune=False)
        got = brute_force_solve(piece)
        if got:
            solutions.add(tuple(sorted(got.items())))
    assert solutions  # at least one piece is satisfiable


def test_separator_flow_duality_cli(workdir, capsys):
    hg = write(workdir / "p.hg", "a b\nb c\nc d\n")
    assert main(["--format", "json", "separator", hg, "--x", "a", "--y", "d"]) == 0
    sep = json.loads(capsys.readouterr().out)
    assert main(["--format", "json", "flow", hg, "--x", "a", "--y", "d"]) == 0
    flow = json.loads(capsys.readouterr().out)
    assert sep["weight"] == flow["value"] == "1"


def test_concurrent_flow_cli(workdir, capsys):
    hg = write(workdir / "h.hg", "a b c d\n")
    assert main(["--format", "json", "concurrent-flow", hg,
                 "--parts", "a,b;c"]) == 0
    assert json.loads(capsys.readouterr().out)["epsilon"] == "1"


def test_round_separator_and_bstar(workdir, capsys):
    hg = write(workdir / "h.hg", "a b\nb c\n")
    sep = write(workdir / "s.txt", "a,b 1/2\nb,c 1/2\n")
    oracle = write(workdir / "b.txt", "modular\na 1/2\nb 1/2\nc 1/2\n")
    assert main(["--format", "json", "round-separator", hg, "--x", "a",
                 "--y", "c", "--separator", sep, "--oracle", oracle]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["separator"]
    assert main(["bstar", hg, "--oracle", oracle, "--z", "a,b,c"]) == 0
    assert "value" in capsys.readouterr().out


def test_decompose_or_connected_cli(workdir, capsys):
    hg = write(workdir / "h.hg", "a b\nb c\nc d\n")
    oracle = write(workdir / "b.txt",
                   "modular\na 1/2\nb 1/2\nc 1/2\nd 1/2\n")
    assert main(["decompose-or-connected", hg, "--oracle", oracle,
                 "--w", "1"]) == 0
    assert "decomposition" in capsys.readouterr().out


def test_sat2csp_and_check(workdir, capsys):
    cnf = write(workdir / "f.cnf", "p cnf 2 2\n1 2 0\n-1 0\n")
    assert main(["--format", "json", "sat2csp", cnf]) == 0
    payload = json.loads(capsys.readouterr().out)
    instance = CspInstance.from_json_dict(payload, prune=False)
    assert brute_force_solve(instance) is not None
    assert main(["check", "--suite", "widths"]) == 0
    assert "PASS" in capsys.readouterr().out


def test_embed_simulate_transfer_cli(workdir, capsys):
    g = write(workdir / "g.hg", "u v\nv w\n")
    hg = write(workdir / "h.hg", "a b\nb c\nc d\n")
    assert main(["embed", g, hg]) == 0
    out = capsys.readouterr().out
    emb_lines = [l for l in out.splitlines() if l.startswith("vertex:")]
    emb = write(workdir / "e.txt", "\n".join(emb_lines) + "\n")
    csp = write(workdir / "i.csp", "\n".join([
        "var u v w", "domain 0 1",
        "constraint u v", "  0 1", "  1 0", "end",
        "constraint v w", "  0 0", "  1 1", "end", ""]))
    assert main(["simulate", csp, hg, "--embedding", emb]) == 0
    td = write(workdir / "t.td",
               "node 0 parent - bag a b\nnode 1 parent 0 bag b c\n"
               "node 2 parent 1 bag c d\n")
    assert main(["transfer", g, hg, "--embedding", emb, "--td", td]) == 0
    assert "bag" in capsys.readouterr().out


def test_usage_errors(workdir, capsys):
    missing = str(workdir / "nope.hg")
    assert main(["width", missing, "--measure", "tw"]) == 2
    hg = write(workdir / "h.hg", "a b\n")
    assert main(["width", hg, "--measure", "mu"]) == 2
