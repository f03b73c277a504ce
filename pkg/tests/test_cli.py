import subprocess
import sys

import pytest
from fastapi.testclient import TestClient

from traprix import cli
from traprix.service import create_app

SCENE = "bbox 0 0 10 10\n2 4 6 5\n"
CROSSING = "bbox 0 0 10 10\n1 1 9 9\n1 9 9 1\n"


@pytest.fixture
def scene_file(tmp_path):
    path = tmp_path / "scene.txt"
    path.write_text(SCENE)
    return path


def run(argv, capsys, **kwargs):
    code = cli.main([str(a) for a in argv], **kwargs)
    out, err = capsys.readouterr()
    return code, out, err


def test_build_prints_one_row(scene_file, capsys):
    code, out, _ = run(["build", "--scene", scene_file], capsys)
    assert code == 0
    assert out.splitlines()[0] == "scenario,n,seed,D,L,ratio,nodes,paths,arrdepth,rebuilds,ms"
    assert out.splitlines()[1].startswith("file,1,0,4,3,1.333333,7,4,2,0,")


def test_gen_then_query(tmp_path, capsys):
    scene = tmp_path / "g.txt"
    code, _, _ = run(["gen", "random", "--n", 12, "--seed", 3, "--out", scene], capsys)
    assert code == 0
    queries = tmp_path / "q.txt"
    queries.write_text("0 0\n3 3\n")
    code, out, _ = run(["query", "--scene", scene, "--queries", queries], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[1] == "OUTSIDE -" and lines[0].split()[0] in {"FACE", "EDGE", "VERTEX"}


def test_gen_requires_size(capsys):
    code, _, err = run(["gen", "sqrt", "--n", 4], capsys)
    assert code == 2 and "--k" in err


def test_exit_codes(tmp_path, scene_file, capsys):
    assert run(["build", "--scene", tmp_path / "missing.txt"], capsys)[0] == 4
    bad = tmp_path / "bad.txt"
    bad.write_text(CROSSING)
    assert run(["build", "--scene", bad], capsys)[0] == 2
    assert run(["build", "--scene", scene_file, "--depth-c", "0.1", "--max-rebuilds", "2"],
               capsys)[0] == 3
    assert run(["build", "--scene", scene_file, "--out", tmp_path / "no" / "dir.csv"],
               capsys)[0] == 4


def test_seed_falls_back_to_environment(scene_file, capsys, monkeypatch):
    monkeypatch.setenv("TRAPRIX_SEED", "77")
    _, out, _ = run(["build", "--scene", scene_file], capsys)
    assert out.splitlines()[1].split(",")[2] == "77"
    _, out, _ = run(["build", "--scene", scene_file, "--seed", "5"], capsys)
    assert out.splitlines()[1].split(",")[2] == "5"
    monkeypatch.setenv("TRAPRIX_SEED", "-1")
    assert run(["build", "--scene", scene_file], capsys)[0] == 2


def test_seed_must_fit_in_64_bits(scene_file, capsys):
    with pytest.raises(SystemExit):
        cli.main(["build", "--scene", str(scene_file), "--seed", str(2**64)])
    assert run(["build", "--scene", scene_file, "--seed", str(2**64 - 1)], capsys)[0] == 0


def test_ratio_via_cli(capsys):
    code, out, _ = run(["ratio", "--scenario", "sqrt", "--n", "3,4", "--repeats", 2,
                        "--order", "suggested", "--with-arrdepth"], capsys)
    assert code == 0
    assert len([ln for ln in out.splitlines() if ln.startswith("sqrt,")]) == 4
    assert out.count("# summary") == 2


def test_module_entry_point(scene_file):
    proc = subprocess.run([sys.executable, "-m", "traprix.cli", "build", "--scene", str(scene_file)],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.startswith("scenario,")


# -- the same commands through the service ------------------------------------

@pytest.fixture
def factory():
    app = create_app()
    return lambda url: TestClient(app, base_url=url)


@pytest.mark.parametrize("argv", [
    ["build", "--scene", "{scene}"],
    ["query", "--scene", "{scene}", "--queries", "{queries}"],
    ["gen", "recursive", "--n", "9"],
    ["ratio", "--n", "6", "--repeats", "2", "--seed", "4"],
])
def test_remote_output_matches_local(argv, tmp_path, scene_file, factory, capsys):
    queries = tmp_path / "q.txt"
    queries.write_text("5 9\n2 4\n")
    argv = [a.format(scene=scene_file, queries=queries) for a in argv]
    local = run(argv, capsys)
    remote = run(argv + ["--server", "http://testserver"], capsys, client_factory=factory)
    assert local[0] == remote[0] == 0
    assert local[1] == remote[1]


def test_remote_exit_codes(tmp_path, scene_file, factory, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text(CROSSING)
    server = ["--server", "http://testserver"]
    assert run(["build", "--scene", bad, *server], capsys, client_factory=factory)[0] == 2
    assert run(["build", "--scene", scene_file, "--depth-c", "0.1", "--max-rebuilds", "1",
                *server], capsys, client_factory=factory)[0] == 3
    assert run(["build", "--scene", tmp_path / "nope", *server], capsys,
               client_factory=factory)[0] == 4


def test_unreachable_server(scene_file, capsys):
    code, _, err = run(["build", "--scene", scene_file, "--server", "http://127.0.0.1:9"], capsys)
    assert code == 4 and "cannot reach" in err
