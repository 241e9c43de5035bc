import json
import math

import pytest

from blhardy.cli import EXIT_IO, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, config_hash, main, parse_function


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_ef_order_one_root(capsys):
    code, out, _ = run(capsys, "ef", "--order", "1")
    assert code == EXIT_OK
    roots = json.loads(out)["result"]["roots"]
    assert len(roots) == 1 and abs(abs(roots[0]) - (2 - math.sqrt(3))) <= 1e-12


def test_spline_dump_order_zero(capsys):
    code, out, _ = run(capsys, "spline", "--order", "0", "--dump")
    res = json.loads(out)["result"]
    assert code == EXIT_OK
    assert res["breakpoints"] == [0.0, 1.0] and res["pieces"] == [[1.0]]


def test_csv_header_lines(capsys):
    code, out, _ = run(capsys, "embed", "--s1", "1", "--s2", "0.5", "--depth", "2", "--format", "csv")
    lines = out.splitlines()
    assert code == EXIT_OK
    assert lines[0].startswith("# command=embed config_hash=") and lines[1].startswith("# truncation")
    assert lines[2].split(",")[0] == "k"
    assert len(lines) - 3 == 2 + 2 + 4 + 8 - 2  # index set in [0,2) at depths 0..2


def test_config_file_supplies_and_is_overridden(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"order": 1}))
    code, out, _ = run(capsys, "ef", "--config", str(cfg))
    assert code == EXIT_OK and json.loads(out)["result"]["order"] == 1
    code, out, _ = run(capsys, "ef", "--config", str(cfg), "--order", "2")
    assert code == EXIT_OK and json.loads(out)["result"]["order"] == 2
    # the same settings hash equally with or without the file
    _, direct, _ = run(capsys, "ef", "--order", "1")
    _, via_file, _ = run(capsys, "ef", "--config", str(cfg))
    assert json.loads(direct)["config_hash"] == json.loads(via_file)["config_hash"]


@pytest.mark.parametrize("argv, code", [
    (["ef"], EXIT_USAGE),
    (["nosuch"], EXIT_USAGE),
    (["ef", "--order", "x"], EXIT_USAGE),
    (["ef", "--order", "-1"], EXIT_VALIDATION),
    (["hardy", "--R", "2"], EXIT_VALIDATION),
    (["embed", "--s1", "1", "--s2", "0", "--weights", "bogus"], EXIT_VALIDATION),
    (["ef", "--config", "/nonexistent/config.json"], EXIT_IO),
    (["ef", "--order", "1", "--out", "/nonexistent/dir/out.json"], EXIT_IO),
])
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"order": 1, "colour": "red"}))
    code, _, err = run(capsys, "ef", "--config", str(cfg))
    assert code == EXIT_VALIDATION and "colour" in err


def test_out_file(tmp_path, capsys):
    path = tmp_path / "r.json"
    assert run(capsys, "spline", "--order", "2", "--out", str(path))[0] == EXIT_OK
    assert json.loads(path.read_text())["result"]["degree"] == 2


@pytest.mark.parametrize("argv", [
    ["hardy", "--star", "+,0", "--orders", "1,0", "--cuts", "0,0", "--w", "example:alpha=0.3*const", "--R", "8", "--depth", "2"],
    ["coeffs", "--function", "bspline:n=3,shift=0.5", "--depth", "3"],
    ["norm", "--function", "bspline:n=4", "--s", "0.5", "--scale", "f", "--depth", "3"],
    ["muck", "--weight", "power:alpha=0.5", "--levels", "2"],
    ["embed", "--s1", "1", "--s2", "0.5", "--weights", "power:alpha=0.5;const", "--depth", "3"],
])
@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_thread_count_does_not_change_bytes(capsys, argv, fmt):
    code1, one, _ = run(capsys, *argv, "--format", fmt, "--threads", "1")
    code8, eight, _ = run(capsys, *argv, "--format", fmt, "--threads", "8")
    assert code1 == code8 == EXIT_OK
    assert one == eight


def test_parse_function():
    f = parse_function("bspline:n=3,j=1,shift=0.5", 1)
    assert f.support == (0.25, 2.25)
    g = parse_function("bspline:n=2*bspline:n=3,deriv=1", 2)
    assert g.dim == 2
    assert parse_function("bspline:n=2", 2).dim == 2
    for bad in ("bspline:n=2*bspline:n=2*bspline:n=2", "gauss:n=2", "bspline:width=2"):
        with pytest.raises(ValueError):
            parse_function(bad, 2)


def test_config_hash_is_key_order_free():
    assert config_hash({"a": 1, "b": 2.0}) == config_hash({"b": 2.0, "a": 1})


def test_selftest_subset(capsys):
    code, out, err = run(capsys, "selftest", "--checks", "1,2", "--skip-determinism")
    assert code == EXIT_OK
    assert "[PASS]  1" in err and "[PASS]  2" in err
