import subprocess
import sys

from roughel.cli import main
from roughel.textio import parse_foquery, parse_kb, parse_structure

from conftest import DATA

KEX, LOWER_B = str(DATA / "kex.rkb"), str(DATA / "lowerB.rcq")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_answer(capsys):
    assert run(capsys, "answer", KEX, LOWER_B) == (0, "a\nb\n", "")


def test_boolean_answer(capsys):
    code, out, _ = run(capsys, "answer", str(DATA / "hasA.rkb"), str(DATA / "phi4.rcq"))
    assert code == 0 and out in ("true\n", "false\n")


def test_normalize_round_trips(capsys):
    code, out, _ = run(capsys, "normalize", KEX)
    assert code == 0
    kb = parse_kb(out)
    assert any(ax.lhs.name.startswith("_N") for ax in kb.tbox if hasattr(ax, "lhs")
               and hasattr(ax.lhs, "name"))


def test_materialize_to_file(capsys, tmp_path):
    out = tmp_path / "kex.rfs"
    code, text, _ = run(capsys, "materialize", KEX, "-o", str(out))
    assert code == 0 and text == ""
    s = parse_structure(out.read_text())
    assert len(s.domain) == 9


def test_rewrite(capsys):
    code, out, _ = run(capsys, "rewrite", str(DATA / "phi4.rcq"), "--ris", str(DATA / "empty.rkb"))
    assert code == 0
    fo = parse_foquery(out)
    assert len(fo.core) == 2 and len(fo.filters) == 2


def test_check_single_and_directory(capsys):
    code, out, _ = run(capsys, "check", KEX, LOWER_B)
    assert code == 0 and out.endswith("DIFF: none\n")
    code, out, _ = run(capsys, "check", str(DATA))
    assert code == 0 and "DIFF: mismatch" not in out
    assert out.rstrip().splitlines()[-1].startswith("checked ")


def test_emit_sql(capsys, tmp_path):
    code, _, _ = run(capsys, "emit-sql", KEX, LOWER_B, "--outdir", str(tmp_path))
    assert code == 0
    names = {p.name for p in tmp_path.iterdir()}
    assert {"schema.sql", "query.sql", "dom.csv", "rho.csv", "aux.csv"} <= names


def test_fuzz(capsys, tmp_path):
    code, out, _ = run(capsys, "fuzz", "--seed", "3", "--cases", "12", "--workers", "1",
                       "--out", str(tmp_path))
    assert code == 0
    assert out.strip().endswith("0 failing")


def test_exit_codes(capsys, tmp_path):
    bad = tmp_path / "bad.rkb"
    bad.write_text("(subclass A\n")
    assert run(capsys, "normalize", str(bad))[0] == 2
    assert run(capsys, "answer", str(tmp_path / "missing.rkb"), LOWER_B)[0] == 2
    incons = tmp_path / "incons.rkb"
    incons.write_text("(subclass A bottom)\n(assert A a)\n")
    code, _, err = run(capsys, "answer", str(incons), LOWER_B)
    assert code == 1 and "inconsistent" in err


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "roughel", "answer", KEX, LOWER_B],
                       capture_output=True, text=True)
    assert p.returncode == 0 and p.stdout == "a\nb\n"
