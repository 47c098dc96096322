import csv
import json

import numpy as np
import pytest

from vortexsheets import cli, records
from vortexsheets.functionals import closed_residual


def write_config(path, mode="co-rotating", m=3, d=2.0, eps="0.01", N=16, Q=128):
    path.write_text(
        f"[problem]\nmode = {mode}\nm = {m}\nd = {d}\n"
        f"[numerics]\nN = {N}\nQ = {Q}\n"
        f"[run]\nepsilons = {eps}\n"
        "[oracle]\nQ = 256\n"
    )
    return path


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_solve_corotating_outputs(tmp_path):
    cfg = write_config(tmp_path / "run.ini")
    out = tmp_path / "out"
    assert cli.main(["solve", "--config", str(cfg), "--out", str(out)]) == 0
    coeffs = read_csv(out / "coeffs_eps0.01.csv")
    assert coeffs[0] == ["j", "f", "g"] and len(coeffs) == 17
    for i in range(3):
        rows = read_csv(out / f"curve_eps0.01_sheet{i}.csv")
        assert rows[0] == ["x", "z1", "z2", "gamma", "kappa"]
        assert len(rows) == 1 + 129
        assert rows[1][1:] == rows[-1][1:]
    assert (out / "report.txt").exists() and (out / "report.json").exists()
    assert (out / "family.svg").read_text().startswith("<svg")


def test_traveling_pair_has_negative_mirror_strength(tmp_path):
    cfg = write_config(tmp_path / "run.ini", mode="traveling", m=2)
    out = tmp_path / "out"
    assert cli.main(["solve", "--config", str(cfg), "--out", str(out), "--emit", "curves"]) == 0
    g0 = np.array([float(r[3]) for r in read_csv(out / "curve_eps0.01_sheet0.csv")[1:]])
    g1 = np.array([float(r[3]) for r in read_csv(out / "curve_eps0.01_sheet1.csv")[1:]])
    assert np.all(g0 > 0) and np.all(g1 < 0)
    assert not (out / "report.txt").exists()


def test_bad_offset_is_a_config_error(tmp_path, capsys):
    cfg = write_config(tmp_path / "run.ini", d=0.5)
    assert cli.main(["solve", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert "d > 1" in capsys.readouterr().err


def test_unknown_emit_flag(tmp_path):
    cfg = write_config(tmp_path / "run.ini")
    assert cli.main(["solve", "--config", str(cfg), "--emit", "movie"]) == 2


def test_output_is_deterministic(tmp_path):
    cfg = write_config(tmp_path / "run.ini", eps="0.01, 0.02")
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["continue", "--config", str(cfg), "--out", str(a)]) == 0
    assert cli.main(["continue", "--config", str(cfg), "--out", str(b)]) == 0
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes(), n


def test_record_roundtrip_and_validate(tmp_path, capsys):
    cfg = write_config(tmp_path / "run.ini", m=2)
    out = tmp_path / "out"
    assert cli.main(["solve", "--config", str(cfg), "--out", str(out), "--emit", ""]) == 0
    rec = out / "solution_eps0.01.json"
    sol = records.load_record(rec)
    stored = json.loads(rec.read_text())
    res = closed_residual(sol.config, sol.state)
    assert abs(res.sup() - sol.residual_sup) <= 1e-14
    assert res.speed.total == sol.speed.total
    assert stored["config_hash"] == records.config_hash(sol.config)
    capsys.readouterr()
    assert cli.main(["validate", str(rec)]) == 0
    assert "oracle normal" in capsys.readouterr().out


def test_tampered_record_is_rejected(tmp_path):
    cfg = write_config(tmp_path / "run.ini", m=2)
    out = tmp_path / "out"
    cli.main(["solve", "--config", str(cfg), "--out", str(out), "--emit", ""])
    rec = out / "solution_eps0.01.json"
    data = json.loads(rec.read_text())
    data["config"]["d"] = 3.0
    rec.write_text(json.dumps(data))
    with pytest.raises(ValueError):
        records.load_record(rec)
    assert cli.main(["validate", str(rec)]) == 2


def test_empty_report_is_header_only(tmp_path):
    txt, side = records.emit_report([], tmp_path / "r.txt")
    assert len(txt.read_text().splitlines()) == 1
    assert json.loads(side.read_text())["rows"] == []


def test_report_rows_sorted(tmp_path, solutions):
    from vortexsheets import oracle

    sols = [solutions.get(e) for e in (0.02, 0.005, 0.01, 0.04)]
    rows = [records.report_row(s, oracle.equilibrium_residual(s, 128)) for s in sols]
    txt, side = records.emit_report(rows, tmp_path / "r.txt")
    assert len(txt.read_text().splitlines()) == 5
    eps = [r["epsilon"] for r in json.loads(side.read_text())["rows"]]
    assert eps == [0.005, 0.01, 0.02, 0.04]


def test_missing_epsilons(tmp_path):
    p = tmp_path / "run.ini"
    p.write_text("[problem]\nm = 2\n")
    assert cli.main(["solve", "--config", str(p)]) == 2


def test_config_allows_inline_comments(tmp_path):
    p = tmp_path / "run.ini"
    p.write_text("[problem]\nmode = traveling  ; pair\nd = 3.0\n[numerics]\nN = 8   # modes\nQ = 64\n"
                 "[run]\nepsilons = 0.01, 0.02\n")
    cfg = records.load_config(p)
    assert cfg.sheet.mode == "traveling" and cfg.sheet.N == 8 and cfg.epsilons == (0.01, 0.02)
