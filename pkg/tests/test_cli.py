import numpy as np
import pytest

from divnfr.cli import main

SCEN = "synth_k30_a08_pop1.txt"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_ingest(tmp_path, capsys):
    src = tmp_path / "u.csv"
    src.write_text("i,j,u\n1,2,0.7\n2,1,0.55\n1,3,0.49\n")
    code, out, _ = run(capsys, "ingest", str(src), "--out", str(tmp_path / "u.npz"))
    assert code == 0 and "K=3 nonzero=2" in out
    with np.load(tmp_path / "u.npz") as data:
        assert data["scores"][0, 2] == 0.0


def test_bsr(tmp_path, capsys):
    code, out, _ = run(capsys, "bsr", "--scenario", SCEN, "--out", str(tmp_path / "p.csv"))
    assert code == 0 and "BSR cost" in out
    assert (tmp_path / "p.csv").read_text().startswith("i,q_max,p_bs")


def test_optimize_with_exports(tmp_path, capsys):
    code, out, _ = run(capsys, "optimize", "--scenario", SCEN, "--b", "0.9", "--cuts", "50",
                       "--mps-out", str(tmp_path / "m.mps"), "--out", str(tmp_path / "sol"))
    assert code == 0 and "validation: ok" in out
    assert (tmp_path / "m.mps").read_text().endswith("ENDATA\n")
    assert (tmp_path / "sol" / "summary.csv").exists()


@pytest.mark.parametrize("extra", [
    ["--fairness", "max", "--cf", "0.05", "--b", "0"],
    ["--fairness", "tv", "--cf", "0.2"],
    ["--fairness", "kl", "--cf", "0.1", "--cut-mode", "secant"],
    ["--algorithm", "nfr"],
])
def test_optimize_variants(capsys, extra):
    code, out, _ = run(capsys, "optimize", "--scenario", SCEN, *extra)
    assert code == 0 and "validation: ok" in out


def test_optimize_with_relevance_file(tmp_path, capsys):
    src = tmp_path / "u.csv"
    src.write_text("\n".join(",".join("0" if i == j else "0.8" for j in range(4)) for i in range(4)))
    scen = tmp_path / "s.txt"
    scen.write_text("K=4\nN=2\nC=1\nL=40\nalpha=0.5\npop=1\nq=0.8\nb=0.5\ncf=0\n"
                    "fairness=none\nseed=0\nM=20\ncut_mode=tangent\n")
    code, out, _ = run(capsys, "optimize", "--scenario", str(scen), "--relevance", str(src),
                       "--backend", "simplex")
    assert code == 0 and "validation: ok" in out


def test_simulate(tmp_path, capsys):
    code, out, _ = run(capsys, "simulate", "--scenario", SCEN, "--sessions", "20",
                       "--length", "200", "--seed", "3", "--policy", "diverse",
                       "--trace", str(tmp_path / "t.csv"))
    assert code == 0 and "total variation" in out
    assert len((tmp_path / "t.csv").read_text().splitlines()) == 4001


def test_sweep_and_report(tmp_path, capsys):
    out_csv = tmp_path / "s.csv"
    code, _, _ = run(capsys, "sweep", SCEN, "--b-list", "0.5,1.0", "--cf-list", "0.1",
                     "--kinds", "max", "--out", str(out_csv))
    assert code == 0
    code, out, _ = run(capsys, "report", str(out_csv), "--curve-out", str(tmp_path / "c.csv"))
    assert code == 0 and "Diverse(b=0.5)" in out
    assert (tmp_path / "c.csv").read_text().splitlines()[-1].endswith("BSR")


def test_exit_codes(tmp_path, capsys):
    assert run(capsys, "bsr", "--scenario", str(tmp_path / "missing.txt"))[0] == 4
    bad = tmp_path / "bad.txt"
    bad.write_text("K=4\n")
    code, _, err = run(capsys, "bsr", "--scenario", str(bad))
    assert code == 3 and "missing keys" in err
    assert run(capsys, "optimize", "--scenario", SCEN, "--b", "1.5")[0] == 3
    assert run(capsys, "sweep", "--out", str(tmp_path / "x.csv"))[0] == 3
    # pinning the demand to the baseline while asking for more entropy than
    # it has cannot be satisfied
    code, _, err = run(capsys, "optimize", "--scenario", SCEN, "--fairness", "max",
                       "--cf", "0", "--b", "1", "--cut-mode", "secant", "--cuts", "5")
    assert code == 2 and "infeasible" in err
