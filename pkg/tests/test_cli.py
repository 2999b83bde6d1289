import json
import subprocess
import sys

import pytest

from primechaos import __version__
from primechaos.cli import EXIT_NUMERIC, EXIT_OK, EXIT_PARTIAL, EXIT_USER, main
from primechaos.errors import DomainError
from primechaos.reproduce import FIGURES, parse_rows, parse_size


def data_lines(path):
    return [l for l in path.read_text().splitlines() if not l.startswith("#")]


def test_pipeline_matches_figure_1a(tmp_path):
    p, u, n = tmp_path / "p.txt", tmp_path / "u.txt", tmp_path / "n.csv"
    assert main(["primes", "--first", "100", "-o", str(p)]) == EXIT_OK
    assert main(["unfold", str(p), "--method", "r", "-o", str(u)]) == EXIT_OK
    assert main(["stats", str(u), "--nnsd", "-o", str(n)]) == EXIT_OK
    assert main(["figure", "1a", "--outdir", str(tmp_path / "fig")]) == EXIT_OK
    assert data_lines(n) == data_lines(tmp_path / "fig" / "fig1a_nnsd.csv")


def test_figure_outputs_and_provenance(tmp_path):
    assert main(["figure", "1a", "--outdir", str(tmp_path)]) == EXIT_OK
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["fig1a_berry_robnik.csv", "fig1a_goe.csv", "fig1a_nnsd.csv",
                     "fig1a_poisson.csv"]
    head = (tmp_path / "fig1a_nnsd.csv").read_text().splitlines()[:3]
    assert head[0] == f"# primechaos {__version__}"
    assert head[1] == "# command: primechaos figure 1a --outdir " + str(tmp_path)
    assert head[2].startswith("# config: ") and "window_step=0.25" in head[2]


def test_figure_bitwise_reproducible(tmp_path):
    for d in ("a", "b"):
        assert main(["figure", "2a", "--outdir", str(tmp_path / d)]) == EXIT_OK
    for f in (tmp_path / "a").iterdir():
        out = tmp_path / "b" / f.name
        # command lines differ only by the output directory
        assert data_lines(f) == data_lines(out)
    assert main(["figure", "2a", "--outdir", str(tmp_path / "a")]) == EXIT_OK
    first = {f.name: f.read_bytes() for f in (tmp_path / "a").iterdir()}
    assert main(["figure", "2a", "--outdir", str(tmp_path / "a")]) == EXIT_OK
    assert first == {f.name: f.read_bytes() for f in (tmp_path / "a").iterdir()}


@pytest.mark.parametrize("fig, series", [
    ("5a", {"nnsd", "gse"}),
    ("5b", {"sigma2", "gse"}),
    ("3a", {"gamma1", "poisson", "goe", "gue"}),
    ("6", {"primes_1_10000", "primes_10001_20000"}),
])
def test_figure_series(tmp_path, fig, series):
    assert main(["figure", fig, "--outdir", str(tmp_path)]) == EXIT_OK
    got = {p.stem.split("_", 1)[1] for p in tmp_path.iterdir()}
    assert got == series


def test_figure_6_reports_saturation(tmp_path):
    main(["figure", "6", "--outdir", str(tmp_path)])
    text = (tmp_path / "fig6_primes_1_10000.csv").read_text()
    assert "l_saturation=" in text


def test_large_panel_needs_flag(tmp_path, capsys):
    assert main(["figure", "1d", "--outdir", str(tmp_path)]) == EXIT_USER
    assert "--allow-long-run" in capsys.readouterr().err
    assert not any(tmp_path.iterdir())


def test_unknown_figure(capsys):
    assert main(["figure", "7b"]) == EXIT_USER


def test_parse_error_names_line(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("# start_index=1\n2\n3\nfive\n7\n")
    assert main(["unfold", str(bad), "--method", "lilog"]) == EXIT_USER
    assert "bad.txt:4:" in capsys.readouterr().err


def test_insufficient_span(tmp_path, capsys):
    u = tmp_path / "u.txt"
    u.write_text("# method=riemann_r rescaled=false start_index=1\n"
                 + "".join(f"{0.4 * i}\n" for i in range(10)))
    assert main(["stats", str(u), "--numvar", "--lmax", "5", "--step", "0.25"]) == EXIT_USER
    assert "span" in capsys.readouterr().err


def test_table_rows(tmp_path, capsys):
    out = tmp_path / "t.json"
    assert main(["table", "--rows", "n=100,n=1000", "-o", str(out)]) == EXIT_OK
    rows = json.loads(out.read_text())
    assert [r["sequence_label"] for r in rows] == ["first 10^2 primes", "first 10^3 primes"]
    assert rows[0]["published_rho1"] == -0.00181
    assert rows[1]["rho1"] > rows[0]["rho1"]
    assert "published=" in capsys.readouterr().err


def test_table_partial_success(tmp_path):
    out = tmp_path / "t.json"
    assert main(["table", "--rows", "n=100,k=1e12", "-o", str(out)]) == EXIT_PARTIAL
    assert len(json.loads(out.read_text())) == 1


def test_table_empty_rows():
    assert main(["table", "--rows", ""]) == EXIT_USER
    assert main(["table", "--rows", "q=5"]) == EXIT_USER


def test_fit_from_curve_file(tmp_path, capsys):
    s = tmp_path / "s.csv"
    assert main(["stats", "--first", "1000", "--numvar", "-o", str(s)]) == EXIT_OK
    assert main(["fit", str(s)]) == EXIT_OK
    d = json.loads(capsys.readouterr().out)
    assert d["n_points"] == 50 and -0.2 <= d["rho1"] <= 1.2


def test_curves_subcommand(capsys):
    assert main(["curves", "--kind", "goe", "--statistic", "nnsd"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "s,density" in out
    assert main(["curves", "--kind", "br", "--statistic", "sigma2"]) == EXIT_USER


def test_primes_after_and_binary(tmp_path):
    b = tmp_path / "p.bin"
    assert main(["primes", "--after", "4", "--count", "2", "--binary", "-o", str(b)]) == EXIT_OK
    data = b.read_bytes()
    assert int.from_bytes(data[:8], "little") == 5
    assert int.from_bytes(data[16:24], "little") == 11
    h = tmp_path / "h.csv"
    assert main(["stats", str(b), "--nnsd", "-o", str(h)]) == EXIT_OK
    assert sum(1 for line in data_lines(h)[1:] if not line.endswith(",0")) == 1


def test_checkpoint_integrity_exit_code(tmp_path, capsys):
    cp = tmp_path / "cp.tsv"
    cp.write_text("1000000\t78497\n")
    code = main(["primes", "--after", "100000", "--count", "3", "--checkpoint", str(cp)])
    assert code == EXIT_NUMERIC
    assert "checkpoint" in capsys.readouterr().err


def test_config_file_and_env(tmp_path, monkeypatch):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("bin_width = 0.5\n")
    out = tmp_path / "n.csv"
    assert main(["--config", str(cfg), "stats", "--first", "100", "--nnsd", "-o", str(out)]) == 0
    assert len(data_lines(out)) == 1 + 8
    monkeypatch.setenv("PRIMECHAOS_CONFIG", str(cfg))
    assert main(["stats", "--first", "100", "--nnsd", "-o", str(out)]) == 0
    assert "bin_width=0.5" in out.read_text()
    cfg.write_text("bogus = 1\n")
    assert main(["stats", "--first", "100", "--nnsd"]) == EXIT_USER


def test_usage_errors():
    assert main([]) == EXIT_USER
    assert main(["bogus"]) == EXIT_USER
    assert main(["stats", "--first", "100"]) == EXIT_USER
    assert main(["--workers", "0", "primes", "--first", "3"]) == EXIT_USER


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "primechaos.cli", "--version"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and __version__ in res.stdout


def test_parse_helpers():
    assert parse_size("1e4") == 10**4
    assert parse_size("10^7") == 10**7
    assert parse_size("10**8") == 10**8
    assert parse_rows("left")[0] == ("n", 100)
    assert ("k", 10**12) in parse_rows("all")
    with pytest.raises(DomainError):
        parse_size("1.5e0")
    assert "6" in FIGURES and "4d" in FIGURES and len(FIGURES) == 21
