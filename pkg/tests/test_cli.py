import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from recordlab import cli


class TestParsing:
    @pytest.mark.parametrize("text,value", [
        ("1000000", 10**6), ("1e6", 10**6), ("10^6", 10**6), ("10**6", 10**6),
        ("1_000", 1000), ("10^100", 10**100), ("1e300", 10**300),
    ])
    def test_parse_int(self, text, value):
        assert cli.parse_int(text) == value

    @pytest.mark.parametrize("text", ["1.5", "abc", "1e-3"])
    def test_parse_int_rejects(self, text):
        with pytest.raises(cli.UsageError):
            cli.parse_int(text)

    def test_parse_list(self):
        assert cli.parse_list(" 1e3, 1e4 ,") == ["1e3", "1e4"]


def _cfg(argv, environ=None, tmp=None):
    args = cli.build_parser().parse_args(argv)
    return cli.make_config(args, environ or {})


class TestConfig:
    def test_file_then_flags_then_env(self, tmp_path):
        f = tmp_path / "run.cfg"
        f.write_text("# comment\nd = 3\nn = 1e3,1e4\nseed = 5\ntrials = 100\n")
        cfg = _cfg(["simulate", "--config", str(f)])
        assert (cfg.d, cfg.n_grid, cfg.seed, cfg.trials) == (3, [1000, 10000], 5, [100])
        cfg = _cfg(["simulate", "--config", str(f), "--seed", "9", "--d", "2"])
        assert (cfg.d, cfg.seed) == (2, 9)
        cfg = _cfg(["simulate", "--config", str(f), "--seed", "9"], {"RECORDLAB_SEED": "77"})
        assert cfg.seed == 77

    def test_auto_offsets(self):
        assert _cfg(["simulate", "--a", "auto"]).a_grid == ["-a_n", "0", "a_n"]

    def test_bad_config(self, tmp_path):
        f = tmp_path / "bad.cfg"
        f.write_text("colour = blue\n")
        with pytest.raises(cli.UsageError):
            _cfg(["simulate", "--config", str(f)])

    @pytest.mark.parametrize("argv", [
        ["simulate", "--d", "1"], ["simulate", "--n", "0"], ["simulate", "--trials", "0"],
        ["simulate", "--n", "1e3,1e4", "--trials", "1,2,3"], ["simulate", "--seed", str(2**64)],
        ["simulate", "--engine", "gpu"], ["simulate", "--workers", "0"],
    ])
    def test_rejected(self, argv):
        with pytest.raises(cli.UsageError):
            _cfg(argv)


def _run(argv, tmp_path, capsys=None):
    return cli.main(argv + ["--out", str(tmp_path)])


class TestMain:
    def test_usage_error_exit_code(self, tmp_path, capsys):
        assert _run(["simulate", "--d", "1"], tmp_path) == 2
        assert "usage:" in capsys.readouterr().err

    def test_unknown_subcommand(self, tmp_path):
        with pytest.raises(SystemExit) as e:
            _run(["nosuch"], tmp_path)
        assert e.value.code == 2

    def test_bounds_table_huge_n(self, tmp_path):
        assert _run(["bounds-table", "--n", "10^100", "--d", "2", "--trials", "2e4"], tmp_path) == 0
        (csv_path,) = tmp_path.glob("bounds-table-*.csv")
        raw = csv_path.read_bytes()
        assert b"\r\n" in raw
        rows = list(csv.reader(io.StringIO(raw.decode())))
        assert rows[0] == cli.CSV_COLUMNS
        assert all(r[1] == str(10**100) for r in rows[1:])
        assert {r[-1] for r in rows[1:]} <= {"pass", "fail", "report-only"}
        doc = json.loads(next(tmp_path.glob("bounds-table-*.json")).read_text())
        assert doc["rows"][0]["n"] == str(10**100) and doc["failed"] is False

    def test_output_independent_of_workers(self, tmp_path):
        argv = ["simulate", "--n", "1e3", "--d", "2", "--trials", "400", "--seed", "3", "--raw"]
        a, b = tmp_path / "w1", tmp_path / "w8"
        assert _run(argv + ["--workers", "1"], a) == 0
        assert _run(argv + ["--workers", "8"], b) == 0
        for pat in ("simulate-*[0-9].csv", "simulate-*-raw.csv"):
            (fa,), (fb,) = a.glob(pat), b.glob(pat)
            assert fa.read_bytes() == fb.read_bytes()

    def test_console_script_module(self, tmp_path):
        r = subprocess.run([sys.executable, "-m", "recordlab.cli", "bounds-table", "--n", "1e6",
                            "--trials", "1e4", "--out", str(tmp_path)], capture_output=True, text=True)
        assert r.returncode == 0, r.stderr
        assert "csv:" in r.stdout and Path(r.stdout.split("csv: ")[1].split()[0]).exists()
