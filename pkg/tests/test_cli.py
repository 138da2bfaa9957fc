import json

import pytest

from mwmaxlink.cli import CSV_HEADER, build_parser, fmt, main

FAST = "--N 2 --M 1 --packets 10 --ncal 200 --symbols 10"


def run_cli(args):
    return main(args.split() if isinstance(args, str) else args)


def test_run_writes_expected_csv(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code = run_cli(f"run --scheme mw-max-link --Z 2 {FAST} --snr 0:2:10 --seed 7 --out {out}")
    assert code == 0
    lines = out.read_text().split("\n")
    assert lines[0] == CSV_HEADER
    assert len(lines) == 8  # header + 6 rows + trailing newline
    assert lines[-1] == ""
    first = lines[1].split(",")
    assert first[0] == "mw-max-link"
    assert first[:6] == ["mw-max-link", "2", "2", "1", "6", "0"]
    assert "wrote 6 rows" in capsys.readouterr().out


def test_run_csv_is_byte_reproducible(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = f"run --scheme tw-max-link {FAST} --snr 0:5:10 --seed 3 --out"
    assert run_cli(f"{argv} {a}") == 0
    assert run_cli(f"{argv} {b}") == 0
    assert a.read_bytes() == b.read_bytes()


def test_run_csi_flag_lands_in_rows(tmp_path):
    out = tmp_path / "r.csv"
    assert run_cli(f"run --scheme tw-max-min {FAST} --snr 0:5:5 --csi 0.5,1 --out {out}") == 0
    for line in out.read_text().splitlines()[1:]:
        cells = line.split(",")
        assert cells[6] == "0.5" and cells[7] == "1"


def test_tw_scheme_rejects_multiway_clusters(tmp_path):
    with pytest.raises(SystemExit) as err:
        run_cli(f"run --scheme tw-max-min --Z 5 {FAST} --out {tmp_path/'x.csv'}")
    assert err.value.code == 2


def test_mixed_scheme_list_applies_z_to_mw_only(tmp_path):
    out = tmp_path / "r.csv"
    assert run_cli(f"run --scheme mw-max-link,tw-max-min --Z 2 {FAST} --snr 0:5:5 --out {out}") == 0
    rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
    assert [r[1] for r in rows] == ["2", "2", "1", "1"]


def test_bad_flags_exit_2():
    with pytest.raises(SystemExit) as err:
        run_cli("run --scheme nonsense")
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        run_cli("run --snr 10:0:0")
    assert err.value.code == 2


def test_runtime_failure_exits_1(tmp_path, capsys):
    missing = tmp_path / "nope" / "r.csv"
    assert run_cli(f"run --scheme tw-max-link {FAST} --snr 0:5:5 --out {missing}") == 1
    assert "error:" in capsys.readouterr().err


def test_complexity_command_values(capsys):
    assert run_cli("complexity --scheme mw --Z 5 --N 10 --M 2 --mod bpsk") == 0
    out = capsys.readouterr().out
    assert "additions 4500" in out and "multiplications 4800" in out
    assert run_cli("complexity --scheme tw-max-min --N 10 --M 2 --mod bpsk") == 0
    out = capsys.readouterr().out
    assert "additions 450" in out and "multiplications 480" in out
    assert run_cli("complexity --scheme mw --Z 1 --N 10 --M 2 --mod bpsk") == 0
    out = capsys.readouterr().out
    assert "additions 900" in out and "multiplications 960" in out  # 2x tw-max-min


def test_calibrate_command_deterministic(capsys):
    argv = "calibrate --Z 2 --N 4 --M 2 --ncal 1000 --seed 6"
    assert run_cli(argv) == 0
    first = capsys.readouterr().out
    assert run_cli(argv) == 0
    assert capsys.readouterr().out == first
    c_line = [l for l in first.splitlines() if l.startswith("C ")][0]
    assert float(c_line.split()[1]) > 0


def test_calibrate_stderr_shrinks_with_samples(capsys):
    assert run_cli("calibrate --Z 2 --N 4 --M 2 --ncal 2000 --seed 6") == 0
    se_small = float([l for l in capsys.readouterr().out.splitlines() if l.startswith("stderr")][0].split()[1])
    assert run_cli("calibrate --Z 2 --N 4 --M 2 --ncal 8000 --seed 6") == 0
    se_big = float([l for l in capsys.readouterr().out.splitlines() if l.startswith("stderr")][0].split()[1])
    assert se_big < se_small
    assert se_big / se_small == pytest.approx(0.5, abs=0.15)  # ~1/sqrt(4)


def test_config_file_merging(tmp_path):
    cfg_file = tmp_path / "sweep.json"
    cfg_file.write_text(json.dumps({"scheme": "tw-max-link", "N": 3, "M": 1, "packets": 10,
                                    "ncal": 200, "symbols": 10, "snr": "0:5:5"}))
    out = tmp_path / "r.csv"
    assert run_cli(f"run --config {cfg_file} --seed 9 --out {out}") == 0
    rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
    assert rows[0][0] == "tw-max-link" and rows[0][2] == "3" and rows[0][8] == "9"


def test_config_file_rejects_unknown_keys(tmp_path):
    cfg_file = tmp_path / "bad.json"
    cfg_file.write_text(json.dumps({"banana": 1}))
    with pytest.raises(SystemExit) as err:
        run_cli(f"run --config {cfg_file}")
    assert err.value.code == 2


def test_parallel_jobs_reproduce_serial_csv(tmp_path):
    serial, parallel = tmp_path / "s.csv", tmp_path / "p.csv"
    base = f"run --scheme tw-max-link,tw-max-min {FAST} --snr 0:5:5 --seed 4"
    assert run_cli(f"{base} --out {serial}") == 0
    assert run_cli(f"{base} --jobs 2 --out {parallel}") == 0
    assert serial.read_bytes() == parallel.read_bytes()


def test_fmt_six_significant_digits():
    assert fmt(0.000123456789) == "0.000123457"
    assert fmt(1.0) == "1"
    assert fmt(2) == "2"
    assert fmt(1234567.0) == "1.23457e+06"


def test_parser_requires_subcommand():
    with pytest.raises(SystemExit) as err:
        build_parser().parse_args([])
    assert err.value.code == 2
