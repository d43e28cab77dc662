import json
import os

import numpy as np

from qdresponse.cli import main


def read_csv(path):
    meta, rows = {}, []
    with open(path, encoding="utf-8") as fh:
        header = None
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("# "):
                key, _, value = line[2:].partition("=")
                meta[key] = value
                continue
            if header is None:
                header = line.split(",")
                continue
            rows.append(dict(zip(header, line.split(","))))
    return meta, rows


def run(args, tmp_path):
    cwd = os.getcwd()
    os.chdir(tmp_path)
    try:
        return main(args)
    finally:
        os.chdir(cwd)


def test_figure_4b_emits_absorption_with_phonon_extrema(tmp_path):
    assert run(["figure", "4b", "--format", "csv"], tmp_path) == 0
    meta, rows = read_csv(tmp_path / "fig4b.csv")
    assert meta["figure"] == "4b"
    assert meta["observable"] == "chi1"
    assert "gamma_q0" in meta["assumed"]
    xs = np.array([float(r["x"]) for r in rows])
    absorption = np.abs(np.array([float(r["value_im"]) for r in rows]))
    step = xs[1] - xs[0]
    for x0 in (-10.0, 10.0):
        window = np.abs(xs - x0) <= 0.5
        peak_x = xs[window][np.argmax(absorption[window])]
        assert abs(peak_x - x0) <= step + 1e-9


def test_figure_2b_emits_two_traces_with_turning_points(tmp_path):
    assert run(["figure", "2b"], tmp_path) == 0
    up_meta, up_rows = read_csv(tmp_path / "fig2b_up.csv")
    down_meta, down_rows = read_csv(tmp_path / "fig2b_down.csv")
    p1 = float(up_meta["P1"])
    p2 = float(up_meta["P2"])
    assert p1 > p2 > 0.0
    assert down_meta["P1"] == up_meta["P1"]
    up = {r["x"]: float(r["w0"]) for r in up_rows}
    down = {r["x"]: float(r["w0"]) for r in down_rows}
    diffs = [float(x) for x in up if abs(up[x] - down[x]) > 1e-12]
    assert diffs and all(p2 <= x <= p1 for x in diffs)


def test_oracle_check_preset_4b_within_tolerance(tmp_path, capsys):
    code = run(["oracle-check", "--preset", "4b"], tmp_path)
    out = capsys.readouterr().out
    assert code == 0
    assert "max relative deviation" in out
    dev = float(out.split("max relative deviation =")[1].split()[0])
    assert dev < 1e-3


def test_unknown_figure_is_usage_error(tmp_path, capsys):
    assert run(["figure", "zz"], tmp_path) == 1
    assert "unknown figure" in capsys.readouterr().err


def test_missing_parameters_is_usage_error(tmp_path, capsys):
    assert run(["spectrum", "--param", "g0=1"], tmp_path) == 1
    assert "missing" in capsys.readouterr().err


def test_bad_subcommand_is_usage_error(tmp_path, capsys):
    assert run(["definitely-not-a-command"], tmp_path) == 1


def test_steady_prints_branch_table(tmp_path, capsys):
    code = run(["steady", "--preset", "2b", "--param", "ep0=8"], tmp_path)
    out = capsys.readouterr().out
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("w0,")
    assert len(lines) == 4  # header + three branches
    assert "Unstable" in out


def test_spectrum_with_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "point.cfg"
    cfg.write_text(
        "delta_p0 = -10\ndelta_c0 = -10\ng0 = 1.5\neta = 0.015\n"
        "omega_k0 = 10\nkappa_c0 = 1.35\ngamma_q0 = 0.1\nep0 = 5\n",
        encoding="utf-8")
    code = run(["spectrum", "--config", str(cfg), "--param", "ep0=7",
                "--axis", "delta_s0", "--grid=-1:1:21",
                "--observable", "t2", "--out", "spec.csv"], tmp_path)
    assert code == 0
    meta, rows = read_csv(tmp_path / "spec.csv")
    assert meta["ep0"] == "7.0"
    assert len(rows) == 21


def test_kerr_subcommand(tmp_path):
    code = run(["kerr", "--preset", "9b", "--grid=-13:13:131",
                "--out", "kerr.csv"], tmp_path)
    assert code == 0
    meta, rows = read_csv(tmp_path / "kerr.csv")
    assert meta["observable"] == "kerr"
    assert len(rows) == 131


def test_peaks_subcommand_finds_kerr_lines(tmp_path, capsys):
    code = run(["peaks", "--preset", "9b", "--kind", "peak",
                "--component", "re"], tmp_path)
    out = capsys.readouterr().out
    assert code == 0
    xs = [float(line.split(",")[0]) for line in out.strip().splitlines()[1:]]
    assert any(abs(x - 10.0) < 0.2 for x in xs)
    assert any(abs(x + 10.0) < 0.2 for x in xs)


def test_bistability_subcommand(tmp_path):
    code = run(["bistability", "--preset", "2b", "--grid", "0.2:16:159",
                "--out", "hys"], tmp_path)
    assert code == 0
    meta, rows = read_csv(tmp_path / "hys_up.csv")
    assert meta["axis"] == "ep0"
    assert len(rows) == 159
    assert (tmp_path / "hys_down.csv").exists()


def test_figure_json_format(tmp_path):
    assert run(["figure", "4a", "--format", "json"], tmp_path) == 0
    payload = json.loads((tmp_path / "fig4a.json").read_text())
    assert payload["meta"]["figure"] == "4a"
    assert len(payload["records"]) == 601
    assert set(payload["records"][0]) == {
        "x", "branch_id", "w0", "value_re", "value_im", "flags"}


def test_identical_invocations_are_byte_identical(tmp_path):
    assert run(["figure", "4b", "--out", "first"], tmp_path) == 0
    assert run(["figure", "4b", "--out", "second"], tmp_path) == 0
    first = (tmp_path / "first.csv").read_bytes()
    second = (tmp_path / "second.csv").read_bytes()
    assert first == second


def test_figure_family_emits_one_file_per_member(tmp_path):
    assert run(["figure", "9b"], tmp_path) == 0
    for wk in (10, 8, 5):
        assert (tmp_path / f"fig9b_omega_k0-{wk}.csv").exists()


def test_param_override_applies_to_figure(tmp_path):
    assert run(["figure", "4a", "--param", "ep0=2.5", "--out", "ov"], tmp_path) == 0
    meta, _ = read_csv(tmp_path / "ov.csv")
    assert meta["ep0"] == "2.5"


def test_threads_env_does_not_change_output(tmp_path, monkeypatch):
    assert run(["figure", "4b", "--out", "serial"], tmp_path) == 0
    monkeypatch.setenv("QDR_THREADS", "4")
    assert run(["figure", "4b", "--out", "threaded"], tmp_path) == 0
    assert (tmp_path / "serial.csv").read_bytes() == \
        (tmp_path / "threaded.csv").read_bytes()


def test_oracle_check_failing_tolerance_is_numerical_error(tmp_path, capsys):
    code = run(["oracle-check", "--preset", "4b", "--tolerance", "1e-12"],
               tmp_path)
    capsys.readouterr()
    assert code == 2


def test_oracle_check_can_dump_trajectory(tmp_path, capsys):
    code = run(["oracle-check", "--preset", "4b", "--t-end", "150",
                "--dump-trajectory", "traj.csv"], tmp_path)
    capsys.readouterr()
    assert code == 0
    head = (tmp_path / "traj.csv").read_text().splitlines()[0]
    assert head == "t,w,re_sigma,im_sigma,re_a,im_a,q,qdot"
