import csv

import pytest

from thermoporo_splitting import __version__
from thermoporo_splitting import __main__ as cli
from thermoporo_splitting.__main__ import build_parser, create_config_from_args, main


def read_rows(path):
    with open(path, encoding="utf-8", newline="") as handle:
        return list(csv.DictReader(handle))


def test_version(capsys):
    assert main(["--version"]) == 0
    assert __version__ in capsys.readouterr().out


def test_list_schemes(capsys):
    assert main(["--list-schemes"]) == 0
    out = capsys.readouterr().out
    assert "semi_explicit_full" in out and "f_h_m_iterative" in out


def test_missing_command():
    assert main([]) == 2


def test_check_conditions(tmp_path, capsys):
    assert main(["check-conditions", "--preset", "geothermal", "--n", "4", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "ω_HD = 0.946957" in out
    rows = read_rows(tmp_path / "conditions.csv")
    assert [row["mode"] for row in rows] == ["physical", "spectral"]
    assert rows[0]["hd_guaranteed"] == "true"
    assert "[spectral]" in out


def test_check_conditions_toy_reports_both_modes(tmp_path):
    assert main(["check-conditions", "--preset", "toy", "--out", str(tmp_path)]) == 0
    rows = read_rows(tmp_path / "conditions.csv")
    assert [row["mode"] for row in rows] == ["physical", "spectral"]
    assert float(rows[1]["omega_hd"]) == pytest.approx(0.48)


def test_assemble(tmp_path):
    assert main(["assemble", "--preset", "geothermal", "--n", "2", "--out", str(tmp_path)]) == 0
    header = (tmp_path / "matrices" / "B.txt").read_text(encoding="utf-8").splitlines()[0]
    assert header.startswith("% 1 1 ")


def test_run_writes_trajectory(tmp_path):
    args = ["run", "--preset", "toy", "--scheme", "implicit_euler,sigma_splitting", "--tau", "0.01"]
    assert main(args + ["--sigma", "0.9", "--out", str(tmp_path)]) == 0
    assert len(read_rows(tmp_path / "run_implicit_euler.csv")) == 11
    assert len(read_rows(tmp_path / "run_sigma_splitting.csv")) == 11


@pytest.mark.parametrize("strict, code", [(False, 0), (True, 3)])
def test_run_divergence_exit_code(tmp_path, strict, code):
    args = [
        "run", "--preset", "toy", "--alpha", "0.62", "--ctilde0", "0.656",
        "--scheme", "semi_explicit_full", "--tau", "0.00078125", "--out", str(tmp_path),
    ]
    assert main(args + (["--strict"] if strict else [])) == code


@pytest.mark.parametrize(
    "args",
    [
        ["run", "--scheme", "bogus"],
        ["run", "--preset", "geothermal", "--n", "2", "--tau", "0.3"],
        ["run", "--preset", "toy", "--alpha", "0.9"],
        ["run", "--scheme", "hf_m_iterative", "--K", "0"],
        ["sharpness", "--grid", "8by8"],
        ["convergence", "--preset", "toy", "--tau", "0.0125:halve:2", "--reference-tau", "0.05"],
    ],
)
def test_config_errors(tmp_path, args):
    assert main(args + ["--out", str(tmp_path)]) == 2


def test_unexpected_failure_exits_with_error(tmp_path, monkeypatch, capsys):
    def broken(*args, **kwargs):
        raise RuntimeError("boom")

    monkeypatch.setattr(cli, "cmd_run", broken)
    assert main(["run", "--preset", "toy", "--out", str(tmp_path)]) == 1
    assert "RuntimeError: boom" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert main(["run", "--config", str(tmp_path / "missing.yaml"), "--out", str(tmp_path)]) == 1


def test_config_file_with_overrides(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text(
        "problem: {preset: toy, alpha: 0.3}\nschemes: [semi_explicit_half]\nexperiment: {tau: 0.05}\n",
        encoding="utf-8",
    )
    args = build_parser().parse_args(["run", "--config", str(path), "--tau", "0.02", "--ctilde0", "3.0"])
    config = create_config_from_args(args)
    assert config.problem.alpha == 0.3
    assert config.problem.c0_tilde == 3.0
    assert config.experiment.taus == [0.02]
    assert config.schemes[0].scheme.value == "semi_explicit_half"


def test_knobs_only_reach_schemes_that_use_them():
    args = build_parser().parse_args(
        ["run", "--scheme", "implicit_euler,hf_m_iterative", "--K", "4", "--Lp", "0.5"]
    )
    config = create_config_from_args(args)
    assert config.schemes[0].K == 1
    assert (config.schemes[1].K, config.schemes[1].L_p) == (4, 0.5)


def test_sharpness_grid(tmp_path, capsys):
    assert main(["sharpness", "--grid", "2x2", "--scheme", "semi_explicit_full", "--out", str(tmp_path)]) == 0
    rows = read_rows(tmp_path / "sharpness_semi_explicit_full.csv")
    assert len(rows) == 4
    assert list(rows[0]) == ["alpha", "ctilde0", "omega", "e_T", "class"]
    classes = [row["class"] for row in rows]
    assert set(classes) <= {"guaranteed", "converged", "diverged"}
    # (α, c̃₀) = (0.48, 1.75) 上全解耦格式放大约 1.6 倍每步
    assert classes[2] == "diverged"
    assert f"diverged: {classes.count('diverged')}" in capsys.readouterr().out


def test_convergence_outputs_are_deterministic(tmp_path):
    args = [
        "convergence", "--preset", "toy", "--schemes", "implicit_euler,semi_explicit_half",
        "--tau", "0.0125:halve:3",
    ]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b"), "--workers", "2"]) == 0

    rows = read_rows(tmp_path / "a" / "convergence.csv")
    assert len(rows) == 6
    assert [row["scheme"] for row in rows] == ["implicit_euler"] * 3 + ["semi_explicit_half"] * 3
    assert len(read_rows(tmp_path / "a" / "convergence_slopes.csv")) == 2
    assert (tmp_path / "a" / "convergence.svg").exists()
    for name in ("convergence.csv", "convergence_slopes.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


@pytest.mark.slow
def test_sharpness_default_size(tmp_path):
    assert main(["sharpness", "--grid", "8x8", "--out", str(tmp_path), "--workers", "4"]) == 0
    assert len(read_rows(tmp_path / "sharpness_semi_explicit_half.csv")) == 64
