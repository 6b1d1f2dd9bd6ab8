import numpy as np
import pytest

from qdisttest.cli import main
from qdisttest.harness import (
    fit_loglog,
    make_instance,
    make_instance_pair,
    render_csv,
    run_scaling,
    spawn_rngs,
)


# ---------------------------------------------------------------------------
# harness plumbing


def test_render_csv_layout():
    text = render_csv(
        "demo",
        ["trial", "value"],
        [{"trial": 0, "value": 0.5}, {"trial": 1, "value": 1.0}],
        {"seed": 7, "n": 10},
    )
    lines = text.splitlines()
    assert lines[0] == "# qdisttest-csv schema=1 command=demo n=10 seed=7"
    assert lines[1] == "trial,value"
    assert lines[2] == "0,0.5"
    assert text.endswith("\n")


def test_render_csv_numpy_scalars():
    text = render_csv("demo", ["v"], [{"v": np.float64(0.25)}, {"v": np.int64(3)}], {})
    assert text.splitlines()[2:] == ["0.25", "3"]


def test_spawn_rngs_deterministic_and_distinct():
    a = spawn_rngs(5, 3)
    b = spawn_rngs(5, 3)
    assert [r.random() for r in a] == [r.random() for r in b]
    vals = [r.random() for r in spawn_rngs(5, 3)]
    assert len(set(vals)) == 3


def test_fit_loglog_recovers_exponent():
    ns = [10**3, 10**4, 10**5, 10**6]
    qs = [7.0 * n**0.5 for n in ns]
    slope, stderr = fit_loglog(ns, qs)
    assert slope == pytest.approx(0.5, abs=1e-9)
    assert stderr == pytest.approx(0.0, abs=1e-9)


def test_fit_loglog_preconditions():
    with pytest.raises(ValueError, match="4 points"):
        fit_loglog([10, 100, 1000], [1, 2, 3])
    with pytest.raises(ValueError, match="decades"):
        fit_loglog([10, 20, 40, 80], [1, 2, 3, 4])


def test_make_instance_pair_distances():
    rng = np.random.default_rng(0)
    _, _, d0 = make_instance_pair("identical", 100, None, rng)
    _, _, d2 = make_instance_pair("disjoint", 100, None, rng)
    _, _, dm = make_instance_pair("overlapping", 100, 0.5, rng)
    assert (d0, d2, dm) == (0.0, 2.0, 1.5)
    with pytest.raises(ValueError):
        make_instance_pair("nope", 100, None, rng)
    with pytest.raises(ValueError):
        make_instance("nope", 100, None, rng)


def test_run_scaling_small_quantum():
    result = run_scaling(
        "uniformity", [10**3, 10**4, 10**5, 10**6], 0.5, trials=20, seed=1
    )
    assert len(result.rows) == 4
    assert 0.2 <= result.slope <= 0.45
    assert all(r.error_rate <= 1 / 3 for r in result.rows)


def test_run_scaling_statdiff_slope():
    result = run_scaling("statdiff", [10**3, 10**4, 10**5, 10**6], 0.5, trials=20, seed=9)
    assert 0.40 <= result.slope <= 0.60
    assert all(r.error_rate <= 1 / 3 for r in result.rows)


def test_run_scaling_excludes_saturated_smallest_point():
    # a one-value sweep makes every chosen constant "saturated"; the smallest
    # size is then dropped from the fit (but still reported)
    ns = [10**3, 10**4, 10**5, 10**6, 4 * 10**6]
    result = run_scaling("uniformity", ns, 0.5, trials=15, seed=3, sweep=(300.0,))
    assert all(r.saturated for r in result.rows)
    smallest = next(r for r in result.rows if r.n == 10**3)
    assert not smallest.included_in_fit
    assert sum(r.included_in_fit for r in result.rows) == 4
    assert 0.2 <= result.slope <= 0.45


def test_run_scaling_calibration_failure():
    with pytest.raises(RuntimeError, match="calibration failed"):
        run_scaling(
            "uniformity",
            [10**3, 10**4, 10**5, 10**6],
            0.5,
            trials=20,
            seed=2,
            target_error=0.0,
            sweep=(1e-6,),
        )


def test_run_scaling_unknown_tester():
    with pytest.raises(ValueError):
        run_scaling("nope", [1000, 10**4, 10**5, 10**6], 0.5, trials=5, seed=0)


# ---------------------------------------------------------------------------
# CLI


def run_cli(args):
    return main(args)


def test_cli_determinism_across_subcommands(tmp_path, capsys):
    commands = {
        "estprob": ["estprob", "--pa", "0.25", "--trials", "50"],
        "estdist": ["estdist", "--n", "200", "--pair", "disjoint", "--trials", "3"],
        "uniformity": ["uniformity", "--n", "1000", "--trials", "10"],
        "orthogonality": ["orthogonality", "--n", "216", "--pair", "disjoint", "--trials", "10"],
        "b-uni": ["baseline-uniformity", "--n", "1000", "--trials", "10"],
        "b-sd": ["baseline-statdiff", "--n", "200", "--pair", "overlapping", "--trials", "5"],
        "b-orth": ["baseline-orthogonality", "--n", "400", "--pair", "identical", "--trials", "10"],
        "lb-collision": ["lb-collision", "--n", "64", "--trials", "10"],
        "lb-fingerprint": ["lb-fingerprint", "--n", "64", "--trials", "300"],
        "corollary": ["corollary", "--n", "1000000", "--a", "5", "--delta", "1e-4"],
    }
    for name, argv in commands.items():
        out1 = tmp_path / f"{name}_1.out"
        out2 = tmp_path / f"{name}_2.out"
        extra = [] if name == "corollary" else ["--seed", "9"]
        assert run_cli(argv + extra + ["--out", str(out1)]) == 0
        assert run_cli(argv + extra + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes(), name


def test_cli_uniformity_rate_column(tmp_path):
    out = tmp_path / "u.csv"
    assert run_cli(["uniformity", "--n", "10000", "--trials", "30", "--seed", "3",
                    "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[1].split(",")[3] == "acceptance_rate"
    final_rate = float(lines[-1].split(",")[3])
    assert final_rate >= 2 / 3


def test_cli_scaling_outputs_slope(tmp_path):
    out = tmp_path / "s.csv"
    assert run_cli([
        "scaling", "--tester", "uniformity", "--n-values", "1e3,1e4,1e5,1e6",
        "--trials", "10", "--seed", "4", "--out", str(out),
    ]) == 0
    head = out.read_text().splitlines()[0]
    assert "slope=" in head
    slope = float([tok for tok in head.split() if tok.startswith("slope=")][0][6:])
    assert 0.13 <= slope <= 0.53  # ten trials only; the acceptance suite tightens this


def test_cli_spec_file_and_override(tmp_path):
    spec = tmp_path / "run.spec"
    spec.write_text("n=1000\ntrials=5\nseed=11\n")
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    assert run_cli(["uniformity", "--spec", str(spec), "--out", str(out1)]) == 0
    assert run_cli(["uniformity", "--n", "1000", "--trials", "5", "--seed", "11",
                    "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_cli_spec_file_unknown_key(tmp_path):
    spec = tmp_path / "bad.spec"
    spec.write_text("bogus=1\n")
    with pytest.raises(SystemExit) as exc:
        run_cli(["uniformity", "--spec", str(spec)])
    assert exc.value.code == 2


def test_cli_config_error_codes(tmp_path):
    # unknown flag: argparse exits 2
    with pytest.raises(SystemExit) as exc:
        run_cli(["uniformity", "--bogus"])
    assert exc.value.code == 2
    # missing spec file: config error return
    assert run_cli(["uniformity", "--spec", str(tmp_path / "missing.spec")]) == 2
    # infeasible instance parameters: config error return
    assert run_cli(["uniformity", "--n", "999", "--instance", "biased"]) == 2


def test_cli_runtime_error_code():
    # paper-mode repetition count is not runnable: runtime failure, code 3
    assert run_cli(["uniformity", "--n", "1000", "--mode", "paper", "--trials", "1",
                    "--seed", "0"]) == 3


def test_cli_instance_file_fixture(tmp_path):
    # an instance saved to the plain-text format reproduces the same run
    inst = tmp_path / "inst.txt"
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    assert run_cli(["uniformity", "--n", "1000", "--instance", "biased",
                    "--trials", "5", "--seed", "3",
                    "--save-instance", str(inst), "--out", str(out1)]) == 0
    assert run_cli(["uniformity", "--n", "1000", "--instance-file", str(inst),
                    "--trials", "5", "--seed", "3", "--out", str(out2)]) == 0
    rows1 = out1.read_text().splitlines()[2:]
    rows2 = out2.read_text().splitlines()[2:]
    assert rows1 == rows2


def test_cli_estprob_coverage(tmp_path, capsys):
    out = tmp_path / "e.csv"
    assert run_cli(["estprob", "--pa", "0.1", "--delta", "0.02", "--omega", "0.1",
                    "--trials", "400", "--seed", "6", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    within = [int(l.split(",")[3]) for l in lines[2:]]
    assert sum(within) / len(within) >= 0.9
