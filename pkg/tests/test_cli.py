import re
from pathlib import Path

import pytest

from primedelta import cli, expsums, identities, moments, sieves, spacing, summatory, voronoi
from primedelta._backend import THREADS_ENV, resolve_threads

from smoke import SMOKE, run_smoke

SPEC_OPERATIONS = {
    "sieves": ["sieve_segment", "primes_in"],
    "summatory": ["divisor_summatory", "delta", "delta_stream"],
    "voronoi": ["delta1", "delta2", "voronoi_residual_stats"],
    "identities": ["heath_brown_rhs", "verify_heath_brown"],
    "spacing": ["t_value", "count_spacing_B", "proposition_bound", "count_quadruplets_N", "count_close_pairs",
                "pair_proximity_check", "T_sum"],
    "expsums": ["exp_sum", "exp_integral", "sum_to_integral_residual", "first_derivative_check",
                "second_derivative_ratio", "double_large_sieve_check", "type_sum_eval"],
    "moments": ["constant_C", "continuous_mean_square", "discrete_mean_square", "furuya_check",
                "shifted_delta_moment", "prime_moment_sweep"],
}
MODULES = {m.__name__.rsplit(".", 1)[1]: m for m in (sieves, summatory, voronoi, identities, spacing, expsums, moments)}


def run_cli(capsys, *argv):
    status = cli.main(list(argv))
    captured = capsys.readouterr()
    return status, captured.out, captured.err


def test_every_operation_reachable_from_exactly_one_subcommand():
    listed = [op for sub in cli.DISPATCH.values() for op in sub.operations]
    assert len(listed) == len(set(listed))
    expected = {f"{mod}.{op}" for mod, ops in SPEC_OPERATIONS.items() for op in ops}
    assert set(listed) == expected
    for name in listed:
        mod, op = name.split(".")
        assert callable(getattr(MODULES[mod], op))


def test_subcommand_set():
    assert set(cli.DISPATCH) == {
        "delta", "sweep", "mean-square", "discrete-mean-square", "furuya", "shifted-moment", "voronoi",
        "hb-verify", "spacing", "quadruplets", "close-pairs", "pair-proximity", "t-sum", "expsum-suite",
        "type-sum", "constants",
    }
    assert set(cli.VALIDATORS) == set(cli.DISPATCH)


def test_smoke_covers_every_subcommand():
    assert {argv[0] for argv in SMOKE} == set(cli.DISPATCH)


def test_delta_example(capsys):
    status, out, _ = run_cli(capsys, "delta", "--x", "100")
    assert status == 0
    header, row = out.splitlines()
    assert header == "x,D,delta"
    assert row.startswith("100,482,")


def test_hb_verify_example(capsys):
    status, out, _ = run_cli(capsys, "hb-verify", "--n-max", "1000", "--k", "2", "--z", "23")
    assert status == 0
    assert float(out.splitlines()[1].split(",")[-1]) < 1e-10


def test_sweep_header_only(capsys):
    status, out, _ = run_cli(capsys, "sweep", "--x-max", "1")
    assert status == 0
    assert out == "x,S,main,ratio,scaled_error,sup_huxley_ratio\n"


@pytest.mark.parametrize(
    "argv,code",
    [
        (["nonsense"], cli.EXIT_USAGE),
        (["delta"], cli.EXIT_USAGE),
        (["delta", "--x", "abc"], cli.EXIT_USAGE),
        (["sweep", "--x-max", "10", "--grid", "1,2"], cli.EXIT_USAGE),
        (["delta", "--x", "10", "--checkpoint", "x"], cli.EXIT_USAGE),
        (["delta", "--x", "0.5"], cli.EXIT_PRECONDITION),
        (["hb-verify", "--n-max", "1000", "--k", "2", "--z", "5"], cli.EXIT_PRECONDITION),
        (["type-sum", "--m1", "2", "--m2", "2", "--h", "2", "--l", "4"], cli.EXIT_PRECONDITION),
        (["sweep", "--grid", "10,5"], cli.EXIT_PRECONDITION),
        (["spacing", "--m1", "300", "--m2", "300", "--h", "300", "--tol", "0.1"], cli.EXIT_BUDGET),
        (["delta", "--x", "1e30"], cli.EXIT_BUDGET),
        (["constants", "--n-terms", "2000000000"], cli.EXIT_BUDGET),
        (["hb-verify", "--n-max", "1000", "--k", "2", "--tol", "0"], cli.EXIT_VIOLATION),
    ],
)
def test_exit_codes(capsys, argv, code):
    status, _, err = run_cli(capsys, *argv)
    assert status == code
    assert err


def test_checkpoint_exit_code(tmp_path, capsys):
    cp = tmp_path / "cp.csv"
    cp.write_text("x,S,main,ratio,scaled_error,sup_huxley_ratio\n10,zz,1,1,1,1\n")
    status, _, err = run_cli(capsys, "sweep", "--grid", "10,100", "--checkpoint", str(cp))
    assert status == cli.EXIT_CHECKPOINT and "checkpoint" in err


def test_validation_happens_before_compute(monkeypatch):
    called = []
    original = cli.DISPATCH["sweep"]
    monkeypatch.setitem(cli.DISPATCH, "sweep", cli.Subcommand(lambda c: called.append(c), original.operations, ""))
    assert cli.main(["sweep", "--grid", "100,50"]) == cli.EXIT_PRECONDITION
    assert called == []


def test_atomic_file_output(tmp_path):
    out = tmp_path / "delta.csv"
    assert cli.main(["delta", "--x", "10", "--out", str(out)]) == 0
    assert out.read_text().startswith("x,D,delta\n10,27,")
    assert [p.name for p in tmp_path.iterdir()] == ["delta.csv"]


def test_sweep_cli_checkpoint_resume(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(["sweep", "--grid", "100,1000,10000", "--checkpoint", str(a), "--out", str(tmp_path / "oa")]) == 0
    assert cli.main(["sweep", "--grid", "100,1000", "--checkpoint", str(b), "--out", str(tmp_path / "x")]) == 0
    assert cli.main(["sweep", "--grid", "100,1000,10000", "--checkpoint", str(b), "--out", str(tmp_path / "ob")]) == 0
    assert a.read_bytes() == b.read_bytes() == (tmp_path / "oa").read_bytes() == (tmp_path / "ob").read_bytes()


def test_thread_environment_override(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    assert resolve_threads(7) == 3
    assert cli.config_from_args(["delta", "--x", "5", "--threads", "2"]).threads == 3
    monkeypatch.delenv(THREADS_ENV)
    assert resolve_threads(7) == 7
    assert cli.config_from_args(["delta", "--x", "5", "--threads", "2"]).threads == 2


def test_quarter_flag(capsys):
    _, with_q, _ = run_cli(capsys, "delta", "--x", "1")
    _, without, _ = run_cli(capsys, "delta", "--x", "1", "--no-quarter")
    assert float(without.splitlines()[1].split(",")[2]) - float(with_q.splitlines()[1].split(",")[2]) == pytest.approx(0.25)


def test_seed_changes_random_suites(capsys):
    _, a, _ = run_cli(capsys, "pair-proximity", "--instances", "5", "--seed", "1")
    _, b, _ = run_cli(capsys, "pair-proximity", "--instances", "5", "--seed", "2")
    assert a != b
    assert cli.main(["pair-proximity", "--seed", str(2**64)]) == cli.EXIT_USAGE


def test_float_format():
    from primedelta.csvio import format_value

    assert format_value(0.1) == "0.1"
    assert format_value(1 / 3) == "0.3333333333333333"
    assert format_value(None) == ""
    assert len(re.sub(r"[^0-9]", "", format_value(2 / 3 * 1e-300).split("e")[0])) <= 17


def test_smoke_bytes_identical_across_threads(tmp_path):
    baseline = run_smoke(tmp_path, 1)
    for threads in (4, 8):
        assert run_smoke(tmp_path, threads) == baseline
