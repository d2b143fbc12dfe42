import json

import pytest

from poisson_moments.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_bell_subcommand(capsys):
    payload = run_json(capsys, "bell", "--n", "4")
    assert payload["coefficients"] == [0, 1, 7, 6, 1]
    payload = run_json(capsys, "bell", "--n", "6", "--lambda", "1.0")
    assert payload["coefficients"] == [0, 1, 31, 90, 65, 15, 1]
    assert payload["value"] == pytest.approx(203.0)


def test_stirling_subcommand(capsys):
    payload = run_json(capsys, "stirling", "--n", "5")
    by_k = {row["k"]: row for row in payload["entries"]}
    assert by_k[3]["recurrence"] == 25
    assert all(row["match"] for row in payload["entries"])
    payload = run_json(capsys, "stirling", "--n", "4", "--k", "2")
    assert payload["entries"] == [
        {"k": 2, "recurrence": 7, "composition_sum": 7, "match": True}
    ]


def test_partitions_subcommand(capsys):
    payload = run_json(capsys, "partitions", "--n", "3")
    assert payload["count"] == 5
    assert payload["partitions"][0] == [[1, 2, 3]]
    code, _, err = run(capsys, "partitions", "--n", "13")
    assert code == 2
    assert "enumeration too large" in err


def test_moment_det_subcommand(capsys):
    payload = run_json(capsys, "moment-det", "--u", "linear", "--n", "2")
    assert payload["partition_form"] == pytest.approx(7 / 12, abs=1e-12)
    assert payload["composition_form"] == pytest.approx(7 / 12, abs=1e-12)
    code, _, err = run(capsys, "moment-det", "--u", "count", "--n", "2")
    assert code == 2 and "deterministic" in err


def test_moment_centered_subcommand(capsys):
    payload = run_json(
        capsys, "moment-centered", "--u", "indicator", "--n", "4", "--lambda", "1.0"
    )
    assert payload["value"] == pytest.approx(4.0, rel=1e-10)  # mass + 3 mass^2


def test_count_exact_subcommand(capsys):
    payload = run_json(capsys, "count-exact", "--n", "3")
    assert payload["coefficients"] == [0, 1, 31, 90, 65, 15, 1]
    assert payload["matches_bell"] is True


def test_centered_poisson_subcommand(capsys):
    payload = run_json(capsys, "centered-poisson", "--n", "4", "--lambda", "2.0")
    assert payload["coefficients"] == [0, 1, 3]
    assert payload["value"] == pytest.approx(2 + 3 * 4)


def test_chen_stein_subcommand(capsys):
    payload = run_json(
        capsys, "chen-stein", "--n", "2", "--f", "poly:0,1", "--lambda", "1.5"
    )
    assert payload["verdict"] == "pass"
    assert payload["params"]["coefficients_equal"] is True


def test_exp_identity_pass_and_fail(capsys):
    code, out, _ = run(capsys, "exp-identity", "--t", "0.3", "--f", "poly:0,1")
    assert code == 0
    assert json.loads(out)["verdict"] == "pass"
    # a forced one-term truncation cannot reproduce the tilted series
    code, out, _ = run(
        capsys, "exp-identity", "--t", "0.5", "--f", "poly:0,1", "--K", "1"
    )
    assert code == 1
    assert json.loads(out)["verdict"] == "fail"


def test_verify_random_subcommand(capsys):
    payload = run_json(
        capsys, "verify-random", "--u", "count", "--n", "2", "--lambda", "1",
        "--replicates", "4000", "--seed", "7",
    )
    assert payload["verdict"] == "pass"
    assert {t["label"] for t in payload["terms"]} == {
        "profile=[2]", "profile=[1, 1]"
    }


def test_verify_skorohod_subcommand(capsys):
    payload = run_json(
        capsys, "verify-skorohod", "--u", "count-times-f",
        "--A", "0,0.4", "--B", "0.6,1", "--n", "2",
        "--replicates", "4000", "--seed", "11",
    )
    assert payload["verdict"] == "pass"


def test_verify_compensated_subcommand(capsys):
    payload = run_json(
        capsys, "verify-compensated", "--u", "count", "--n", "2",
        "--replicates", "4000", "--seed", "13",
    )
    assert payload["verdict"] == "pass"


def test_verify_duality_subcommand(capsys):
    payload = run_json(
        capsys, "verify-duality", "--u", "indicator", "--F", "count-in",
        "--A", "0,0.5", "--B", "0,0.5",
        "--replicates", "4000", "--seed", "17",
    )
    assert payload["verdict"] == "pass"


def test_covariance_subcommand(capsys):
    payload = run_json(
        capsys, "covariance", "--n", "1", "--A", "0,0.5", "--F", "count-in",
        "--B", "0,0.5", "--replicates", "4000", "--seed", "19",
    )
    assert payload["verdict"] == "pass"


def test_csv_output(capsys):
    code, out, _ = run(
        capsys, "chen-stein", "--n", "1", "--f", "one", "--format", "csv"
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("identity,row,label")
    assert "summary" in lines[-1]


def test_out_file(tmp_path, capsys):
    target = tmp_path / "bell.json"
    code, out, _ = run(capsys, "bell", "--n", "4", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["coefficients"] == [0, 1, 7, 6, 1]


def test_byte_identical_output_for_fixed_seed(capsys):
    args = (
        "verify-random", "--u", "indicator", "--n", "2",
        "--replicates", "2000", "--seed", "23",
    )
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second


def test_config_file_space(tmp_path, capsys):
    config = tmp_path / "space.json"
    config.write_text(
        json.dumps({"kind": "interval", "interval": [0, 1], "density": "uniform",
                    "mass_scale": 2.0})
    )
    payload = run_json(
        capsys, "moment-det", "--u", "indicator", "--n", "1",
        "--config", str(config),
    )
    assert payload["value"] == pytest.approx(2.0, abs=1e-12)
    assert payload["total_mass"] == pytest.approx(2.0, abs=1e-12)


def test_usage_errors(capsys):
    assert main(["no-such-command"]) == 2
    assert main(["bell"]) == 2  # missing --n
    assert main(["verify-random", "--n", "2", "--A", "zebra"]) == 2
