import csv
import io
import json

import numpy as np

from chenhopf.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    return code, json.loads(out), err


# ------------------------------------------------------------ check

def test_check_defaults_are_admissible(capsys):
    code, payload, _ = run_json(capsys, "check")
    assert code == 0
    assert payload["report"]["overall"] is True
    assert payload["manifest"]["command"] == "check"


def test_check_rejects_flipped_b_sign(capsys):
    code, payload, _ = run_json(capsys, "check", "--b", "1")
    assert code == 1
    assert payload["report"]["b_condition_holds"] is False


def test_check_parse_error_exits_3(capsys):
    code, _, err = run(capsys, "check", "--a", "abc")
    assert code == 3


def test_check_human_output_is_not_json(capsys):
    code, out, _ = run(capsys, "check")
    assert code == 0
    assert "overall" in out and "{" not in out


# ------------------------------------------------------------ spectrum

def test_spectrum_dual_path_agreement(capsys):
    code, payload, _ = run_json(capsys, "spectrum")
    assert code == 0
    assert payload["max_deviation"] < 1e-8
    assert payload["closed_form"]["lambda1"]["re"] == 1.0      # r
    assert payload["closed_form"]["lambda2"]["re"] == 1.0      # -b with b = -1
    assert len(payload["char_poly_descending"]) == 5


def test_spectrum_independent_c(capsys):
    code, payload, _ = run_json(capsys, "spectrum", "--a", "2", "--b", "3",
                                "--c", "1", "--d", "1", "--r", "5")
    assert code == 0
    assert payload["closed_form"]["lambda1"]["re"] == 5.0
    assert payload["closed_form"]["lambda2"]["re"] == -3.0


# ------------------------------------------------------------ favg

def test_favg_both_methods_agree(capsys):
    code, payload, _ = run_json(capsys, "favg", "--point", "0,0,1,0", "--method", "both")
    assert code == 0
    closed = [payload["closed"][f"f{i}"] for i in (1, 2, 3, 4)]
    assert np.allclose(closed, [0.0, 0.0, 1.0, 0.0], atol=1e-12)
    assert payload["discrepancy"] < 1e-10


def test_favg_zero_point(capsys):
    code, payload, _ = run_json(capsys, "favg", "--point", "0,0,0,0")
    assert code == 0
    assert all(payload["closed"][f"f{i}"] == 0.0 for i in (1, 2, 3, 4))


def test_favg_bad_point_exits_3(capsys):
    code, _, err = run(capsys, "favg", "--point", "1,2,3")
    assert code == 3
    code, _, err = run(capsys, "favg", "--point", "a,b,c,d")
    assert code == 3


def test_favg_inadmissible_regime_exits_1(capsys):
    # hyperbolic parameters: a(a+d) > 0
    code, _, err = run(capsys, "favg", "--a", "1", "--d", "1", "--point", "0,0,1,0")
    assert code == 1


# ------------------------------------------------------------ zeros

def test_zeros_canonical_payload(capsys):
    code, payload, _ = run_json(capsys, "zeros")
    assert code == 0
    first = payload["closed_form"][0]
    assert np.allclose(first["point"], [-0.5, -1.0, -0.5, -0.5], atol=1e-12)
    assert abs(payload["det_closed_form"] - (-0.625)) < 1e-12
    assert payload["verdict"]["theorem_applicable"] is False
    for refined in payload["newton_refined"]:
        assert refined["residual"] < 1e-12
        assert refined["converged"] is True
    # mirrored components between the two zeros
    second = payload["closed_form"][1]
    assert np.allclose(np.asarray(first["point"])[[0, 1, 3]],
                       -np.asarray(second["point"])[[0, 1, 3]], atol=1e-12)


def test_zeros_inadmissible_exits_1(capsys):
    code, _, err = run(capsys, "zeros", "--b", "1")
    assert code == 1
    assert "not real" in err


# ------------------------------------------------------------ verify

def test_verify_unperturbed_limit_exits_0(capsys):
    code, payload, _ = run_json(capsys, "verify", "--epsilon", "0")
    assert code == 0
    states = [orbit["initial_state"] for orbit in payload["scaled"]]
    assert np.allclose(states[0], [-0.5, -1.0, -0.5, -0.5], atol=1e-9)
    assert np.allclose(states[1], [0.5, 1.0, -0.5, 0.5], atol=1e-9)
    for orbit in payload["scaled"]:
        assert orbit["residual"] < 1e-9
        assert orbit["recurrence_defect"] < 1e-9


def test_verify_no_certifiable_orbit_exits_2(capsys):
    # the averaged zeros continue into equilibria, not cycles, so the
    # phase-anchored shooter reports a numerical failure
    code, out, err = run(capsys, "verify", "--epsilon", "0.01")
    assert code == 2
    assert "numerical failure" in err


def test_verify_inadmissible_exits_1_before_integration(capsys):
    code, _, err = run(capsys, "verify", "--b", "1", "--epsilon", "0.01")
    assert code == 1


# ------------------------------------------------------------ sweep

def test_sweep_csv_schema_and_summary(capsys, tmp_path):
    out_path = tmp_path / "sweep.csv"
    code, payload, _ = run_json(capsys, "sweep", "--epsilons", "0.01,0.02",
                                "--out", str(out_path))
    assert code == 0
    rows = list(csv.reader(out_path.read_text().splitlines()))
    assert rows[0] == ["epsilon", "branch", "distance_to_p", "period_error",
                       "residual", "max_multiplier_modulus", "converged"]
    assert len(rows) == 5
    for row in rows[1:]:
        assert row[6] == "false"
        assert row[2] == row[3] == row[4] == row[5] == ""
    assert payload["slope_by_branch"] == {"1": None, "2": None}


def test_sweep_unwritable_path_exits_3(capsys):
    code, _, err = run(capsys, "sweep", "--epsilons", "0.01",
                       "--out", "/nonexistent-dir/sweep.csv")
    assert code == 3


def test_sweep_bad_grid_exits_3(capsys):
    code, _, err = run(capsys, "sweep", "--epsilons", "0.02,0.01")
    assert code == 3


# ------------------------------------------------------------ orbit

def test_orbit_csv_at_epsilon_zero(capsys):
    code, out, _ = run(capsys, "orbit", "--epsilon", "0", "--branch", "1",
                       "--samples", "50")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["t", "x", "y", "z", "w"]
    assert len(rows) == 51
    first = np.array([float(v) for v in rows[1][1:]])
    last = np.array([float(v) for v in rows[-1][1:]])
    assert np.max(np.abs(first - last)) < 1e-6
    # float cells round-trip exactly
    assert all(repr(float(cell)) == cell for cell in rows[1])


def test_orbit_original_frame_is_epsilon_times_scaled(capsys):
    code, scaled_out, _ = run(capsys, "orbit", "--epsilon", "0", "--samples", "10",
                              "--frame", "scaled")
    assert code == 0
    # at epsilon = 0 the original frame collapses to the origin; use the
    # frame identity on the scaled rows instead
    rows = list(csv.reader(io.StringIO(scaled_out)))[1:]
    assert len(rows) == 10


def test_orbit_invalid_branch_exits_3(capsys):
    code, _, err = run(capsys, "orbit", "--branch", "3")
    assert code == 3


def test_orbit_shoot_failure_exits_2(capsys):
    code, _, err = run(capsys, "orbit", "--epsilon", "0.01")
    assert code == 2


# ------------------------------------------------------------ selftest

def test_selftest_passes_quickly(capsys):
    code, payload, _ = run_json(capsys, "selftest")
    assert code == 0
    assert payload["pass"] is True
    assert all(check["pass"] for check in payload["checks"])


def test_selftest_seed_reproducibility(capsys):
    code1, payload1, _ = run_json(capsys, "selftest", "--seed", "42")
    code2, payload2, _ = run_json(capsys, "selftest", "--seed", "42")
    assert code1 == code2 == 0
    payload1["manifest"].pop("timestamp")
    payload2["manifest"].pop("timestamp")
    assert payload1 == payload2


def test_selftest_forced_failure_exits_2(capsys):
    code, _, err = run(capsys, "selftest", "--force-fail")
    assert code == 2
    assert "forced failure" in err


# ------------------------------------------------------------ reproducibility

def test_json_numeric_fields_reproduce_byte_identically(capsys):
    outputs = []
    for _ in range(2):
        code, out, _ = run(capsys, "zeros", "--json")
        assert code == 0
        doc = json.loads(out)
        doc["manifest"].pop("timestamp")
        outputs.append(json.dumps(doc, sort_keys=True))
    assert outputs[0] == outputs[1]


def test_every_json_payload_embeds_manifest(capsys):
    for argv in (["check"], ["spectrum"], ["favg", "--point", "1,0,0,0"],
                 ["zeros"], ["verify", "--epsilon", "0"], ["selftest"]):
        _, payload, _ = run_json(capsys, *argv)
        manifest = payload["manifest"]
        assert manifest["command"] == argv[0]
        assert manifest["version"]
        assert "parameters" in manifest
