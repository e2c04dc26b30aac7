"""
Test Script for the carlitz command line: JSON results, exit codes, configuration and run logs
"""

import json
import os
import tempfile

from typer.testing import CliRunner

from carlitz_cli import app
from carlitz_verify import LOG_ALG_SCHEDULE, STARK_WITNESS

runner = CliRunner()


def _payload(result) -> dict:
    """First JSON object on stdout (rich tables and logs may precede it on the mixed stream)"""
    text = result.output
    start = 0 if text.startswith("{") else text.index("\n{") + 1
    return json.loads(text[start:text.index("\n}", start) + 2])


def test_bnumber_command():
    """Test 1: bnumber prints exact values"""
    print("\n" + "="*70)
    print("TEST 1: BNUMBER COMMAND")
    print("="*70)

    result = runner.invoke(app, ["bnumber", "--kind", "goss", "--m", "16", "--q", "3", "--mod", "T^3+2*T+2"])
    assert result.exit_code == 0
    data = _payload(result)
    assert data["value"] == "T^30+2*T^28+2*T^4+T^2+1"
    assert data["reduced_mod"] == "1"

    result = runner.invoke(app, ["bnumber", "--kind", "carlitz", "--m", "10", "--q", "3"])
    assert result.exit_code == 0
    assert _payload(result)["value"] == "(2*T^6+2*T^4+2*T^2+1)/(T^3+2*T)"
    print("✅ beta(16) and BC(10)")


def test_unit_command():
    """Test 2: unit prints u_C and its profile"""
    print("\n" + "="*70)
    print("TEST 2: UNIT COMMAND")
    print("="*70)

    result = runner.invoke(app, ["unit", "--q", "2", "--n", "1", "--prec", "20"])
    assert result.exit_code == 0
    data = _payload(result)
    assert data["u"] == "1"
    assert data["deg_theta"] == 0
    assert data["matches_closed_form"] is True
    assert data["effective_precision"] == 20
    print(f"✅ {data}")


def test_usage_errors():
    """Test 3: Bad arguments exit with 2, computational errors with 1"""
    print("\n" + "="*70)
    print("TEST 3: EXIT CODES")
    print("="*70)

    result = runner.invoke(app, ["bnumber", "--kind", "euler", "--m", "4", "--q", "3"])
    assert result.exit_code == 2

    result = runner.invoke(app, ["bnumber", "--kind", "goss", "--m", "4", "--q", "6"])
    assert result.exit_code == 1
    assert _payload(result)["error"] == "NotPrime"

    result = runner.invoke(app, ["lp", "--q", "2", "--P", "T^2+1", "--exponent", "1", "--M", "2"])
    assert result.exit_code == 1
    data = _payload(result)
    assert data["error"] == "NotIrreducible"
    assert "T^2+1" in data["detail"]

    result = runner.invoke(app, ["lp", "--q", "2", "--M", "2"])
    assert result.exit_code == 2

    result = runner.invoke(app, ["bfitting", "--q", "3", "--n", "2", "--strict"])
    assert result.exit_code == 1
    assert _payload(result)["error"] == "GradeMismatch"
    print("✅ 2 for usage, 1 for computation")


def test_lp_and_gauss_commands():
    """Test 4: lp compares both routes; gauss reports its identities"""
    print("\n" + "="*70)
    print("TEST 4: LP AND GAUSS COMMANDS")
    print("="*70)

    result = runner.invoke(app, ["lp", "--q", "2", "--P", "T^2+T+1", "--exponent", "1", "--M", "3"])
    assert result.exit_code == 0
    data = _payload(result)
    assert data["odd"] is True and data["derivative"] is True
    assert data["case"] == 3
    assert data["routes_agree"] is True

    result = runner.invoke(app, ["gauss", "--q", "2", "--P", "T^2+T+1"])
    assert result.exit_code == 0
    assert all(_payload(result)["identities"].values())
    print("✅ routes agree, identities hold")


def test_verify_command():
    """Test 5: verify exits 0 when the selected checks pass"""
    print("\n" + "="*70)
    print("TEST 5: VERIFY COMMAND")
    print("="*70)

    result = runner.invoke(app, ["verify", "--suite", "paper", "--only", "1,2"])
    assert result.exit_code == 0
    data = _payload(result)
    assert data["passed"] is True
    assert [c["id"] for c in data["checks"]] == ["1", "2"]

    first = _payload(runner.invoke(app, ["--seed", "7", "verify", "--suite", "properties", "--only", "P2,P7"]))
    second = _payload(runner.invoke(app, ["--seed", "7", "verify", "--suite", "properties", "--only", "P2,P7"]))
    assert first == second
    assert first["seed"] == 7 and first["passed"] is True

    assert runner.invoke(app, ["verify", "--suite", "nightly"]).exit_code == 2
    print("✅ reference checks 1-2 pass, properties are reproducible")


def test_configuration_and_run_log():
    """Test 6: Config files and JSONL run logs"""
    print("\n" + "="*70)
    print("TEST 6: CONFIGURATION & RUN LOG")
    print("="*70)

    with tempfile.TemporaryDirectory() as tmp:
        log_path = os.path.join(tmp, "runs.jsonl")
        result = runner.invoke(app, ["--run-log", log_path, "bnumber", "--kind", "goss", "--m", "2", "--q", "3"])
        assert result.exit_code == 0
        with open(log_path) as f:
            entries = [json.loads(line) for line in f]
        assert len(entries) == 1
        assert entries[0]["command"] == "bnumber" and entries[0]["success"] is True

        config = os.path.join(tmp, "carlitz.env")
        with open(config, "w") as f:
            f.write("GUARD=12\nCOLOUR=blue\n")
        result = runner.invoke(app, ["--config", config, "bnumber", "--kind", "goss", "--m", "2", "--q", "3"])
        assert result.exit_code == 2
        assert _payload(result)["error"] == "UsageError"

        with open(config, "w") as f:
            f.write("GUARD=4\n")
        result = runner.invoke(app, ["--config", config, "unit", "--q", "3", "--n", "1"])
        assert result.exit_code == 0
        assert _payload(result)["prec"] == 5
    print("✅ run log written, unknown key rejected, guard honoured")


def test_reference_check_scale():
    """Test 7: Reference checks run at full scale"""
    print("\n" + "="*70)
    print("TEST 7: REFERENCE CHECK SCALE")
    print("="*70)

    assert STARK_WITNESS >= 10
    assert dict(LOG_ALG_SCHEDULE) == {2: 8, 3: 8}
    print(f"✅ witness {STARK_WITNESS}, log-algebraic blocks through {dict(LOG_ALG_SCHEDULE)}")


def main():
    """Run all tests"""
    print("\n" + "="*70)
    print("CLI TEST SUITE")
    print("="*70)

    tests = [
        test_bnumber_command,
        test_unit_command,
        test_usage_errors,
        test_lp_and_gauss_commands,
        test_verify_command,
        test_configuration_and_run_log,
        test_reference_check_scale,
    ]
    results = []
    for test in tests:
        try:
            test()
            results.append(True)
        except AssertionError as e:
            print(f"❌ {test.__name__}: {e}")
            results.append(False)

    print(f"\nTotal: {sum(results)}/{len(results)} tests passed")


if __name__ == "__main__":
    main()
