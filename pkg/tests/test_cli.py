import json

import pytest

from ddlab.cli import main


@pytest.fixture()
def dd1_file(tmp_path):
    path = tmp_path / "dd1.json"
    path.write_text(json.dumps({"base_vars": [], "d": 1, "e": 2, "P": "Z^2 - 1", "Q": "Y^2 + Z"}))
    return str(path)


@pytest.fixture()
def dd2_file(tmp_path):
    path = tmp_path / "dd2.json"
    path.write_text(json.dumps({"base_vars": [], "d": 1, "e": 1, "P": "Z^2 - 1", "Q": "Y^2 + Z"}))
    return str(path)


@pytest.fixture()
def s1_file(tmp_path):
    path = tmp_path / "s1.json"
    path.write_text(json.dumps({"base_vars": [], "d": 1, "e": 1, "P": "Z^2", "Q": "2*Y"}))
    return str(path)


class TestBasicCommands:
    def test_validate_pass(self, dd1_file, capsys):
        assert main(["validate", dd1_file]) == 0
        out = capsys.readouterr().out
        assert "PASS" in out

    def test_validate_fail_exit_one(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"base_vars": [], "d": 1, "e": 1, "P": "X", "Q": "Y"}))
        assert main(["validate", str(path)]) == 1

    def test_invariants(self, dd1_file, capsys):
        assert main(["invariants", dd1_file]) == 0
        out = capsys.readouterr().out
        assert "(d,e,r,s) = (1, 2, 2, 2)" in out

    def test_omega3(self, dd1_file, capsys):
        assert main(["omega3", dd1_file]) == 0

    def test_lnd(self, dd1_file, capsys):
        assert main(["lnd", dd1_file]) == 0
        out = capsys.readouterr().out
        assert "well defined: True" in out
        assert "nilpotency index of T: 4" in out

    def test_exp(self, dd1_file, capsys):
        assert main(["exp", dd1_file]) == 0
        out = capsys.readouterr().out
        assert "axioms: PASS" in out

    def test_fiber(self, dd1_file, capsys):
        assert main(["fiber", dd1_file]) == 0
        out = capsys.readouterr().out
        assert "Z^2 - 1" in out

    def test_file_not_found_exit_two(self, capsys):
        assert main(["validate", "/nonexistent/file.json"]) == 2

    def test_parse_error_exit_two(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text(json.dumps({"base_vars": [], "d": 1, "e": 1, "P": "Z +* 1", "Q": "Y"}))
        assert main(["validate", str(path)]) == 2


class TestMember:
    def test_member(self, dd1_file, capsys):
        code = main(["member", dd1_file, "--element", '{"-1": "Z^2 - 1"}'])
        assert code == 0
        out = capsys.readouterr().out
        assert "witness Y" in out

    def test_non_member(self, dd1_file, capsys):
        code = main(["member", dd1_file, "--element", '{"-1": "Z - 1"}'])
        assert code == 1
        out = capsys.readouterr().out
        assert "not a member" in out

    def test_with_adjoined(self, dd1_file, capsys):
        code = main(["member", dd1_file, "--adjoin", "W1",
                     "--element", '{"1": "W1", "0": "Z"}'])
        assert code == 0

    def test_missing_element_flag(self, dd1_file):
        assert main(["member", dd1_file]) == 2


class TestIsoCommands:
    def test_transport_and_verify(self, dd1_file, tmp_path, capsys):
        data = tmp_path / "data.json"
        data.write_text(json.dumps({
            "lambda1": "1", "mu1": "1", "beta1_tilde": "1", "g2_prime": "1",
            "delta1": "0", "alpha1_tilde": "1", "g1_prime": "0",
        }))
        out_file = tmp_path / "transport.json"
        code = main(["iso-transport", dd1_file, "--data", str(data), "--out", str(out_file)])
        assert code == 0
        report = json.loads(out_file.read_text())
        assert report["target"]["P"] == "Z^2 + X - 1"

        target = tmp_path / "target.json"
        target.write_text(json.dumps(report["target"]))
        fwd = tmp_path / "fwd.json"
        fwd.write_text(json.dumps({"images": report["forward"]}))
        bwd = tmp_path / "bwd.json"
        bwd.write_text(json.dumps({"images": report["backward"]}))
        code = main(["iso-verify", dd1_file, "--target", str(target),
                     "--forward", str(fwd), "--backward", str(bwd)])
        assert code == 0
        out = capsys.readouterr().out
        assert "mutually inverse pair: PASS" in out

    def test_verify_bad_hom(self, dd1_file, tmp_path, capsys):
        fwd = tmp_path / "fwd.json"
        fwd.write_text(json.dumps({"images": {"X": "0", "Y": "Y", "Z": "Z", "T": "T"}}))
        code = main(["iso-verify", dd1_file, "--target", dd1_file, "--forward", str(fwd)])
        assert code == 1

    def test_distinguish(self, dd1_file, dd2_file, capsys):
        code = main(["distinguish", dd1_file, "--other", dd2_file])
        assert code == 0
        out = capsys.readouterr().out
        assert "not R-isomorphic" in out

    def test_distinguish_inconclusive(self, dd1_file, capsys):
        assert main(["distinguish", dd1_file, "--other", dd1_file]) == 1


class TestCancelCert:
    def test_dd1_certificate(self, dd1_file, tmp_path, capsys):
        out_file = tmp_path / "cert.json"
        code = main(["cancel-cert", dd1_file, "--out", str(out_file)])
        assert code == 0
        out = capsys.readouterr().out
        assert "verdict: non-cancellation pair certified" in out
        assert "f = X^2*W1 + Z" in out
        cert = json.loads(out_file.read_text())
        assert cert["schema"] == "dd-lab/1"
        assert cert["verdict"] == "non-cancellation pair certified"

    def test_rejected_e_one(self, dd2_file, capsys):
        assert main(["cancel-cert", dd2_file]) == 1


class TestDanielewskiReduce:
    def test_reduce(self, s1_file, capsys):
        assert main(["danielewski-reduce", s1_file]) == 0
        out = capsys.readouterr().out
        assert "X^2*T - (Z^2)" in out

    def test_s_two_rejected(self, dd1_file):
        assert main(["danielewski-reduce", dd1_file]) == 2


class TestOutputModes:
    def test_json_flag(self, dd1_file, capsys):
        assert main(["invariants", dd1_file, "--json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["schema"] == "dd-lab/1"
        assert payload["tuple"] == [1, 2, 2, 2]

    def test_multiple_inputs_and_jobs(self, dd1_file, dd2_file, capsys):
        code = main(["invariants", dd1_file, dd2_file, "--jobs", "2"])
        assert code == 0
        out = capsys.readouterr().out
        assert "(1, 2, 2, 2)" in out
        assert "(1, 1, 2, 2)" in out

    def test_out_with_multiple_inputs(self, dd1_file, dd2_file, tmp_path, capsys):
        out_file = tmp_path / "multi.json"
        assert main(["invariants", dd1_file, dd2_file, "--out", str(out_file)]) == 0
        report = json.loads(out_file.read_text())
        assert isinstance(report, list) and len(report) == 2
