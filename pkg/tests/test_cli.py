import io
import json

import pytest

from advisorgame import ConfigError, InvalidParameterError, VariancePrior, from_variances
from advisorgame.cli import run_cli
from advisorgame.config import parse_config

CANONICAL = {"p": 0.5, "rE": 1, "rP": 1, "mu0": 0, "r": 1, "sP": 0}


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_cli(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def config_file(tmp_path):
    def write(doc):
        path = tmp_path / "config.json"
        path.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
        return str(path)

    return write


def parse_text(out):
    return dict(line.split(" = ") for line in out.splitlines())


class TestParseConfig:
    def test_minimal_ratio_document(self):
        cfg = parse_config(b'{"rE": 2, "rP": 0.5}')
        assert (cfg.rE, cfg.rP) == (2.0, 0.5)
        assert (cfg.mu0, cfg.p, cfg.r, cfg.sP) == (0.0, 0.5, 1.0, 0.0)
        assert cfg.mc == {"n": 1_000_000, "seed": 0}

    def test_ambiguous_parameterization(self):
        with pytest.raises(ConfigError, match="rE.*sigmaE_sq"):
            parse_config(b'{"rE": 1, "sigmaE_sq": 1}')

    def test_variance_document(self):
        cfg = parse_config(b'{"sigma0_sq": 4, "sigmaE_sq": 2, "sigmaP_sq": 1, "mu0": 0.5}')
        expected = from_variances(VariancePrior(4.0, 2.0, 1.0), 0.5)
        assert cfg.beliefs() == expected

    def test_incomplete_variances(self):
        with pytest.raises(ConfigError, match="sigmaP_sq"):
            parse_config(b'{"sigma0_sq": 4, "sigmaE_sq": 2}')

    def test_bad_variance_is_domain_error(self):
        with pytest.raises(InvalidParameterError):
            parse_config(b'{"sigma0_sq": 4, "sigmaE_sq": 0, "sigmaP_sq": 1}')

    def test_malformed_reports_position(self):
        with pytest.raises(ConfigError, match=r"line 2, column \d+"):
            parse_config(b'{"rE": 1,\n "rP": }')

    @pytest.mark.parametrize(
        "doc, key",
        [
            ('{"rE": "x"}', "rE"),
            ('{"p": true}', "p"),
            ('{"r": NaN}', "r"),
            ('{"bogus": 1}', "bogus"),
            ('{"mc": {"n": 1.5}}', "mc.n"),
            ('{"sweep": {"param": 3}}', "sweep.param"),
            ('{"trust": {"colour": 1}}', "trust.colour"),
        ],
    )
    def test_diagnostic_names_key(self, doc, key):
        with pytest.raises(ConfigError, match=key.replace(".", r"\.")):
            parse_config(doc)

    def test_blocks(self):
        cfg = parse_config(
            '{"trust": {"rE_high": 3, "cost": 0.1},'
            ' "sweep": {"param": "p", "from": 0, "to": 1, "steps": 11},'
            ' "mc": {"seed": 7}}'
        )
        assert cfg.trust_problem().rE_high == 3.0
        assert cfg.sweep_spec().steps == 11
        assert cfg.mc == {"n": 1_000_000, "seed": 7}

    def test_domain_checks_deferred(self):
        cfg = parse_config('{"p": 2}')
        with pytest.raises(InvalidParameterError):
            cfg.scenario()


class TestCommands:
    def test_optimal_canonical(self, config_file):
        code, out, err = run(["optimal", "--config", config_file(CANONICAL)])
        assert code == 0 and err == ""
        fields = {k: float(v) for k, v in parse_text(out).items()}
        assert fields["sE_star"] == pytest.approx(30 / 13, rel=1e-15)
        assert fields["delta"] == pytest.approx(4 / 13, rel=1e-15)
        assert fields["loss"] == pytest.approx(1 / 26, rel=1e-15)

    def test_naive(self, config_file):
        code, out, _ = run(["naive", "--config", config_file({"r": -2.25})])
        assert code == 0 and parse_text(out) == {"sE_star": "-2.25"}

    def test_decide(self, config_file):
        path = config_file(CANONICAL)
        assert parse_text(run(["decide", "--config", path, "--sE", "2"])[1]) == {"decision": "1"}
        code, out, _ = run(["decide", "--config", path, "--with-ai", "--sP", "2", "--sE", "1"])
        assert parse_text(out) == {"decision": "1"}

    def test_flags_override_config(self, config_file):
        code, out, _ = run(["naive", "--config", config_file({"r": 1}), "--r", "4"])
        assert parse_text(out)["sE_star"] == "4"

    def test_trust(self, config_file):
        doc = dict(CANONICAL, sP=1, p=0, trust={"rE_high": 3, "cost": 0.2})
        code, out, _ = run(["trust", "--config", config_file(doc), "--json"])
        fields = json.loads(out)
        assert code == 0
        assert fields["threshold"] == pytest.approx(0.1875)
        assert fields["invest"] is False
        assert fields["alpha"] == pytest.approx(1.62380, abs=5e-6)
        assert fields["decreasing_in_p"] is True

    def test_trust_requires_upgrade(self, config_file):
        code, out, err = run(["trust", "--config", config_file(CANONICAL)])
        assert code == 1 and out == "" and "rE_high" in err

    def test_simulate(self, config_file):
        path = config_file(dict(CANONICAL, mc={"n": 100_000, "seed": 3}))
        code, out, _ = run(["simulate", "--config", path, "--sE", str(30 / 13), "--json"])
        fields = json.loads(out)
        assert code == 0 and fields["n"] == 100_000 and fields["seed"] == 3
        assert abs(fields["mean"] - 1 / 26) <= 3 * fields["std_error"]

    def test_sweep_files(self, config_file, tmp_path):
        path = config_file(dict(CANONICAL, sweep={"param": "p", "from": 0, "to": 1, "steps": 101}))
        out_csv, out_svg = tmp_path / "s.csv", tmp_path / "s.svg"
        code, out, _ = run(["sweep", "--config", path, "--out", str(out_csv), "--svg", str(out_svg)])
        assert code == 0
        assert float(parse_text(out)["argmax"]) == pytest.approx(0.6)
        assert out_csv.read_bytes().count(b"\n") > 101
        assert out_svg.read_bytes().startswith(b"<svg")

    def test_sweep_flags(self, tmp_path):
        out_csv = tmp_path / "d.csv"
        code, out, _ = run(
            ["sweep", "--param", "t", "--quantity", "delta", "--from", "0.01", "--to", "5",
             "--steps", "1000", "--p", "0.75", "--out", str(out_csv)]
        )
        assert code == 0
        assert abs(float(parse_text(out)["argmax"]) - 2.0) < 5e-3

    def test_verify_small(self):
        code, out, _ = run(["verify", "--trials", "50", "--n", "10000", "--json"])
        fields = json.loads(out)
        assert code == 0 and fields["passed"] is True
        assert fields["max_sE_deviation"] <= 1e-8

    def test_verify_failure_exit_code(self, monkeypatch):
        import advisorgame.oracle as oracle

        monkeypatch.setattr(oracle, "oracle_minimize", lambda s, tol=1e-10: 1e6)
        code, out, _ = run(["verify", "--trials", "5", "--n", "1000"])
        assert code == 3
        assert parse_text(out)["passed"] == "false"


class TestExitCodes:
    def test_unknown_subcommand(self):
        code, out, err = run(["frobnicate"])
        assert code == 2 and out == "" and "usage" in err

    def test_unknown_flag(self):
        code, _, _ = run(["optimal", "--colour", "red"])
        assert code == 2

    def test_missing_required_flag(self):
        code, _, _ = run(["decide"])
        assert code == 2

    def test_domain_error(self):
        code, out, err = run(["optimal", "--p", "1.5"])
        assert code == 1 and out == "" and err.startswith("error:")

    def test_missing_config_file(self, tmp_path):
        code, out, _ = run(["optimal", "--config", str(tmp_path / "nope.json")])
        assert code == 1 and out == ""

    def test_malformed_config(self, config_file):
        code, out, err = run(["optimal", "--config", config_file('{"rE": ')])
        assert code == 1 and out == "" and "line 1" in err

    def test_sweep_needs_output(self):
        code, _, _ = run(["sweep"])
        assert code == 2

    def test_quiet_on_success_unless_verbose(self):
        code, _, err = run(["verify", "--trials", "200", "--n", "1000"])
        assert code == 0 and err == ""
        code, _, err = run(["verify", "--trials", "200", "--n", "1000", "--verbose"])
        assert "200/200" in err


class TestOutputContract:
    def test_json_round_trips_printed_values(self, config_file):
        path = config_file(CANONICAL)
        text = parse_text(run(["optimal", "--config", path])[1])
        doc = json.loads(run(["optimal", "--config", path, "--json"])[1])
        assert set(text) == set(doc)
        for key, value in doc.items():
            assert float(text[key]) == value

    def test_deterministic_stdout(self, config_file):
        path = config_file(dict(CANONICAL, mc={"n": 50_000, "seed": 11}))
        first = run(["verify", "--config", path, "--trials", "30"])
        second = run(["verify", "--config", path, "--trials", "30"])
        assert first == second
