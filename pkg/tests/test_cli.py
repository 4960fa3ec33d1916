import csv
import json

import pytest

from wigner_qkd.cli import build_parser, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


class TestAnalyze:
    def test_singlet(self, capsys):
        d = run_json(capsys, "analyze", "--attack", "none")
        assert d["w"] == pytest.approx(-0.125, abs=1e-12)
        assert d["w_tilde"] == pytest.approx(-0.125, abs=1e-12)
        assert d["qber"] == pytest.approx(0, abs=1e-12)
        assert d["schema_version"] == "1"
        assert set(d["terms"]) == {"p_a1_b1_pp", "p_a2_b2_pp", "p_a1_b2_pp", "p_a2_b1_mm"}

    def test_product(self, capsys):
        d = run_json(capsys, "analyze", "--attack", "product", "--phi-a", "0", "--phi-b", "0")
        assert d["w"] == pytest.approx(0.9375, abs=1e-12)
        assert d["w_tilde"] == pytest.approx(0.9375, abs=1e-12)

    def test_intercept_one(self, capsys):
        d = run_json(capsys, "analyze", "--attack", "intercept-one", "--eve-basis", "0")
        assert d["w"] == pytest.approx(0.0625, abs=1e-12)

    def test_intercept_both(self, capsys):
        d = run_json(capsys, "analyze", "--attack", "intercept-both", "--eve-basis", "22.5", "--eve-basis-b", "120")
        assert d["strategy"]["kind"] == "intercept-both"

    def test_settings_override(self, capsys):
        d = run_json(capsys, "analyze", "--a1", "-20", "--b2", "20")
        assert d["config"]["a1"] == -20.0
        assert d["w"] != pytest.approx(-0.125)


class TestFiles:
    def test_sweep(self, capsys, tmp_path):
        out = tmp_path / "fig1.csv"
        code, _, err = run(capsys, "sweep", "--step", "0.5", "-o", str(out))
        assert code == 0, err
        rows = list(csv.DictReader(out.open(newline="")))
        assert len(rows) == 360 * 360
        assert min(float(r["w"]) for r in rows) == pytest.approx(-0.2121, abs=5e-4)
        assert b"\r" not in out.read_bytes()

    def test_section(self, capsys, tmp_path):
        out = tmp_path / "fig3b.csv"
        code, _, err = run(capsys, "section", "--phi-b", "98", "-o", str(out))
        assert code == 0, err
        rows = list(csv.DictReader(out.open(newline="")))
        assert min(float(r["w_tilde"]) for r in rows) == pytest.approx(0.0466, abs=5e-4)

    def test_section_to_stdout(self, capsys):
        code, out, _ = run(capsys, "section", "--phi-b", "0", "--step", "45")
        assert code == 0
        assert out.splitlines()[0] == "phi_a_deg,phi_b_deg,w,w_tilde,band"
        assert len(out.splitlines()) == 5


class TestSimulate:
    def test_byte_identical(self, capsys, tmp_path):
        argv = ("simulate", "--attack", "none", "--pairs", "1000", "--seed", "7")
        assert run(capsys, *argv)[1] == run(capsys, *argv)[1]
        out = tmp_path / "run.json"
        blobs = []
        for _ in range(2):
            assert run(capsys, *argv, "-o", str(out))[0] == 0
            blobs.append(out.read_bytes())
        assert blobs[0] == blobs[1]

    def test_threads_do_not_change_results(self, capsys):
        a = run_json(capsys, "simulate", "--pairs", "200000", "--seed", "3", "--threads", "1")
        b = run_json(capsys, "simulate", "--pairs", "200000", "--seed", "3", "--threads", "4")
        assert a["session"] == b["session"]
        assert a["config"]["threads"] == 1 and b["config"]["threads"] == 4

    def test_attack_report(self, capsys):
        d = run_json(capsys, "simulate", "--attack", "product", "--phi-a", "113.27", "--phi-b", "66.73",
                     "--pairs", "1000000", "--seed", "11")
        assert d["session"]["verdict"] == {"w": "Secure", "w_tilde": "Compromised"}
        assert d["session"]["qber_estimate"] > 0.1

    def test_include_keys_and_log(self, capsys):
        d = run_json(capsys, "simulate", "--pairs", "200", "--seed", "1", "--include-keys", "--include-log")
        s = d["session"]
        assert len(s["pairs"]) == 200
        assert s["sifted_key_alice"] == s["sifted_key_bob"]

    def test_noise_flags(self, capsys):
        d = run_json(capsys, "simulate", "--pairs", "20000", "--efficiency", "0.5", "--seed", "2")
        assert d["session"]["coincidences"] < 20000 * 0.3


class TestOptimizeKeyrate:
    def test_optimize(self, capsys):
        d = run_json(capsys, "optimize", "--objective", "min_w_tilde", "--family", "product")
        assert d["report"]["best_value"] == pytest.approx(0.0443, abs=5e-4)
        assert len(d["report"]["best_params_deg"]) == 2

    def test_optimize_no_refine(self, capsys):
        d = run_json(capsys, "optimize", "--no-refine", "--grid-step", "1")
        assert d["report"]["refinement_iterations"] == 0

    def test_keyrate(self, capsys):
        d = run_json(capsys, "keyrate")
        k = d["key_rates"]
        assert (k["chsh_key_fraction"]["fraction"], k["chsh_discard_fraction"]["fraction"],
                k["wigner3_key_fraction_max"]["fraction"], k["wigner3_discard_fraction"]["fraction"]) == \
            ("2/9", "1/3", "1/3", "0")


class TestConfig:
    def test_config_file_and_flag_precedence(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"attack": "product", "phi-a": 0, "phi_b": 0, "seed": 5}))
        d = run_json(capsys, "analyze", "--config", str(cfg))
        assert d["w"] == pytest.approx(0.9375)
        assert d["config"]["seed"] == 5
        d = run_json(capsys, "analyze", "--config", str(cfg), "--phi-b", "90", "--seed", "6")
        assert d["config"]["phi_b"] == 90.0 and d["config"]["seed"] == 6
        assert d["config"]["attack"] == "product"

    def test_unknown_key(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text('{"attack": "none", "colour": 3}')
        code, _, err = run(capsys, "analyze", "--config", str(cfg))
        assert code == 2
        assert err.strip().count("\n") == 0
        assert "unknown key 'colour'" in err

    def test_parse_error_reports_line(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text('{\n  "attack": "none",\n  oops\n}')
        code, _, err = run(capsys, "analyze", "--config", str(cfg))
        assert code == 2
        assert f"{cfg}:3:" in err

    def test_wrong_type(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text('{"pairs": "many"}')
        code, _, err = run(capsys, "simulate", "--config", str(cfg))
        assert code == 2 and "validation" in err

    def test_missing_config(self, capsys, tmp_path):
        code, _, err = run(capsys, "keyrate", "--config", str(tmp_path / "nope.json"))
        assert code == 1 and err.startswith("wigner-qkd: error: io:")


class TestErrors:
    @pytest.mark.parametrize("argv", [
        ("analyze", "--attack", "cloning"),
        ("optimize", "--grid-step", "5"),
        ("simulate", "--pairs", "0"),
        ("simulate", "--pairs", "1"),
        ("simulate", "--seed", "-4"),
        ("bogus",),
        (),
    ])
    def test_single_line_errors(self, capsys, argv):
        code, out, err = run(capsys, *argv)
        assert code != 0
        assert out == ""
        lines = err.strip().splitlines()
        assert len(lines) == 1 and lines[0].startswith("wigner-qkd: error: ")

    def test_unwritable_output(self, capsys, tmp_path):
        code, _, err = run(capsys, "keyrate", "-o", str(tmp_path / "missing" / "x.json"))
        assert code == 1 and "io" in err


def test_help_lists_every_flag():
    parser = build_parser()
    sub = parser._subparsers._group_actions[0]
    assert set(sub.choices) == {"analyze", "sweep", "section", "simulate", "optimize", "keyrate"}
    for name, p in sub.choices.items():
        text = p.format_help()
        for action in p._actions:
            for opt in action.option_strings:
                assert opt in text
        for shared in ("--seed", "--threads", "--config", "-o"):
            assert shared in text, (name, shared)
