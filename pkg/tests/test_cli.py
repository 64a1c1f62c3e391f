import json
import math

import numpy as np
import pytest

from sargqkd import cli
from sargqkd.cli import OutputRecord, csv_body, format_value, read_csv, render_csv, run


def invoke(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def table(text):
    header, rows = read_csv(text)
    return header, rows


def column(text, name):
    header, rows = table(text)
    i = header.index(name)
    return [float(r[i]) for r in rows]


class TestFormatting:
    @pytest.mark.parametrize("x", [0.1, 1 / 3, 1.7e-6, 207.68019848330852, -0.0, 1e-300])
    def test_float_round_trip(self, x):
        assert float(format_value(x)) == x

    def test_non_finite_and_other_values(self):
        assert format_value(math.nan) == "nan"
        assert format_value(math.inf) == "inf"
        assert format_value(True) == "true"
        assert format_value(np.int64(3)) == "3"
        assert format_value(None) == ""

    def test_header_is_separable(self):
        rec = OutputRecord("demo", {"a": 1.5}, ["x", "y"], [[1, 0.25]], ["hello"])
        text = render_csv(rec, stamp="then")
        assert csv_body(text) == "x,y\n1,0.25\n"
        assert all(line.startswith("# ") for line in text.splitlines()[:5])

    def test_timestamp_is_pinnable(self, monkeypatch):
        monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
        assert cli.timestamp() == "1970-01-01T00:00:00+00:00"


class TestCommands:
    def test_table1(self, capsys):
        code, out, _ = invoke(capsys, "table1")
        assert code == 0
        header, rows = table(out)
        assert len(rows) == 12
        computed = {(r[0], r[1], r[2]): r[3] for r in rows}
        assert float(computed[("ber_two_photon", "upper", "two-way")]) == pytest.approx(
            (3 - math.sqrt(2)) / 7, abs=1e-12)
        assert "22.56%" in out and "19.4%" in out

    def test_fig3_sarg1(self, capsys):
        code, out, _ = invoke(capsys, "fig3")
        assert code == 0
        values = column(out, "tolerable_ber")
        assert len(values) == 10
        assert values[3] == pytest.approx(0.177, abs=1e-3)

    def test_fig3_sarg2(self, capsys):
        _, out, _ = invoke(capsys, "fig3", "--protocol", "sarg2")
        values = column(out, "tolerable_ber")
        assert values[0] == pytest.approx(0.0271, abs=5e-4)
        assert values[1] == pytest.approx(0.0407, abs=5e-4)

    def test_fig3_step_cap(self, capsys):
        code, _, err = invoke(capsys, "fig3", "--max-steps", "11")
        assert code == 2 and "max-steps" in err

    def test_rates(self, capsys):
        code, out, _ = invoke(capsys, "rates", "--to", "40", "--step", "10")
        assert code == 0
        header, rows = table(out)
        assert header[0] == "distance_km" and len(rows) == 5
        for name in ("bb84_decoy_rate", "sarg04_decoy_rate", "sarg04_decoy_1photon_rate",
                     "bb84_gllp_rate", "sarg04_gllp_rate", "bb84_mu", "sarg04_mu"):
            assert name in header
        clamped = column(out, "bb84_gllp_rate")
        raw = column(out, "bb84_gllp_rate_raw")
        assert all(c == max(r, 0.0) for c, r in zip(clamped, raw))

    @pytest.mark.parametrize("protocol", ["bb84", "sarg04"])
    def test_rates_log_slope(self, capsys, protocol):
        _, out, _ = invoke(capsys, "rates", "--to", "20", "--step", "5", "--protocols", protocol)
        rates = np.array(column(out, f"{protocol}_decoy_rate"))
        slope = np.diff(np.log10(rates)) / 5.0
        assert slope[0] == pytest.approx(-0.021, rel=0.1)

    def test_rates_sarg04_edge(self, capsys):
        _, out, _ = invoke(capsys, "rates", "--from", "97", "--to", "98", "--step", "1",
                           "--protocols", "sarg04")
        raw = column(out, "sarg04_decoy_rate_raw")
        assert raw[0] > 0.0 and raw[1] <= 0.0

    def test_optimal_mu(self, capsys):
        code, out, _ = invoke(capsys, "optimal-mu", "--from", "20", "--to", "30", "--step", "10")
        assert code == 0
        header, rows = table(out)
        assert len(rows) == 12
        rows = [r for r in rows if float(r[0]) == 20.0]
        mu = {(float(r[1]), r[2]): float(r[3]) for r in rows}
        assert mu[(0.033, "bb84")] > mu[(0.033, "sarg04")]
        assert mu[(0.0001, "sarg04")] > mu[(0.0001, "bb84")]

    def test_optimal_mu_custom_variants(self, capsys):
        _, out, _ = invoke(capsys, "optimal-mu", "--from", "0", "--to", "10", "--step", "10",
                           "--e-detector", "0.02")
        assert set(column(out, "e_detector")) == {0.02}

    def test_attack(self, capsys):
        code, out, _ = invoke(capsys, "attack", "--photons", "1")
        assert code == 0
        assert column(out, "min_ber")[0] == pytest.approx(1 / 3, abs=1e-6)

    def test_attack_two_photon(self, capsys):
        _, out, _ = invoke(capsys, "attack", "--photons", "2")
        for value in column(out, "min_ber"):
            assert value == pytest.approx((3 - math.sqrt(2)) / 7, abs=1e-5)

    def test_attack_grid_floor(self, capsys):
        code, _, _ = invoke(capsys, "attack", "--grid", "16")
        assert code == 2

    def test_depolarizing(self, capsys):
        _, out, _ = invoke(capsys, "depolarizing")
        ber, p = column(out, "ber"), column(out, "depolarizing_p")
        for row, (e, q) in enumerate(zip(ber, p)):
            expected = 1.5 * e if row >= 4 else 3 * e / (4 * (1 - e))
            assert q == pytest.approx(expected, rel=1e-12)
        reference = column(out, "reference_depolarizing_p")
        for got, want in zip(reference, [0.186, 0.0527, 0.375, 0.220, 0.2835, 0.375]):
            assert got == pytest.approx(want, abs=5e-4)

    def test_distance(self, capsys):
        code, out, _ = invoke(capsys, "distance", "--preset", "gys")
        assert code == 0
        header, rows = table(out)
        d = {(r[0], r[1]): float(r[2]) for r in rows}
        assert d[("sarg04", "decoy")] == pytest.approx(97.2, abs=0.5)
        assert d[("bb84", "decoy")] == pytest.approx(141.8, abs=0.5)
        assert d[("sarg04", "decoy-1photon")] < d[("sarg04", "decoy")]

    def test_preset_params_recorded_verbatim(self, capsys):
        _, out, _ = invoke(capsys, "distance", "--preset", "branciard", "--protocol", "bb84")
        params = dict(line[len("# param "):].split("=", 1) for line in out.splitlines()
                      if line.startswith("# param "))
        assert {k: float(params[k]) for k in ("alpha", "eta_bob", "e_detector", "p_dark",
                                               "f_ec")} == {
            "alpha": 0.25, "eta_bob": 0.1, "e_detector": 0.0, "p_dark": 1e-5, "f_ec": 1.0}


class TestOutputOptions:
    def test_deterministic_body(self, capsys):
        _, first, _ = invoke(capsys, "rates", "--to", "30", "--step", "10")
        _, second, _ = invoke(capsys, "rates", "--to", "30", "--step", "10")
        assert csv_body(first) == csv_body(second)

    def test_json(self, capsys):
        _, out, _ = invoke(capsys, "depolarizing", "--format", "json")
        doc = json.loads(out)
        assert doc["command"] == "depolarizing"
        assert len(doc["rows"]) == 6
        assert doc["rows"][0]["protocol"] == "sarg04"

    def test_json_matches_csv(self, capsys):
        _, text, _ = invoke(capsys, "fig3", "--protocol", "bb84", "--max-steps", "3")
        _, js, _ = invoke(capsys, "fig3", "--protocol", "bb84", "--max-steps", "3",
                          "--format", "json")
        from_json = [row["tolerable_ber"] for row in json.loads(js)["rows"]]
        assert from_json == column(text, "tolerable_ber")

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "dep.csv"
        code, out, _ = invoke(capsys, "depolarizing", "--out", str(path))
        assert code == 0 and out == ""
        assert read_csv(path.read_text())[0][0] == "protocol"

    def test_unwritable_out(self, capsys, tmp_path):
        code, _, _ = invoke(capsys, "depolarizing", "--out", str(tmp_path / "no" / "x.csv"))
        assert code == 2

    def test_preset_file(self, capsys, tmp_path):
        path = tmp_path / "lab.txt"
        path.write_text("alpha=0.21\neta_bob=0.045\ne_detector=0.033\np_dark=1.7e-6\n"
                        "f_ec=1.22\n")
        _, out, _ = invoke(capsys, "distance", "--preset-file", str(path), "--protocol",
                           "sarg04")
        assert "# param preset=lab" in out
        d = column(out, "secure_distance_km")[0]
        assert d == pytest.approx(97.2, abs=0.5)

    def test_bad_preset_file(self, capsys, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("alpha=0.21\n")
        code, _, err = invoke(capsys, "distance", "--preset-file", str(path))
        assert code == 2 and "missing" in err

    def test_no_secure_region(self, capsys, tmp_path):
        path = tmp_path / "noisy.txt"
        path.write_text("alpha=0.2\neta_bob=0.1\ne_detector=0.2\np_dark=1e-5\n")
        code, out, err = invoke(capsys, "distance", "--preset-file", str(path))
        assert code == 4 and "no positive key rate" in err
        assert set(column(out, "secure_distance_km")) == {0.0}

    def test_degenerate_channel(self, capsys, tmp_path):
        path = tmp_path / "dark.txt"
        path.write_text("alpha=100\neta_bob=0.1\ne_detector=0.01\np_dark=0\n")
        code, _, err = invoke(capsys, "rates", "--preset-file", str(path), "--to", "100",
                              "--step", "50")
        assert code == 3 and "degenerate" in err

    def test_unknown_preset(self, capsys):
        code, _, _ = invoke(capsys, "distance", "--preset", "nowhere")
        assert code == 2

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run(["--version"])
        assert exc.value.code == 0
        assert "0.1.0" in capsys.readouterr().out

    def test_module_entry_point(self):
        import subprocess
        import sys
        res = subprocess.run([sys.executable, "-m", "sargqkd", "depolarizing"],
                             capture_output=True, text=True, check=True)
        assert res.stdout.splitlines()[2] == "# command depolarizing"
