import pytest

from sargqkd.errors import DomainError
from sargqkd.presets import (BRANCIARD, BUILTIN, GYS, format_preset, get_preset,
                             load_preset_file, parse_preset_text)


class TestBuiltins:
    def test_gys_verbatim(self):
        p = GYS.params
        assert (p.alpha, p.eta_bob, p.e_detector, p.p_dark, p.f_ec) == (
            0.21, 0.045, 0.033, 1.7e-6, 1.22)

    def test_branciard_verbatim(self):
        p = BRANCIARD.params
        assert (p.alpha, p.eta_bob, p.e_detector, p.p_dark, p.f_ec) == (
            0.25, 0.1, 0.0, 1e-5, 1.0)

    def test_lookup(self):
        assert get_preset("GYS") is GYS
        assert set(BUILTIN) == {"gys", "branciard"}
        with pytest.raises(DomainError):
            get_preset("nope")

    def test_extra_presets(self):
        custom = parse_preset_text("alpha=0.2\neta_bob=0.1\ne_detector=0.01\np_dark=1e-6",
                                   name="lab")
        assert get_preset("lab", {"lab": custom}) is custom


class TestParsing:
    def test_round_trip(self):
        for preset in BUILTIN.values():
            assert parse_preset_text(format_preset(preset)) == preset

    def test_comments_and_default_f_ec(self):
        text = "# lab fibre\nalpha = 0.2  # dB/km\n\neta_bob=0.1\ne_detector=0\np_dark=1e-6\n"
        preset = parse_preset_text(text)
        assert preset.name == "custom"
        assert preset.params.alpha == 0.2 and preset.f_ec == 1.0

    def test_name_key(self):
        text = "name=lab\nalpha=0.2\neta_bob=0.1\ne_detector=0\np_dark=1e-6"
        assert parse_preset_text(text).name == "lab"

    @pytest.mark.parametrize("text", [
        "alpha=0.2\neta_bob=0.1\ne_detector=0",
        "alpha=0.2\neta_bob=0.1\ne_detector=0\np_dark=1e-6\ngain=3",
        "alpha=0.2\nalpha=0.3\neta_bob=0.1\ne_detector=0\np_dark=1e-6",
        "alpha=fast\neta_bob=0.1\ne_detector=0\np_dark=1e-6",
        "alpha 0.2\neta_bob=0.1\ne_detector=0\np_dark=1e-6",
        "alpha=-1\neta_bob=0.1\ne_detector=0\np_dark=1e-6",
    ])
    def test_rejects(self, text):
        with pytest.raises(DomainError):
            parse_preset_text(text)

    def test_load_file_uses_stem(self, tmp_path):
        path = tmp_path / "bench.preset"
        path.write_text("alpha=0.2\neta_bob=0.1\ne_detector=0\np_dark=1e-6\n")
        assert load_preset_file(path).name == "bench"
