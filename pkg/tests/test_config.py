import pytest

from graft import GraftError, TransferConfig
from graft.config import build_config, parse_config_file


class TestTransferConfig:
    def test_defaults_valid(self):
        c = TransferConfig()
        assert c.theta == 2 and c.mu is None and c.z_entity == 1.96

    @pytest.mark.parametrize(
        "kwargs,msg",
        [
            ({"theta": 3}, "theta"),
            ({"lam": -0.1}, "lam"),
            ({"lam_selection": -1.0}, "lam_selection"),
            ({"ridge": float("inf")}, "ridge"),
            ({"d1": 0}, "d1"),
            ({"d2": 2.5}, "d2"),
            ({"z_entity": 0.0}, "z_entity"),
            ({"z_edge": -1.96}, "z_edge"),
            ({"max_path_len": 1}, "max_path_len"),
            ({"mu": 1.5}, "mu"),
            ({"mu": -0.1}, "mu"),
            ({"distance_cap": 0.0}, "distance_cap"),
            ({"selection_tol": 0.0}, "selection_tol"),
            ({"eta0": -0.01}, "eta0"),
            ({"construction_max_iters": 0}, "construction_max_iters"),
            ({"seed": True}, "seed"),
        ],
    )
    def test_invalid_values_rejected(self, kwargs, msg):
        with pytest.raises(GraftError, match=msg):
            TransferConfig(**kwargs)

    def test_lam_overrides(self):
        c = TransferConfig(lam=0.5)
        assert c.selection_lam_effective == 0.5
        assert c.construction_lam_effective == 0.5
        c = TransferConfig(lam=0.5, lam_selection=0.0, lam_construction=2.0)
        assert c.selection_lam_effective == 0.0
        assert c.construction_lam_effective == 2.0

    def test_to_dict_round_trips(self):
        c = TransferConfig(mu=0.3, d2=8)
        assert TransferConfig(**c.to_dict()) == c


class TestParseConfigFile:
    def test_parses_keys_comments_and_blanks(self):
        text = "\n".join(
            [
                "# comment",
                "",
                "mu = 0.25",
                "d2 = 32",
                "theta=1",
                "distance_cap = none",
            ]
        )
        got = parse_config_file(text)
        assert got == {"mu": 0.25, "d2": 32, "theta": 1, "distance_cap": None}
        assert isinstance(got["d2"], int)

    def test_auto_means_none(self):
        assert parse_config_file("mu = auto") == {"mu": None}

    @pytest.mark.parametrize(
        "text,msg",
        [
            ("mu 0.5", "expected 'key = value'"),
            ("nope = 1", "unknown config key"),
            ("d2 = 2.5", "expects an integer"),
            ("lam = abc", "expects a number"),
        ],
    )
    def test_bad_lines_rejected(self, text, msg):
        with pytest.raises(GraftError, match=msg):
            parse_config_file(text)

    def test_error_names_line_number(self):
        with pytest.raises(GraftError, match="line 3"):
            parse_config_file("mu = 0.5\n# ok\nbroken line\n")


class TestBuildConfig:
    def test_flags_beat_file_beat_defaults(self):
        c = build_config({"mu": 0.5, "d2": 8}, {"mu": 0.9})
        assert c.mu == 0.9 and c.d2 == 8 and c.d1 == 16

    def test_explicit_none_flag_wins(self):
        c = build_config({"mu": 0.5}, {"mu": None})
        assert c.mu is None

    def test_unknown_key_rejected(self):
        with pytest.raises(GraftError, match="unknown config keys"):
            build_config({"bogus": 1.0}, None)

    def test_invalid_merged_value_rejected(self):
        with pytest.raises(GraftError, match="theta"):
            build_config(None, {"theta": 5})
