"""Config grammar: parsing, validation with line numbers, round-trip."""

import pytest

from cogrelay.errors import ConfigError
from cogrelay.config import (RunConfig, SweepPlan, parse_config,
                             serialize_config)
from cogrelay.model import Scenario

BASE = """\
[primary]
rate = 1.0
snr_db = 10.0

[secondary]
scenario = a
relays = 1
threshold_db = 3.0
max_source_snr_db = 15.0
max_relay_snr_db = 15.0

[links.pt_px]
m = 2
mean_gain = 1.0

[links.s1_px]
m = 1
mean_gain = 0.8

[links.s2_px]
m = 1
mean_gain = 1.2

[links.relay_px]
m = 2
mean_gain = 1.0

[links.pt_relay]
m = 2
mean_gain = 0.9

[links.s1_relay]
m = 2
mean_gain = 1.1

[links.s2_relay]
m = 3
mean_gain = 0.7

[links.pt_s1]
m = 1
mean_gain = 0.05

[links.pt_s2]
m = 2
mean_gain = 0.04

[sweep]
axis = primary_snr_db
start_db = 0.0
stop_db = 20.0
step_db = 10.0
outage_thresholds = 0.0, 0.1
trials = 20000
seed = 7
"""


class TestParsing:
    def test_parses_base(self):
        cfg = parse_config(BASE)
        assert cfg.scenario_kind is Scenario.A
        assert cfg.link_defaults["pt_s1"].mean_gain == 0.05
        assert cfg.sweeps["sweep"].outage_thresholds == (0.0, 0.1)

    def test_network_scenario(self):
        sc = parse_config(BASE).network_scenario()
        assert sc.K == 1
        assert sc.secondary_threshold == pytest.approx(10.0 ** 0.3)

    def test_comments_and_blanks_ignored(self):
        cfg = parse_config(BASE.replace("rate = 1.0", "rate = 1.0  # bits/s/Hz"))
        assert cfg.primary_rate == 1.0

    def test_named_sweep(self):
        text = BASE + "\n[sweep.fine]\naxis = secondary_snr_db\n" \
                      "start_db = 0.0\nstop_db = 5.0\nstep_db = 1.0\n" \
                      "outage_thresholds = 0.05\n"
        cfg = parse_config(text)
        assert set(cfg.sweeps) == {"sweep", "fine"}
        assert cfg.sweeps["fine"].trials == 100_000  # default budget

    def test_per_relay_override(self):
        text = BASE.replace("scenario = a", "scenario = b") \
                   .replace("relays = 1", "relays = 2") \
                   .replace("[links.pt_s1]\nm = 1\nmean_gain = 0.05\n\n", "") \
                   .replace("[links.pt_s2]\nm = 2\nmean_gain = 0.04\n\n", "")
        text += "\n[links.pt_relay.2]\nm = 1\nmean_gain = 2.5\n"
        cfg = parse_config(text)
        sc = cfg.network_scenario(2)
        assert sc.pt_relay[0].mean_gain == 0.9
        assert sc.pt_relay[1].mean_gain == 2.5


class TestErrors:
    def _line_of(self, text, needle):
        for i, line in enumerate(text.splitlines(), start=1):
            if needle in line:
                return i
        raise AssertionError(needle)

    def test_unknown_key_has_line_number(self):
        text = BASE.replace("rate = 1.0", "rate = 1.0\nbogus = 3")
        with pytest.raises(ConfigError) as err:
            parse_config(text)
        assert err.value.line == self._line_of(text, "bogus")

    def test_unknown_section(self):
        with pytest.raises(ConfigError, match="unknown section"):
            parse_config(BASE + "\n[plotting]\ncolor = red\n")

    def test_unknown_link(self):
        with pytest.raises(ConfigError, match="unknown link"):
            parse_config(BASE + "\n[links.nonesuch]\nm = 1\nmean_gain = 1.0\n")

    def test_duplicate_key(self):
        with pytest.raises(ConfigError, match="duplicate key"):
            parse_config(BASE.replace("rate = 1.0", "rate = 1.0\nrate = 2.0"))

    def test_bad_value_type(self):
        with pytest.raises(ConfigError, match="invalid value"):
            parse_config(BASE.replace("m = 2", "m = two", 1))

    def test_missing_section(self):
        with pytest.raises(ConfigError, match="missing required section"):
            parse_config("[primary]\nrate = 1.0\nsnr_db = 10.0\n")

    def test_missing_link(self):
        text = BASE.replace("[links.pt_px]\nm = 2\nmean_gain = 1.0\n\n", "")
        with pytest.raises(ConfigError, match="pt_px"):
            parse_config(text)

    def test_key_outside_section(self):
        with pytest.raises(ConfigError, match="outside any section"):
            parse_config("rate = 1.0\n")

    def test_threshold_out_of_range(self):
        with pytest.raises(ConfigError):
            parse_config(BASE.replace("outage_thresholds = 0.0, 0.1",
                                      "outage_thresholds = 1.5"))


class TestSweepPlan:
    def test_grid(self):
        plan = SweepPlan("primary_snr_db", 0.0, 20.0, 10.0, (0.1,))
        assert plan.grid_db() == [0.0, 10.0, 20.0]

    def test_grid_inexact_step(self):
        plan = SweepPlan("primary_snr_db", 0.0, 1.0, 0.1, (0.1,))
        assert len(plan.grid_db()) == 11

    def test_invariants(self):
        with pytest.raises(ValueError):
            SweepPlan("primary_snr_db", 5.0, 1.0, 1.0, (0.1,))
        with pytest.raises(ValueError):
            SweepPlan("primary_snr_db", 0.0, 5.0, 0.0, (0.1,))
        with pytest.raises(ValueError):
            SweepPlan("sideways", 0.0, 5.0, 1.0, (0.1,))


class TestRoundTrip:
    def test_serialize_parse_identity(self):
        cfg = parse_config(BASE)
        again = parse_config(serialize_config(cfg))
        assert again == cfg
        assert again.network_scenario() == cfg.network_scenario()
