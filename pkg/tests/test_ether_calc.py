import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capacity_planner.errors import (
    InputDomainError,
    JumboFrameRequiredError,
    OversizedPayloadError,
    UndersizedPayloadError,
)
from capacity_planner.ether_calc import (
    FrameSpec,
    LinkRate,
    ethernet_goodput,
    frame_physical_size,
    interframe_gap_time,
    max_frames_per_second,
    wire_efficiency,
)

GIGE = LinkRate(1e9)
TEN_GIGE = LinkRate(1e10)

payloads = st.integers(min_value=46, max_value=1500)
tags = st.integers(min_value=0, max_value=2)


class TestFrameSize:

    @pytest.mark.parametrize("payload,vlan_tags,jumbo,expected", [
        (46, 0, False, 84),
        (1500, 0, False, 1538),
        (9000, 0, True, 9038),
        (1500, 1, False, 1542),
        (1500, 2, False, 1546),
    ])
    def test_physical_size(self, payload, vlan_tags, jumbo, expected):
        assert frame_physical_size(payload, vlan_tags, jumbo) == expected

    @pytest.mark.parametrize("payload,jumbo,error", [
        (45, False, UndersizedPayloadError),
        (0, True, UndersizedPayloadError),
        (1501, False, JumboFrameRequiredError),
        (9000, False, JumboFrameRequiredError),
        (9001, True, OversizedPayloadError),
    ])
    def test_payload_range(self, payload, jumbo, error):
        with pytest.raises(error):
            frame_physical_size(payload, jumbo=jumbo)

    @pytest.mark.parametrize("payload,vlan_tags", [(100.5, 0), (100, 3), (100, -1), (True, 0)])
    def test_rejects_malformed_input(self, payload, vlan_tags):
        with pytest.raises(InputDomainError):
            frame_physical_size(payload, vlan_tags)

    def test_counted_size_conventions(self):
        assert FrameSpec(46).counted_size(include_crc=True) == 64
        assert FrameSpec(46).counted_size(include_crc=False) == 60
        assert FrameSpec(1500).counted_size(include_crc=True) == 1518
        assert FrameSpec(1500).counted_size(include_crc=False) == 1514
        assert FrameSpec(1500, vlan_tags=1).header_size == 18


class TestFrameRate:

    @pytest.mark.parametrize("link,payload,expected", [
        (GIGE, 46, 1_488_095),
        (GIGE, 1500, 81_274),
        (TEN_GIGE, 46, 14_880_952),
        (TEN_GIGE, 1500, 812_743),
    ])
    def test_reference_rates(self, link, payload, expected):
        assert max_frames_per_second(link, payload).frames == expected

    def test_exact_rate_is_kept(self):
        rate = max_frames_per_second(GIGE, 1500)
        assert rate.exact == pytest.approx(1e9 / (8 * 1538))
        assert rate.frames < rate.exact < rate.frames + 1

    @settings(max_examples=100, deadline=None)
    @given(payload=payloads, vlan_tags=tags, rate=st.floats(min_value=1e6, max_value=4e11))
    def test_doubling_rate_doubles_frames(self, payload, vlan_tags, rate):
        single = max_frames_per_second(LinkRate(rate), payload, vlan_tags).frames
        double = max_frames_per_second(LinkRate(2 * rate), payload, vlan_tags).frames
        assert 2 * single <= double <= 2 * single + 1


class TestGoodput:

    @pytest.mark.parametrize("link,payload,include_crc,expected,tolerance", [
        (GIGE, 46, True, 762e6, 1e6),
        (GIGE, 46, False, 714e6, 1e6),
        (GIGE, 1500, True, 987e6, 1e6),
        (GIGE, 1500, False, 984e6, 1e6),
        (TEN_GIGE, 46, True, 7.62e9, 0.01e9),
        (TEN_GIGE, 46, False, 7.14e9, 0.01e9),
        (TEN_GIGE, 1500, True, 9.87e9, 0.01e9),
        (TEN_GIGE, 1500, False, 9.84e9, 0.01e9),
    ])
    def test_reference_goodput(self, link, payload, include_crc, expected, tolerance):
        assert ethernet_goodput(link, payload, include_crc=include_crc) == pytest.approx(expected, abs=tolerance)

    def test_jumbo_goodput(self):
        goodput = ethernet_goodput(TEN_GIGE, 9000, include_crc=False, jumbo=True)
        assert goodput == pytest.approx(1e10 * 9014 / 9038)

    @settings(max_examples=100, deadline=None)
    @given(payload=payloads, vlan_tags=tags, include_crc=st.booleans())
    def test_goodput_below_link_rate(self, payload, vlan_tags, include_crc):
        assert ethernet_goodput(GIGE, payload, vlan_tags, include_crc) < GIGE.rate

    @settings(max_examples=100, deadline=None)
    @given(payload=st.integers(min_value=46, max_value=1499), vlan_tags=tags, include_crc=st.booleans())
    def test_goodput_increases_with_payload(self, payload, vlan_tags, include_crc):
        assert ethernet_goodput(GIGE, payload + 1, vlan_tags, include_crc) > ethernet_goodput(GIGE, payload, vlan_tags, include_crc)

    @settings(max_examples=100, deadline=None)
    @given(payload=payloads)
    def test_efficiency_bound(self, payload):
        efficiency = wire_efficiency(payload)
        assert efficiency == pytest.approx(payload / (payload + 38))
        assert ethernet_goodput(GIGE, payload) / GIGE.rate > efficiency


class TestLinkRate:

    @pytest.mark.parametrize("name,rate", [("GigE", 1e9), ("10GigE", 1e10), ("100GigE", 1e11)])
    def test_presets(self, name, rate):
        assert LinkRate.preset(name).rate == rate

    def test_unknown_preset(self):
        with pytest.raises(InputDomainError, match="unknown link preset"):
            LinkRate.preset("FooE")

    @pytest.mark.parametrize("rate", [0, -1e9, float("inf"), float("nan")])
    def test_rejects_bad_rate(self, rate):
        with pytest.raises(InputDomainError):
            LinkRate(rate)

    @pytest.mark.parametrize("link,expected", [(GIGE, 96e-9), (TEN_GIGE, 9.6e-9)])
    def test_interframe_gap_time(self, link, expected):
        assert interframe_gap_time(link) == pytest.approx(expected)
