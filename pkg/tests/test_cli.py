import csv
import io
import json

import pytest

from capacity_planner import cli


def run_json(capsys, *argv):
    status = cli.main([*argv, "--format", "json"])
    out = capsys.readouterr().out
    document = json.loads(out)
    figures = {figure["name"]: figure for figure in document["figures"]}
    return status, figures, document


def write_json(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


BALANCED = {
    "nodes": [
        {"id": "srv1", "tier": "server-access", "edge_ports": [{"bps": 1e10, "count": 2}]},
        {"id": "core1", "tier": "core"},
    ],
    "links": [{"from": "srv1", "to": "core1", "bps": 1e10, "count": 2}],
}


class TestStat:

    def test_worked_example_table(self, capsys):
        assert cli.main(["stat", "--sources", "100", "--rate", "1e6", "--epsilon", "0.01"]) == 0
        out = capsys.readouterr().out
        assert "57.44 Mbit/s" in out
        assert "100.00 Mbit/s" in out
        assert "50.00 Mbit/s" in out

    def test_worked_example_json(self, capsys):
        status, figures, document = run_json(capsys, "stat", "-n", "100", "-r", "1M")
        assert status == 0
        assert document["command"] == "stat"
        assert figures["c_max"]["value"] == 100e6
        assert figures["c_mean"]["value"] == 50e6
        assert 57.3e6 <= figures["c_stat"]["value"] <= 57.6e6
        assert figures["c_stat"]["display"] == "57.44 Mbit/s"
        assert figures["convention"]["value"] == "two-sided"

    def test_link_capacity(self, capsys):
        _, figures, _ = run_json(capsys, "stat", "-n", "100", "-r", "1e6", "--link-capacity", "57.5M")
        assert figures["max_sources"]["value"] == 100

    def test_validate(self, capsys):
        _, figures, _ = run_json(capsys, "stat", "-n", "100", "-r", "1e6", "--validate", "--trials", "20000", "--seed", "7")
        assert figures["sim_trials"]["value"] == 20_000
        assert figures["sim_mean"]["value"] == pytest.approx(50e6, rel=0.01)
        assert figures["target_exceedance"]["value"] == pytest.approx(0.005)
        assert 0 <= figures["exceedance_rate"]["value"] <= 0.02

    def test_one_sided(self, capsys):
        _, figures, _ = run_json(capsys, "stat", "-n", "100", "-r", "1e6", "--one-sided")
        assert figures["c_epsilon"]["value"] == pytest.approx(2.326348, abs=1e-6)

    def test_json_is_byte_identical(self, capsys):
        argv = ["stat", "-n", "100", "-r", "1e6", "--validate", "--trials", "5000", "--format", "json"]
        cli.main(argv)
        first = capsys.readouterr().out
        cli.main(argv)
        assert capsys.readouterr().out == first

    def test_bad_epsilon(self, capsys):
        assert cli.main(["stat", "-n", "100", "-r", "1e6", "-e", "0"]) == 2
        err = capsys.readouterr().err
        assert err.startswith("error: input-domain: ")
        assert len(err.strip().splitlines()) == 1


class TestFrames:

    def test_gige_minimum_frames(self, capsys):
        assert cli.main(["frames", "--link", "1e9", "--payload", "46"]) == 0
        assert "1,488,095 f/s" in capsys.readouterr().out

    @pytest.mark.parametrize("link,payload,frames", [
        ("GigE", "1500", 81_274),
        ("10G", "46", 14_880_952),
        ("10GigE", "1500", 812_743),
    ])
    def test_frames_json(self, capsys, link, payload, frames):
        _, figures, _ = run_json(capsys, "frames", "-l", link, "-p", payload)
        assert figures["frames_per_second"]["value"] == frames

    def test_goodput_figures(self, capsys):
        _, figures, _ = run_json(capsys, "frames", "-l", "1e9", "-p", "46")
        assert figures["goodput_with_crc"]["value"] == pytest.approx(762e6, abs=1e6)
        assert figures["goodput_without_crc"]["value"] == pytest.approx(714e6, abs=1e6)
        assert figures["interframe_gap_time"]["display"] == "96.0 ns"

    def test_csv_matches_json(self, capsys):
        cli.main(["frames", "-l", "1e9", "-p", "1500", "--format", "csv"])
        rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
        _, figures, _ = run_json(capsys, "frames", "-l", "1e9", "-p", "1500")
        assert [row["name"] for row in rows] == list(figures)
        for row in rows:
            assert float(row["value"]) == figures[row["name"]]["value"]
            assert row["display"] == figures[row["name"]]["display"]

    def test_jumbo(self, capsys):
        _, figures, _ = run_json(capsys, "frames", "-l", "10G", "-p", "9000", "--jumbo")
        assert figures["physical_size"]["value"] == 9038

    @pytest.mark.parametrize("payload,code", [
        ("40", "payload-undersized"),
        ("9000", "jumbo-required"),
        ("9500", "payload-oversized"),
    ])
    def test_payload_errors(self, capsys, payload, code):
        assert cli.main(["frames", "-l", "1e9", "-p", payload]) == 2
        assert capsys.readouterr().err.startswith(f"error: {code}: ")


class TestGoodput:

    @pytest.mark.parametrize("argv,expected", [
        (["-p", "46"], 71e6),
        (["-p", "1500", "--options", "timestamps"], 941e6),
        (["-p", "1500"], 949e6),
        (["-p", "46", "--proto", "udp"], 214e6),
        (["-p", "1500", "--proto", "udp"], 957e6),
    ])
    def test_reference_goodput(self, capsys, argv, expected):
        _, figures, _ = run_json(capsys, "goodput", "-l", "GigE", *argv)
        assert figures["goodput"]["value"] == pytest.approx(expected, abs=1e6)

    def test_udp_with_options(self, capsys):
        assert cli.main(["goodput", "-l", "1e9", "-p", "1500", "--proto", "udp", "--options", "12"]) == 2
        assert capsys.readouterr().err.startswith("error: input-domain: ")


class TestMathis:

    def test_throughput(self, capsys):
        _, figures, _ = run_json(capsys, "mathis", "--mss", "1460", "--rtt", "0.1", "--loss", "0.01")
        assert figures["mathis_throughput"]["value"] == pytest.approx(1.43e6, rel=0.005)
        assert figures["mathis_window"]["value"] == pytest.approx(16.33, abs=0.01)

    def test_window_and_target(self, capsys):
        _, figures, _ = run_json(
            capsys, "mathis", "--mss", "1460", "--rtt", "0.1", "--loss", "0.01",
            "--window", "65535", "--target", "1M",
        )
        assert figures["window_throughput"]["value"] == pytest.approx(5_242_800)
        assert figures["throughput_limit"]["value"] == pytest.approx(figures["mathis_throughput"]["value"])
        assert 0.01 < figures["max_loss_for_target"]["value"] < 0.03

    def test_loss_out_of_domain(self, capsys):
        assert cli.main(["mathis", "--mss", "1460", "--rtt", "0.1", "--loss", "1"]) == 2


class TestTcpSim:

    def test_single_run_with_trace(self, capsys, tmp_path):
        trace = tmp_path / "cwnd.csv"
        status, figures, _ = run_json(
            capsys, "tcp-sim", "--rtt", "0.1", "--loss", "0.01", "--rounds", "300", "--trace", str(trace),
        )
        assert status == 0
        assert figures["throughput"]["value"] > 0
        assert "mathis_throughput" in figures
        assert trace.read_text().splitlines()[0] == "round,cwnd_bytes,event"

    def test_seed_sweep_reports_median(self, capsys):
        _, figures, document = run_json(capsys, "tcp-sim", "--rtt", "0.1", "--loss", "0.01", "--rounds", "200", "--seeds", "3")
        assert [record["seed"] for record in document["records"]] == [0, 1, 2]
        throughputs = sorted(record["throughput"] for record in document["records"])
        assert figures["median_throughput"]["value"] == throughputs[1]

    def test_same_seed_same_output(self, capsys):
        argv = ["tcp-sim", "--rtt", "0.1", "--loss", "0.02", "--rounds", "300", "--seed", "9", "--format", "json"]
        cli.main(argv)
        first = capsys.readouterr().out
        cli.main(argv)
        assert capsys.readouterr().out == first

    def test_lossless_unbounded_path(self, capsys):
        assert cli.main(["tcp-sim", "--rtt", "0.1", "--loss", "0"]) == 2
        assert "error: input-domain:" in capsys.readouterr().err

    def test_lossless_with_bottleneck(self, capsys):
        _, figures, _ = run_json(capsys, "tcp-sim", "--rtt", "0.1", "--loss", "0", "--rounds", "100", "--bottleneck", "1M")
        assert figures["throughput"]["value"] <= 1e6
        assert "mathis_throughput" not in figures

    @pytest.mark.parametrize("flag", ["--seeds", "--rounds", "--workers"])
    def test_counts_must_be_positive(self, capsys, flag):
        with pytest.raises(SystemExit) as excinfo:
            cli.main(["tcp-sim", "--rtt", "0.1", "--loss", "0.01", "--rounds", "10", flag, "0"])
        assert excinfo.value.code == 2
        err = capsys.readouterr().err
        assert err.startswith("error: usage: ")
        assert len(err.strip().splitlines()) == 1

    def test_window_below_one_segment(self, capsys):
        assert cli.main(["tcp-sim", "--rtt", "0.1", "--loss", "0", "--rwnd", "1000"]) == 2
        assert capsys.readouterr().err.startswith("error: input-domain: rwnd must hold at least one segment")


class TestFabric:

    def test_balanced_server_access(self, capsys, tmp_path):
        path = write_json(tmp_path, "t.json", BALANCED)
        assert cli.main(["fabric", "--topology", path]) == 0
        assert "1:1" in capsys.readouterr().out

    def test_violation_exit_code(self, capsys, tmp_path):
        topology = dict(BALANCED, links=[{"from": "srv1", "to": "core1", "bps": 1e10}])
        path = write_json(tmp_path, "t.json", topology)
        status, figures, document = run_json(capsys, "fabric", "--topology", path)
        assert status == 1
        assert figures["violations"]["value"] == 1
        (record,) = document["records"]
        assert record["ratio"] == 2.0
        assert record["ratio_display"] == "2:1"
        assert record["verdict"] == "violation"

    def test_policy_file(self, capsys, tmp_path):
        topology = dict(BALANCED, links=[{"from": "srv1", "to": "core1", "bps": 1e10}])
        path = write_json(tmp_path, "t.json", topology)
        policy = write_json(tmp_path, "p.json", {"server_core": 2})
        assert cli.main(["fabric", "-t", path, "--policy", policy]) == 0

    def test_clos_verdict(self, capsys, tmp_path):
        path = write_json(tmp_path, "t.json", dict(BALANCED, clos={
            "n": 48, "r": 4, "k": 6, "uplink_bps": 4e10, "downlink_bps": 1e10,
        }))
        _, figures, _ = run_json(capsys, "fabric", "-t", path)
        assert figures["clos_verdict"]["value"] == "acceptable-oversubscribed"
        assert figures["strict_sense_nonblocking"]["value"] is False

    def test_missing_file(self, capsys, tmp_path):
        assert cli.main(["fabric", "-t", str(tmp_path / "absent.json")]) == 2
        assert capsys.readouterr().err.startswith("error: topology: cannot read")

    def test_unknown_key(self, capsys, tmp_path):
        path = write_json(tmp_path, "t.json", dict(BALANCED, racks=[]))
        assert cli.main(["fabric", "-t", path]) == 2
        assert "unknown key(s) in topology: racks" in capsys.readouterr().err

    def test_invalid_utf8(self, capsys, tmp_path):
        path = tmp_path / "t.json"
        path.write_bytes(b'{"nodes": [{"id": "\xff\xfe", "tier": "access"}], "links": []}')
        assert cli.main(["fabric", "-t", str(path)]) == 2
        err = capsys.readouterr().err
        assert err.startswith("error: topology: ")
        assert "not valid UTF-8" in err

    def test_edge_ports_not_an_array(self, capsys, tmp_path):
        path = write_json(tmp_path, "t.json", {
            "nodes": [{"id": "a", "tier": "access", "edge_ports": 5}], "links": [],
        })
        assert cli.main(["fabric", "-t", path]) == 2
        assert "edge_ports must be an array" in capsys.readouterr().err

    def test_csv_records(self, capsys, tmp_path):
        path = write_json(tmp_path, "t.json", BALANCED)
        cli.main(["fabric", "-t", path, "--format", "csv"])
        (row,) = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
        assert row["node"] == "srv1"
        assert row["verdict"] == "ok"


class TestUsage:

    def test_missing_subcommand(self, capsys):
        assert cli.main([]) == 2

    def test_bad_number(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            cli.main(["stat", "-n", "many", "-r", "1e6"])
        assert excinfo.value.code == 2
        err = capsys.readouterr().err
        assert err.startswith("error: usage: ")
        assert len(err.strip().splitlines()) == 1

    def test_unknown_format(self, capsys):
        with pytest.raises(SystemExit):
            cli.main(["frames", "-l", "1e9", "-p", "46", "--format", "xml"])
