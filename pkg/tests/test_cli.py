import json

import mock
import pytest

from hyperpen import cli, constants, engine
from hyperpen.entities import INFINITY, ReportRow
from hyperpen.exceptions import FamilyError


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def strip_runtime(text):
    data = json.loads(text)
    del data["meta"]["runtime_ms"]
    return data


@pytest.fixture
def obstacle_file(tmp_path):
    path = tmp_path / "obstacles.json"
    path.write_text(json.dumps([{"kind": "horoball", "center": [0, 0], "param": 0.5}]))
    return str(path)


class TestArguments:
    @pytest.mark.parametrize(
        "fn,text,expected",
        [
            (cli._eps_arg, "inf", INFINITY),
            (cli._eps_arg, "2.5", 2.5),
            (cli._boundary_arg, "inf", INFINITY),
            (cli._boundary_arg, "0.5", complex(0.5)),
            (cli._boundary_arg, "1,-2", complex(1, -2)),
            (cli._window_arg, "-1,2", (-1.0, 2.0)),
            (cli._complex_arg, "3,4", complex(3, 4)),
        ],
    )
    def test_parsers(self, fn, text, expected):
        assert fn(text) == expected

    def test_point(self):
        p = cli._point_arg("1,2,3")
        assert (p.base, p.height) == (complex(1, 2), 3.0)

    def test_load_ford(self):
        fam = cli.load_obstacles("ford:3", designated=0)
        assert fam.designated_index == 0
        assert fam.bodies[0].center is INFINITY

    def test_load_file(self, obstacle_file):
        fam = cli.load_obstacles(obstacle_file, delta0=0.5)
        assert len(fam) == 1
        assert fam.delta0 == 0.5


class TestExitCodes:
    def test_audit_passes(self, capsys):
        code, out, _ = run(capsys, "constants", "audit")
        assert code == 0
        assert "h0_inf" in out

    def test_failing_row(self, capsys):
        with mock.patch.object(constants, "audit", return_value=[ReportRow("x", 1.0, 2.0, 1e-3)]):
            code, out, _ = run(capsys, "constants", "audit")
        assert code == 1
        assert "FAIL" in out

    def test_library_error(self, capsys):
        with mock.patch.object(engine, "uncloud", side_effect=FamilyError((0, 1), -1.0, "bodies overlap")):
            code, out, err = run(capsys, "uncloud", "--obstacles", "ford:2")
        assert code == 1
        assert out == ""
        assert "error: bodies overlap" in err

    def test_missing_prescription_inputs(self, capsys):
        code, _, err = run(capsys, "prescribe")
        assert code == 1
        assert "--obstacles" in err

    @pytest.mark.parametrize(
        "argv",
        [
            [],
            ["constants", "bogus"],
            ["uncloud", "--start", "1"],
            ["heis", "h5-dist", "--matrix", "1,2,3"],
            ["prescribe", "--model", "h4"],
        ],
    )
    def test_usage_errors(self, argv):
        with pytest.raises(SystemExit) as exc_info:
            cli.main(argv)
        assert exc_info.value.code == 2


class TestJson:
    def test_keys(self, capsys):
        code, out, _ = run(capsys, "constants", "audit", "--json")
        data = json.loads(out)
        assert code == 0
        assert set(data) == {"rows", "meta"}
        assert set(data["meta"]) == {"seed", "version", "runtime_ms"}
        assert set(data["rows"][0]) == {"name", "computed", "paper", "tol", "pass"}

    def test_table_params(self, capsys):
        code, out, _ = run(capsys, "constants", "table", "--eps", "inf", "--json")
        data = json.loads(out)
        assert code == 0
        assert data["details"]["params"]["eps0"]["value"] == "inf"

    def test_reproducible(self, capsys):
        argv = ["lemmas", "check", "--id", "L2.1", "--trials", "20", "--seed", "3", "--json"]
        _, first, _ = run(capsys, *argv)
        _, second, _ = run(capsys, *argv)
        assert strip_runtime(first) == strip_runtime(second)
        assert json.loads(first)["meta"]["seed"] == 3


class TestCommands:
    def test_uncloud_file(self, capsys, obstacle_file, tmp_path):
        svg = tmp_path / "scene.svg"
        code, out, _ = run(
            capsys, "uncloud", "--obstacles", obstacle_file, "--start", "0,1", "--svg", str(svg), "--json", "--trace"
        )
        data = json.loads(out)
        assert code == 0
        assert {r["name"] for r in data["rows"]} >= {"avoidance_radius", "max_depth", "cauchy_excess"}
        assert len(data["details"]["trace"]["steps"]) == 2
        assert svg.read_text().startswith("<svg")

    def test_prescribe_file(self, capsys, tmp_path):
        path = tmp_path / "c0.json"
        path.write_text(json.dumps([{"kind": "horoball", "center": "inf", "param": 1}]))
        code, out, _ = run(capsys, "prescribe", "--obstacles", str(path), "--h", "7", "--from", "0", "--json")
        rows = {r["name"]: r for r in json.loads(out)["rows"]}
        assert code == 0
        assert rows["f0"]["computed"] == pytest.approx(7.0, abs=1e-6)

    def test_dioph_constant(self, capsys):
        code, out, _ = run(capsys, "dioph", "constant", "--x", "cf:1,1...", "--qmax", "20000", "--json")
        rows = {r["name"]: r["computed"] for r in json.loads(out)["rows"]}
        assert code == 0
        assert rows["approx_constant"] == pytest.approx(0.4472136, abs=1e-6)
        assert rows["window_minimum"] == pytest.approx(0.4472136, abs=1e-5)

    def test_dioph_ford(self, capsys):
        code, out, _ = run(capsys, "dioph", "ford", "--bound", "3")
        assert code == 0
        assert "min_gap" in out

    @pytest.mark.parametrize("action", ["tangency", "h5-dist", "dist"])
    def test_heis(self, capsys, action):
        code, _, _ = run(capsys, "heis", action)
        assert code == 0

    def test_eq35(self, capsys):
        code, out, _ = run(capsys, "heis", "eq35", "--samples", "50", "--json")
        rows = {r["name"]: r["computed"] for r in json.loads(out)["rows"]}
        assert code == 0
        assert rows["uniform_sign"] == "-1"

    def test_lemma_list(self, capsys):
        code, out, _ = run(capsys, "lemmas", "list")
        assert code == 0
        assert "L2.1" in out
