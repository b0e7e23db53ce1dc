import json
import math
import random

import pytest

import epdata


def test_header_grammar():
    d = epdata.parse_series_header("CORE_ZN:Zone Mean Air Temperature [C](TimeStep)")
    assert d == {
        "variable_name": "Zone Mean Air Temperature",
        "kind": "zone",
        "entity": "CORE_ZN",
        "unit": "C",
        "frequency": "TimeStep",
    }
    assert epdata.parse_series_header("Environment:Site Wind Speed [m/s](Hourly)")["entity"] is None


def test_errors_carry_their_code():
    with pytest.raises(epdata.Error) as info:
        epdata.parse_series_header("Zone Mean Air Temperature [C](TimeStep)")
    assert epdata.error_code(info.value) == "MalformedHeader"


def test_weights_and_aggregation_match_a_loop():
    w = epdata.build_weights([("A", 10.0, 1.0), ("B", 30.0, 1.0)], "area_weighted")
    assert w == {"A": 0.25, "B": 0.75}
    assert epdata.aggregate_series({"A": [20.0, 20.0], "B": [24.0, 24.0]}, w) == [23.0, 23.0]

    rng = random.Random(4)
    zones = [(f"Z{i}", rng.uniform(1, 500), rng.uniform(1, 500)) for i in range(4)]
    per_zone = {z[0]: [rng.uniform(-50, 50) for _ in range(30)] for z in zones}
    w = epdata.build_weights(zones, "volume_weighted")
    total = sum(z[2] for z in zones)
    got = epdata.aggregate_series(per_zone, w)
    for t in range(30):
        want = sum(z[2] / total * per_zone[z[0]][t] for z in zones)
        assert math.isclose(got[t], want, rel_tol=1e-9, abs_tol=1e-9)


def test_describe():
    s = epdata.describe([1, 2, 3, 4, 5])
    assert (s["mean"], s["variance"], s["range"]) == (3.0, 2.5, 4.0)
    assert sum(b["count"] for b in s["histogram"]) == 5


def test_store_round_trip(tmp_path):
    info = epdata.synth(tmp_path / "run", days=1)
    assert info == {"steps": 288, "series": 35}
    store = epdata.Store(tmp_path / "s.sqlite")
    run = tmp_path / "run"
    r = store.ingest(run / "model.idf", run / "eplusout.csv", run / "eplusout.eio",
                     prototype="SmallOffice", weather="seattle.epw")
    assert r["rows"] == 288 * 35
    sims = store.simulations()
    assert len(sims) == 1 and sims[0]["samples"] == 288 * 35
    assert len(store.variables(r["simulation_id"])) == 35

    s = store.series(r["simulation_id"], "CORE_ZN:Zone Mean Air Temperature")
    assert len(s["values"]) == 288
    assert s["timestamps"][0] == "2023-01-01T00:05:00"

    agg = store.aggregate(r["simulation_id"], {"All": ["CORE_ZN", "PERIMETER_ZN_1"]}, "area_weighted",
                          ["Zone Mean Air Temperature"])
    assert agg["rows"] == 288
    assert store.orphan_samples() == 0

    with pytest.raises(epdata.Error) as info:
        store.ingest(run / "model.idf", run / "eplusout.csv", run / "eplusout.eio",
                     prototype="SmallOffice", weather="seattle.epw")
    assert epdata.error_code(info.value) == "DuplicateSimulation"
    assert store.storage_report()["reduction_factor"] > 1.0


def test_cli_in_process(tmp_path):
    code, out, err = epdata.run_cli(["synth", "--out", str(tmp_path / "r"), "--days", "1"])
    assert code == 0, err
    code, out, err = epdata.run_cli(["--store", str(tmp_path / "missing.sqlite"), "--json", "catalog"])
    assert code == 2
    assert json.loads(err)["error"] == "StorageUnavailable"
