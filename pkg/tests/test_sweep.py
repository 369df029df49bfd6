import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffproj.errors import InvalidInputError
from ffproj.expcli.sweep import (
    CSV_VERSION_LINE,
    Instance,
    expand,
    parse_config,
    records_from_csv,
    records_from_json,
    records_to_csv,
    records_to_json,
    run_instance,
    run_sweep,
    summarize,
)
from ffproj.expcli.verify import CSV_COLUMNS, SweepRecord

SMALL = """
p = 3, 5
[random]
construction = random
nk = 3:1, 3:2
a = 2.2
s = 0.3, 0.9
seeds = 1, 2
[slab]
construction = planar_slab:sub_dim=2,slab_exponent=0.3
nk = 3:1
a = 2.3
s = 0.45
"""


def test_empty_config():
    assert parse_config("") == []
    assert parse_config("# nothing\n\n") == []
    records = run_sweep([])
    assert records == []
    text = records_to_csv(records)
    assert text.splitlines() == [CSV_VERSION_LINE, ",".join(CSV_COLUMNS)]
    assert records_from_csv(text) == []


def test_trivial_full_instance():
    sections = parse_config("[full]\nconstruction = random\np = 3\nnk = 3:1\na = 3.0\ns = 0.5\nseeds = 7\n")
    (rec,) = run_sweep(sections)
    assert rec.status == "ok" and rec.cardinality == 27
    assert rec.exceptional == 0 and rec.main_ratio == 0.0 and rec.falconer_ratio == 0.0
    assert rec.falconer_free_ratio == 0.0


def test_defaults_and_order():
    sections = parse_config(SMALL)
    assert [s.name for s in sections] == ["random", "slab"]
    assert sections[1].p == [3, 5]
    insts = list(expand(sections))
    assert len(insts) == 2 * 2 * 2 * 2 + 2
    assert insts[0] == Instance("random", 3, 3, 1, 2.2, 0.3, 1)
    assert insts[1] == Instance("random", 3, 3, 1, 2.2, 0.3, 2)
    assert insts[2] == Instance("random", 5, 3, 1, 2.2, 0.3, 1)
    assert insts[-1].seed is None and insts[-1].p == 5


def test_fraction_mode_drops_out_of_range():
    sec = parse_config("[x]\np=5\nnk=3:1\na=2.2\ns_fraction=0.45\ns_offset=-1, 0, 0.05, 5\n")
    ss = [i.s for i in expand(sec)]
    assert ss == [pytest.approx(0.27), pytest.approx(0.32)]


@pytest.mark.parametrize(
    "text", ["[x]\nbogus = 1\n", "[x]\np = five\n", "p 5\n", "[x]\nnk=3:1\np=5\ns_fraction=0.5\n"]
)
def test_config_errors(text):
    with pytest.raises(InvalidInputError):
        list(expand(parse_config(text)))


def test_failed_instance_does_not_stop_sweep():
    sections = parse_config(
        "[bad]\nconstruction = st_product\np = 7\nnk = 2:1\na = 1.8\ns = 0.95\n"
        "[good]\nconstruction = random\np = 3\nnk = 2:1\na = 0.1\ns = 0.5\n"
    )
    bad, good = run_sweep(sections)
    assert bad.status == "failed" and "wrap" in bad.error
    assert good.status == "ok" and good.exceptional == 4
    summary = summarize([bad, good])
    assert summary["failed"] == 1 and summary["records"] == 2


def test_construction_dimension_mismatch_is_failed_record():
    rec = run_instance(Instance("st_product", 31, 3, 1, 1.0, 0.6, None))
    assert rec.status == "failed" and "expected n=3" in rec.error


def test_cylinder_in_sweep():
    rec = run_instance(Instance("cylinder:base=planar_slab,sub_dim=1,slab_exponent=0.5", 5, 3, 1, 2.0, 0.5, None))
    assert rec.status == "ok" and rec.cardinality == 5 * 5 * 2


def test_csv_roundtrip_and_workers():
    sections = parse_config(SMALL)
    serial = run_sweep(sections)
    parallel = run_sweep(sections, workers=3)
    assert serial == parallel
    text = records_to_csv(serial)
    assert records_to_csv(parallel) == text
    back = records_from_csv(text)
    assert back == serial
    assert records_to_csv(back) == text


def test_json_roundtrip():
    records = run_sweep(parse_config(SMALL))
    text = records_to_json(records)
    doc = json.loads(text)
    assert doc["version"] == 1 and doc["columns"] == list(CSV_COLUMNS)
    assert records_from_json(text) == records
    assert doc["summary"] == json.loads(json.dumps(summarize(records)))


def test_csv_rejects_foreign_files():
    with pytest.raises(InvalidInputError):
        records_from_csv("p,n\n1,2\n")
    with pytest.raises(InvalidInputError):
        records_from_csv(CSV_VERSION_LINE + "\np,n\n")


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)
label = st.text(st.characters(blacklist_categories=("Cc", "Cs")), max_size=20)
records = st.builds(
    SweepRecord,
    p=st.sampled_from([2, 3, 5, 101]),
    n=st.integers(2, 4),
    k=st.just(1),
    construction=label,
    seed=st.none() | st.integers(0, 2**64 - 1),
    a_target=st.none() | finite,
    a=st.none() | finite,
    s=finite,
    cardinality=st.integers(0, 10**6),
    exceptional=st.integers(0, 10**4),
    M=st.integers(0, 100),
    main_t=st.none() | finite,
    main_ratio=st.none() | finite,
    falconer_ratio=st.none() | finite,
    falconer_free_ratio=st.none() | finite,
    in_range=st.booleans(),
    status=st.sampled_from(["ok", "failed"]),
    error=label,
)


@settings(max_examples=100, deadline=None)
@given(st.lists(records, max_size=5))
def test_csv_json_roundtrip_property(recs):
    assert records_from_csv(records_to_csv(recs)) == recs
    assert records_from_json(records_to_json(recs)) == recs


def test_summary_slopes():
    def rec(p, e, seed):
        return SweepRecord(p=p, n=2, k=1, construction="random", seed=seed, a_target=1.0, a=1.0, s=0.8, exceptional=e)

    recs = [rec(5, 2, 1), rec(5, 7, 2), rec(7, 3, 1), rec(11, 0, 1), rec(13, 0, 1)]
    (group,) = summarize(recs)["slopes"]
    assert group["points"][0] == [5, 7 / math.log(5)]
    ys = [7 / math.log(5), 3 / math.log(7)]
    want = (math.log(ys[1]) - math.log(ys[0])) / (math.log(7) - math.log(5))
    assert group["slope"] == pytest.approx(want)
    assert group["reference_2s_minus_a"] == pytest.approx(0.6)
    assert group["t"] == pytest.approx(max(1 + 2 * (0.8 - 1.0), 0))
    (lonely,) = summarize([rec(5, 1, 1)])["slopes"]
    assert lonely["slope"] is None
