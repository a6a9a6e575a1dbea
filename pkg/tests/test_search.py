import pytest

from selfdual.codes import ExtensionError, four_circulant_code
from selfdual.rings import Ring, parse_element, parse_vector
from selfdual.search import (
    DeepRequired,
    classify_four_circulant_f4,
    extension_search,
    lift_search,
    projected_seconds,
    quick_reject,
    reproduce_table,
    verify_row,
)
from selfdual.tables import SLUGS, load_table, resolve_table_id, table_ids
from selfdual.specfile import SpecError

SEEDS = ["C1", "C2", "C3", "C4", "C5"]


def seeds_of(code):
    return code.provenance["rA"], code.provenance["rB"]


@pytest.fixture(scope="module")
def classified():
    return [seeds_of(c) for c in classify_four_circulant_f4(4, 6)]


def test_classify_contains_table_seeds(lib, classified):
    found = set(classified)
    for name in SEEDS:
        assert seeds_of(lib.build(name)) in found
    # candidates come out in lexicographic payload order of (rA, rB)
    keys = [tuple(parse_vector(a, Ring.F4).data) + tuple(parse_vector(b, Ring.F4).data) for a, b in classified]
    assert keys == sorted(keys)


def test_classify_distance_filter(lib, classified):
    strict = {seeds_of(c) for c in classify_four_circulant_f4(4, 8)}
    assert seeds_of(lib.build("C1")) in strict
    assert seeds_of(lib.build("C2")) not in strict
    assert strict < set(classified)


def test_classify_small_and_bounds():
    pairs = [seeds_of(c) for c in classify_four_circulant_f4(1, 1)]
    assert ("(1)", "(0)") in pairs and ("(0)", "(1)") in pairs
    assert pairs == [seeds_of(c) for c in classify_four_circulant_f4(1, 1, jobs=2)]
    with pytest.raises(ValueError):
        classify_four_circulant_f4(0, 1)
    with pytest.raises(ValueError):
        classify_four_circulant_f4(7, 1)


@pytest.mark.parametrize("name", ["J1", "J2", "K1"])
def test_directed_lift_search_finds_table_codes(lib, name):
    beta = next(r.expect["beta"] for r in load_table(2).rows if r.label == name)
    L = lib.build(name)
    base = lib.build(L.provenance["base"]["name"])
    rA = parse_vector(L.provenance["rA"], Ring.F4uF4)
    rB = parse_vector(L.provenance["rB"], Ring.F4uF4)
    rep = lift_search(base, 12, mode="directed", candidates=[(rA, rB)])
    assert rep.candidates_examined == 1 and len(rep.hits) == 1
    hit = rep.hits[0]
    assert hit.d == 12 and hit.code_type == "TypeI"
    assert hit.enumerator.family == "W64_2" and hit.enumerator.beta == beta


def test_lift_search_is_deterministic(lib):
    C1 = lib.build("C1")
    a = lift_search(C1, 12, mode="random", budget=25, seed=11).to_dict()
    b = lift_search(C1, 12, mode="random", budget=25, seed=11, jobs=2).to_dict()
    assert a == b
    assert a["candidates_examined"] == 25
    assert sum(a["skipped"].values()) + len(a["hits"]) == 25
    c = lift_search(C1, 12, mode="exhaustive", budget=10).to_dict()
    assert [h["index"] for h in c["hits"]] == sorted(h["index"] for h in c["hits"])


def test_lift_search_infeasible_and_errors(lib):
    rep = lift_search(lib.build("C2"), 14, mode="random", budget=5, seed=1)
    assert rep.candidates_examined == 0 and rep.hits == []
    assert "infeasible" in rep.notes[0]
    with pytest.raises(ValueError):
        lift_search(lib.build("C1"), 12, mode="random", budget=5)
    with pytest.raises(ValueError):
        lift_search(lib.build("C1"), 12, mode="directed")
    bad = four_circulant_code(parse_vector("(1,1)", Ring.F2), parse_vector("(0,0)", Ring.F2))
    with pytest.raises(ExtensionError):
        lift_search(bad, 4, mode="random", budget=1, seed=0)


def test_extension_search(lib):
    base = lib.build("psi_L3")
    a = extension_search(base, "A", seed=5, budget=6)
    b = extension_search(base, "A", seed=5, budget=6, jobs=2)
    assert a.to_dict() == b.to_dict()
    assert a.candidates_examined == 6
    for hit in a.hits:
        assert hit.d == 12 and hit.enumerator.matched
    with pytest.raises(ValueError):
        extension_search(base, "A", budget=1)


def test_extension_search_c64_hits_extremal(lib):
    one = parse_element("1", Ring.F2uF2)
    rep = extension_search(lib.build("C64"), "B", c_set=[one], seed=2, budget=40)
    d = rep.to_dict()
    assert d["candidates_examined"] == 40
    for hit in d["hits"]:
        assert hit["d"] == 12 and hit["provenance"]["c"] == "1"
        assert hit["enumerator"]["family"] in ("W68_1", "W68_2")


def test_quick_reject_and_projection(lib):
    image = lib.build("C2").binary_image()
    assert quick_reject(image, 8) == 6
    assert quick_reject(lib.build("C1").binary_image(), 8) is None
    assert projected_seconds(lib.build("J1").binary_image()) > projected_seconds(image)


# --------------------------------------------------------------------------
# tables


def test_table_registry():
    assert table_ids() == list(range(1, 13))
    assert resolve_table_id("extB") == 8 and resolve_table_id("9") == 9
    assert set(SLUGS) >= {"fourcirc", "64codes", "gamma0", "new96"}
    with pytest.raises(SpecError):
        resolve_table_id("nope")
    with pytest.raises(SpecError):
        resolve_table_id(0)


@pytest.mark.parametrize("tid,count", [(1, 5), (2, 19), (3, 16), (4, 30), (5, 43), (6, 34), (7, 21), (8, 22),
                                       (9, 13), (10, 7), (11, 24), (12, 10)])
def test_table_row_counts(tid, count):
    assert len(load_table(tid).rows) == count


def test_flagged_rows():
    flagged = {(t, r.label): r.flags for t in table_ids() for r in load_table(t).rows if r.flagged}
    assert set(flagged) == {(2, "M3"), (5, "K3_40"), (6, "M3_18"), (12, "L96_2")}


def test_verify_flagged_row_reports_status():
    row = next(r for r in load_table(5).rows if r.label == "K3_40")
    out = verify_row(row)
    assert out["status"] == "flagged" and "bad-X" in out["error"]


def test_reproduce_seed_table():
    rep = reproduce_table(1)
    assert rep["ok"] and rep["summary"]["pass"] == 5


def test_reproduce_reports_duplicates():
    rep = reproduce_table("64codes", labels=["M1", "M3"])
    assert rep["ok"]
    assert {"kind": "duplicate-row", "row": "M3", "same_as": "M1"} in rep["anomalies"]


def test_reproduce_deep_tables_need_flag():
    for table in ("new80", "new96"):
        with pytest.raises(DeepRequired) as exc:
            reproduce_table(table)
        assert exc.value.seconds > 0
