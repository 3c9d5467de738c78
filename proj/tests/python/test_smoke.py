import pytest

import cusp_tower as ct


def test_units():
    u = ct.fundamental_unit(2)
    assert u["text"] == "1+√2"
    assert u["norm"] == -1
    assert u["eps_squared"] == "1+2ε"
    assert ct.fundamental_unit(13)["text"] == "(3+√13)/2"


def test_levels_n2():
    rows = ct.levels(2)
    assert [r["level"] for r in rows] == ["1", "ε", "ε^2", "ε^3", "ε^4"]
    assert rows[-1]["k_squared"] == "577+408√2"


def test_slice_level_one():
    s = ct.slice(5)
    assert s["shape"] == "hexagon"
    assert len(s["vertices"]) == 6
    assert s["area_squared"] == "5"
    r = ct.slice(2, "1")
    assert r["shape"] == "parallelogram"
    assert sorted(r["sides"]) == ["1", "√2"]


def test_tower_dict():
    t = ct.tower(3)
    assert t["schema_version"] == "1"
    assert t["n"] == 3
    assert len(t["events"]) == 7


def test_mesh_and_verify():
    verts, faces = ct.mesh(2, 2)
    assert all(0.0 <= v[2] <= 4.0 for v in verts)
    assert all(max(f) < len(verts) for f in faces)
    r = ct.verify(5, 1)
    assert r["ok"] and not r["mismatches"]


def test_errors():
    with pytest.raises(ct.CuspError, match="NotSquarefree"):
        ct.fundamental_unit(12)
    with pytest.raises(ValueError):
        ct.slice(2, "-1")
