import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from troplane.errors import TroplaneError
from troplane.fixtures import equal_speed_divisor, equal_speed_witness, equal_speed_parameters, square_cycle_curve, unit_square_curve
from troplane.intersect import Divisor
from troplane.render import RenderSpec, render_svg
from troplane.serialize import curve_from_json, curve_to_json, divisor_from_json, load_json

from strategies import random_polygon, random_smooth_polynomial


def test_curve_json_shape():
    data = curve_to_json(unit_square_curve())
    assert sorted(data["vertices"]) == [["-1", "-1"], ["1", "1"]]
    assert data["bounded_edges"][0]["len"] == "2"
    assert len(data["rays"]) == 4
    assert set(data) == {"vertices", "bounded_edges", "rays", "newton", "dual"}


@settings(max_examples=30)
@given(st.integers(0, 10**6))
def test_curve_round_trip(seed):
    rng = random.Random(seed)
    found = random_smooth_polynomial(rng, random_polygon(rng, max_points=9))
    if found is None:
        return
    curve = found[1]
    text = json.dumps(curve_to_json(curve))
    assert curve_from_json(json.loads(text)) == curve


def test_inconsistent_curve_rejected():
    data = curve_to_json(square_cycle_curve())
    data["bounded_edges"][0]["len"] = "5"
    with pytest.raises(TroplaneError):
        curve_from_json(data)
    data = curve_to_json(unit_square_curve())
    del data["rays"]
    with pytest.raises(TroplaneError) as err:
        curve_from_json(data)
    assert err.value.code == "PARSE_ERROR"


def test_divisor_round_trip():
    D = Divisor.of({("1/2", "3/4"): 2, (1, 1): -1})
    assert divisor_from_json(json.loads(json.dumps(D.to_json()))) == D
    with pytest.raises(TroplaneError):
        divisor_from_json({"chips": [{"mult": 1}]})


def test_load_json_errors(tmp_path):
    with pytest.raises(TroplaneError) as err:
        load_json(tmp_path / "missing.json")
    assert err.value.code == "IO_ERROR"
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    with pytest.raises(TroplaneError) as err:
        load_json(bad)
    assert err.value.code == "PARSE_ERROR"


def test_svg_is_deterministic_and_complete():
    prm = equal_speed_parameters()
    curve = square_cycle_curve()
    witness = equal_speed_witness(prm["eps"], prm["delta3"], prm["delta4"], prm["R"])
    D = equal_speed_divisor(prm["eps"], prm["delta3"], prm["delta4"])
    a = render_svg([curve, witness], [D])
    b = render_svg([curve, witness], [D])
    assert a == b
    assert a.startswith("<svg") and a.rstrip().endswith("</svg>")
    assert a.count("<circle") == 4
    assert a.count('class="curve"') == 2
    lines = a.count("<line")
    assert lines == sum(len(c.bounded_edges) + len(c.rays) for c in (curve, witness))


def test_svg_coordinates_have_six_decimals():
    svg = render_svg([unit_square_curve()])
    import re

    coords = re.findall(r'(?:x1|y1|x2|y2)="([^"]+)"', svg)
    assert coords and all(re.fullmatch(r"-?\d+\.\d{6}", c) for c in coords)


def test_empty_scene():
    with pytest.raises(TroplaneError) as err:
        render_svg([])
    assert err.value.code == "EMPTY_SCENE"
    with pytest.raises(TroplaneError):
        RenderSpec(viewport=(0, 0, 0, 1))
    fixed = render_svg([unit_square_curve()], spec=RenderSpec(viewport=(-3, -3, 3, 3)))
    assert "<line" in fixed
