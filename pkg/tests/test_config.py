import copy

import numpy as np
import pytest
import yaml

from scarcechain.config import (BUNDLED, ConfigError, SweepSpec, build_model, dump_scenario,
                                get_param, load_raw, load_scenario, model_to_dict, parse_scenario,
                                set_param)
from scarcechain.model import validate


@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_scenarios_are_valid(name):
    sc = load_scenario(name)
    assert validate(sc.model) == []
    assert sc.name == name


@pytest.mark.parametrize("name", BUNDLED)
def test_roundtrip(name, tmp_path):
    sc = load_scenario(name)
    path = tmp_path / "s.yaml"
    dump_scenario(sc, path)
    again = load_scenario(path)
    assert again.model == sc.model
    assert again.solver == sc.solver
    assert again.model.name == sc.model.name


def test_serialized_form_is_stable(ex11):
    d1 = model_to_dict(ex11.model)
    d2 = model_to_dict(build_model(copy.deepcopy(d1)))
    assert d1 == d2


def test_wildcards_and_specificity(ex11):
    raw = copy.deepcopy(ex11.raw)
    raw["conversion"] = {"*": 0.9, "i=2": 0.8, "i=2,n=1,j=1,m=1": 0.5}
    model = build_model(raw)
    assert model.conversion[(0, 0, 0, 0)] == 0.9
    assert model.conversion[(1, 1, 0, 0)] == 0.8
    assert model.conversion[(1, 0, 0, 0)] == 0.5


def test_ambiguous_keys_rejected(ex11):
    raw = copy.deepcopy(ex11.raw)
    raw["conversion"] = {"i=1": 0.9, "n=1": 0.8}
    with pytest.raises(ConfigError, match="both match"):
        build_model(raw)


@pytest.mark.parametrize("mutate, where", [
    (lambda r: r.update(colour="red"), "colour"),
    (lambda r: r["costs"].update(owner_cost={}), "owner_cost"),
    (lambda r: r["markets"].update({"j=3": {"intercept": 1, "slope": -1}}), "j=3"),
    (lambda r: r["capacity"].update({"i=0": 5}), "1-based"),
    (lambda r: r["solver"].update(phi=-1), "phi"),
    (lambda r: r["costs"]["producer_txn_cost"].update({"s=1": {"quad": 0.5, "cubic": 1}}), "cubic"),
])
def test_bad_input_is_named(ex11, mutate, where):
    raw = copy.deepcopy(ex11.raw)
    mutate(raw)
    with pytest.raises(ConfigError, match=where):
        parse_scenario(raw)


def test_validation_failure_names_market(ex11):
    raw = copy.deepcopy(ex11.raw)
    raw["markets"]["j=1,k=1"] = {"intercept": 300, "slope": 1.0}
    with pytest.raises(ConfigError, match=r"markets\[1\]\[1\]"):
        parse_scenario(raw)


def test_yaml_error_reports_line(tmp_path):
    p = tmp_path / "bad.yaml"
    p.write_text("name: x\ntopology: {I: 1\nmarkets: {}\n")
    with pytest.raises(ConfigError, match="line"):
        load_raw(p)


def test_general_cost_expression(ex11):
    m = ex11.model
    im = m.index_map
    cost = m.owner_op[(0, 0)]
    X = np.zeros(im.size)
    X[im.pos("q0", (0, 0, 0, 0))] = 2.0
    X[im.pos("q0", (1, 0, 1, 1))] = 3.0
    from scarcechain.model import eval_cost
    assert eval_cost(cost, X) == pytest.approx(2.5 * 4 + 2 * 3 + 2 * 2)


def test_sweep_spec():
    assert SweepSpec.parse("capacity.i=1", "10:100:10").grid == tuple(range(10, 101, 10))
    assert SweepSpec.parse("x", "0,50").grid == (0.0, 50.0)
    with pytest.raises(ConfigError):
        SweepSpec.parse("x", "")
    with pytest.raises(ConfigError):
        SweepSpec.parse("x", "1:2")


def test_param_paths(ex11):
    raw = ex11.raw
    assert get_param(raw, "capacity.i=1") == 1e6
    new = set_param(raw, "policies.owner.i=1.brackets.0.0", 20.0)
    assert get_param(new, "policies.owner.i=1.brackets.0.0") == 20.0
    assert get_param(raw, "policies.owner.i=1.brackets.0.0") == 1e6
    with pytest.raises(ConfigError):
        get_param(raw, "capacity.i=9")
    with pytest.raises(ConfigError):
        get_param(raw, "markets")


def test_bundled_yaml_is_plain_data():
    from scarcechain.config import bundled_path
    for name in BUNDLED:
        with open(bundled_path(name)) as fh:
            assert isinstance(yaml.safe_load(fh), dict)
