import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stereobench.budget import (
    MACS_LIMIT,
    PARAM_LIMIT,
    GraphDescriptor,
    InputSpec,
    check_budget,
    count_macs,
    count_params,
    format_verdict,
    load_graph,
    parse_graph,
    verdict_from_totals,
)
from stereobench.errors import ParseError, ShapeError


def graph(layers, inp=None):
    doc = {"layers": layers}
    if inp:
        doc["input"] = inp
    return parse_graph(json.dumps(doc))


CONV48 = {"op": "conv2d", "in_ch": 48, "out_ch": 48, "k": 3}


# -------------------------------------------------------------- parsing


def test_single_conv_shape():
    g = graph([{"op": "conv2d", "in_ch": 3, "out_ch": 48, "k": 3}])
    assert g.shapes == [(180, 320, 48)]
    assert g.input == InputSpec()


def test_channel_mismatch_names_the_layer():
    with pytest.raises(ShapeError, match="layer 1"):
        graph(
            [
                {"op": "conv2d", "in_ch": 3, "out_ch": 48, "k": 3},
                {"op": "conv2d", "in_ch": 64, "out_ch": 48, "k": 3},
            ]
        )


def test_repeat_expansion():
    g = graph([{"op": "repeat", "count": 20, "layers": [CONV48]}], inp={"channels": 48})
    assert len(g.layers) == 20
    assert all(type(l).__name__ == "Conv2d" for l in g.layers)


def test_nested_repeat():
    block = {"op": "repeat", "count": 2, "layers": [CONV48]}
    g = graph([{"op": "repeat", "count": 3, "layers": [block]}], inp={"channels": 48})
    assert len(g.layers) == 6


def test_malformed_json():
    with pytest.raises(ParseError, match="JSON"):
        parse_graph("{not json")


@pytest.mark.parametrize(
    "doc",
    [
        "[]",
        '{"layers": []}',
        '{"layers": [{"op": "warp"}]}',
        '{"layers": [{"op": "conv2d", "in_ch": 0, "out_ch": 4}]}',
        '{"layers": [{"op": "conv2d", "in_ch": 3, "out_ch": 4, "k": [1, 2, 3]}]}',
        '{"layers": [{"op": "repeat", "count": 2, "layers": []}]}',
        '{"input": {"height": -1}, "layers": [{"op": "norm", "channels": 3}]}',
        '{"input": {"bogus": 1}, "layers": [{"op": "norm", "channels": 3}]}',
    ],
)
def test_schema_violations(doc):
    with pytest.raises(ParseError):
        parse_graph(doc)


def test_groups_must_divide_channels():
    with pytest.raises(ParseError, match="groups"):
        graph([{"op": "conv2d", "in_ch": 48, "out_ch": 48, "k": 3, "groups": 5}])


def test_load_graph(tmp_path):
    p = tmp_path / "g.json"
    p.write_text(json.dumps({"layers": [{"op": "norm", "channels": 3}]}))
    assert count_params(load_graph(p)) == 6


# ------------------------------------------------------------ parameters


def test_conv_params_worked_example():
    g = graph([CONV48], inp={"channels": 48})
    assert count_params(g) == 48 * 48 * 9 + 48  # 20,784
    assert count_params(g) == 20_784


def test_depthwise_conv_params():
    g = graph(
        [{"op": "conv2d", "in_ch": 48, "out_ch": 48, "k": 3, "groups": 48}],
        inp={"channels": 48},
    )
    assert count_params(g) == 48 * 1 * 9 + 48  # 480


def test_conv_params_without_bias():
    g = graph([{**CONV48, "bias": False}], inp={"channels": 48})
    assert count_params(g) == 48 * 48 * 9


def test_linear_and_norm_params():
    g = graph(
        [{"op": "norm", "channels": 48}, {"op": "linear", "in_features": 48, "out_features": 12}],
        inp={"channels": 48},
    )
    assert count_params(g) == 2 * 48 + (48 * 12 + 12)


def test_zero_param_ops():
    g = graph(
        [
            {"op": "pixel_shuffle", "r": 2},
            {"op": "elementwise", "kind": "relu"},
        ],
        inp={"channels": 48},
    )
    assert count_params(g) == 0


def test_row_attention_params():
    g = graph([{"op": "row_attention", "channels": 64}], inp={"channels": 64})
    assert count_params(g) == 4 * 64 * 64 + 4 * 64


# ------------------------------------------------------------------ MACs


def test_conv_macs_worked_example():
    # both views of a 180x320 input share the weights but each costs MACs
    g = graph([CONV48], inp={"channels": 48})
    assert count_macs(g) == 2 * 180 * 320 * 48 * 48 * 9
    assert count_macs(g) == 2_388_787_200


def test_conv_macs_exclude_bias():
    with_bias = graph([CONV48], inp={"channels": 48})
    without = graph([{**CONV48, "bias": False}], inp={"channels": 48})
    assert count_macs(with_bias) == count_macs(without)


def test_linear_macs_per_position():
    g = graph(
        [{"op": "linear", "in_features": 3, "out_features": 7}],
        inp={"height": 10, "width": 20},
    )
    assert count_macs(g) == 2 * 10 * 20 * 3 * 7


def test_row_attention_macs_counted_once_per_pair():
    h, w, c = 12, 30, 16
    g = graph(
        [{"op": "row_attention", "channels": c}],
        inp={"height": h, "width": w, "channels": c},
    )
    assert count_macs(g) == 4 * h * w * c * c + 2 * h * w * w * c


def test_zero_mac_ops():
    g = graph(
        [
            {"op": "norm", "channels": 48},
            {"op": "elementwise", "kind": "relu"},
            {"op": "pixel_shuffle", "r": 4},
        ],
        inp={"channels": 48},
    )
    assert count_macs(g) == 0


def test_pixel_shuffle_rescales_downstream_macs():
    g = graph(
        [
            {"op": "pixel_shuffle", "r": 2},
            {"op": "conv2d", "in_ch": 12, "out_ch": 8, "k": 1},
        ],
        inp={"height": 16, "width": 16, "channels": 48},
    )
    assert g.shapes == [(32, 32, 12), (32, 32, 8)]
    assert count_macs(g) == 2 * 32 * 32 * 8 * 12


def test_strided_conv_macs_use_output_size():
    g = graph(
        [{"op": "conv2d", "in_ch": 3, "out_ch": 4, "k": 3, "stride": 2}],
        inp={"height": 16, "width": 16},
    )
    assert g.shapes == [(8, 8, 4)]
    assert count_macs(g) == 2 * 8 * 8 * 4 * 3 * 9


def test_macs_at_explicit_input():
    g = graph([{"op": "conv2d", "in_ch": 3, "out_ch": 4, "k": 1}])
    halved = count_macs(g, InputSpec(height=90, width=160))
    assert count_macs(g) == 4 * halved


@given(st.integers(1, 64), st.integers(1, 64), st.integers(1, 5))
@settings(max_examples=40, deadline=None)
def test_conv_macs_equal_params_times_sites(out_ch, in_ch, k):
    # with same padding and stride 1, macs == weight count x output sites x views
    g = graph(
        [{"op": "conv2d", "in_ch": in_ch, "out_ch": out_ch, "k": k, "bias": False}],
        inp={"height": 9, "width": 13, "channels": in_ch},
    )
    assert count_macs(g) == count_params(g) * 9 * 13 * 2


# --------------------------------------------------------------- verdicts


def test_limits():
    assert PARAM_LIMIT == 1_000_000
    assert MACS_LIMIT == 400 * 10**9


def test_verdict_pass():
    v = verdict_from_totals(918_000, 235_280_000_000)
    assert v.ok and v.params_ok and v.macs_ok
    text = format_verdict(v)
    assert "params: 0.918M PASS" in text
    assert "macs:   235.280G PASS" in text


def test_verdict_boundaries():
    assert verdict_from_totals(PARAM_LIMIT, MACS_LIMIT).ok
    over_p = verdict_from_totals(PARAM_LIMIT + 1, 0)
    assert not over_p.params_ok and over_p.macs_ok and not over_p.ok
    over_m = verdict_from_totals(0, MACS_LIMIT + 1)
    assert over_m.params_ok and not over_m.macs_ok and not over_m.ok
    assert "FAIL" in format_verdict(over_p)


def test_check_budget_breakdown():
    g = graph(
        [
            {"op": "conv2d", "in_ch": 3, "out_ch": 48, "k": 3},
            CONV48,
            {"op": "norm", "channels": 48},
        ]
    )
    v = check_budget(g)
    assert v.total_params == count_params(g)
    assert v.total_macs == count_macs(g)
    assert len(v.per_layer) == 3
    macs_col = [row[3] for row in v.per_layer]
    assert macs_col == sorted(macs_col, reverse=True)
    assert sum(macs_col) == v.total_macs
    assert "top layers by MACs:" in format_verdict(v)


def test_realistic_graph_within_budget():
    body = {"op": "repeat", "count": 16, "layers": [CONV48, {"op": "elementwise"}]}
    g = graph(
        [
            {"op": "conv2d", "in_ch": 3, "out_ch": 48, "k": 3},
            body,
            {"op": "row_attention", "channels": 48},
            {"op": "conv2d", "in_ch": 48, "out_ch": 48, "k": 3},
            {"op": "linear", "in_features": 48, "out_features": 48},
        ]
    )
    v = check_budget(g)
    assert v.ok
    assert v.total_params < PARAM_LIMIT
    assert v.total_macs < MACS_LIMIT
