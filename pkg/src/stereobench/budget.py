"""Parameter and MAC accounting for efficient-track entries.

A model is declared as a JSON graph:

    {
      "input": {"height": 180, "width": 320, "views": 2, "channels": 3},
      "layers": [
        {"op": "conv2d", "in_ch": 3, "out_ch": 48, "k": 3},
        {"op": "repeat", "count": 8, "layers": [ ... ]},
        ...
      ]
    }

MACs are multiply-accumulates (one MAC = one multiply + one add); per-view
layers count once per view, while cross-view attention counts once per pair.
Conventions:

  conv2d         params out*(in/groups)*kh*kw (+out bias)
                 macs   H_out*W_out*out*(in/groups)*kh*kw per view
  linear         applied per spatial position: params in*out (+out),
                 macs H*W*in*out per view
  norm           2*C params, 0 macs
  pixel_shuffle  0 params, 0 macs; reshapes (H,W,C) -> (rH, rW, C/r^2)
  elementwise    0 params, 0 macs
  row_attention  stereo cross-attention over rows: 4*C*C (+4*C) params,
                 macs 4*H*W*C^2 + 2*H*W^2*C counted once for the pair

The challenge limits live in exactly one place: PARAM_LIMIT and MACS_LIMIT,
evaluated at the 320x180 stereo input.  Bias terms count as parameters but
add no MACs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ParseError, ShapeError

PARAM_LIMIT = 1_000_000          # "1 M parameters"
MACS_LIMIT = 400 * 10 ** 9       # "400 G MACs" at the reference input

REFERENCE_INPUT = {"height": 180, "width": 320, "views": 2, "channels": 3}


@dataclass(frozen=True)
class InputSpec:
    height: int = 180
    width: int = 320
    views: int = 2
    channels: int = 3

    def __post_init__(self):
        for name in ("height", "width", "views", "channels"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise ParseError(f"input.{name} must be a positive integer, got {v!r}")


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ParseError(msg)


def _pos_int(spec: dict, key: str, default=None) -> int:
    v = spec.get(key, default)
    _require(isinstance(v, int) and v >= 1, f"{spec.get('op')}: {key} must be a positive integer")
    return v


@dataclass(frozen=True)
class Conv2d:
    in_ch: int
    out_ch: int
    kernel_h: int
    kernel_w: int
    stride: int = 1
    padding: int | str = "same"
    groups: int = 1
    bias: bool = True
    cross_view = False

    def validate(self) -> None:
        if self.in_ch % self.groups or self.out_ch % self.groups:
            raise ParseError(
                f"conv2d: groups={self.groups} must divide in_ch={self.in_ch} and out_ch={self.out_ch}"
            )
        if self.padding != "same" and (not isinstance(self.padding, int) or self.padding < 0):
            raise ParseError("conv2d: padding must be 'same' or a non-negative int")

    def out_shape(self, h: int, w: int, c: int) -> tuple[int, int, int]:
        if c != self.in_ch:
            raise ShapeError(f"conv2d expects {self.in_ch} input channels, got {c}")
        if self.padding == "same":
            oh = -(-h // self.stride)
            ow = -(-w // self.stride)
        else:
            oh = (h + 2 * self.padding - self.kernel_h) // self.stride + 1
            ow = (w + 2 * self.padding - self.kernel_w) // self.stride + 1
        if oh < 1 or ow < 1:
            raise ShapeError(f"conv2d output would be empty ({oh}x{ow})")
        return oh, ow, self.out_ch

    def params(self) -> int:
        p = self.out_ch * (self.in_ch // self.groups) * self.kernel_h * self.kernel_w
        return p + (self.out_ch if self.bias else 0)

    def macs(self, h: int, w: int, c: int) -> int:
        oh, ow, _ = self.out_shape(h, w, c)
        return oh * ow * self.out_ch * (self.in_ch // self.groups) * self.kernel_h * self.kernel_w


@dataclass(frozen=True)
class Linear:
    in_features: int
    out_features: int
    bias: bool = True
    cross_view = False

    def validate(self) -> None:
        pass

    def out_shape(self, h, w, c):
        if c != self.in_features:
            raise ShapeError(f"linear expects {self.in_features} input channels, got {c}")
        return h, w, self.out_features

    def params(self) -> int:
        return self.in_features * self.out_features + (self.out_features if self.bias else 0)

    def macs(self, h, w, c) -> int:
        return h * w * self.in_features * self.out_features


@dataclass(frozen=True)
class Norm:
    channels: int
    cross_view = False

    def validate(self) -> None:
        pass

    def out_shape(self, h, w, c):
        if c != self.channels:
            raise ShapeError(f"norm expects {self.channels} channels, got {c}")
        return h, w, c

    def params(self) -> int:
        return 2 * self.channels

    def macs(self, h, w, c) -> int:
        return 0


@dataclass(frozen=True)
class PixelShuffle:
    r: int
    cross_view = False

    def validate(self) -> None:
        if self.r < 1:
            raise ParseError(f"pixel_shuffle: r must be >= 1, got {self.r}")

    def out_shape(self, h, w, c):
        if c % (self.r * self.r):
            raise ShapeError(f"pixel_shuffle: channels {c} not divisible by r^2={self.r * self.r}")
        return h * self.r, w * self.r, c // (self.r * self.r)

    def params(self) -> int:
        return 0

    def macs(self, h, w, c) -> int:
        return 0


@dataclass(frozen=True)
class Elementwise:
    kind: str = "relu"
    cross_view = False

    def validate(self) -> None:
        pass

    def out_shape(self, h, w, c):
        return h, w, c

    def params(self) -> int:
        return 0

    def macs(self, h, w, c) -> int:
        return 0


@dataclass(frozen=True)
class RowAttention:
    """Row-wise stereo cross-attention block (Q/K/2xV projections + gates)."""

    channels: int
    bias: bool = True
    cross_view = True

    def validate(self) -> None:
        pass

    def out_shape(self, h, w, c):
        if c != self.channels:
            raise ShapeError(f"row_attention expects {self.channels} channels, got {c}")
        return h, w, c

    def params(self) -> int:
        # four CxC projections (query, key, one value per view) plus per-view
        # channel gates and the two affine norms
        p = 4 * self.channels * self.channels
        return p + (4 * self.channels if self.bias else 0)

    def macs(self, h, w, c) -> int:
        # projections on both views: 4 * H*W*C^2; score and warp matmuls
        # per row: 2 * H*W^2*C for the pair
        return 4 * h * w * c * c + 2 * h * w * w * c


_OPS = frozenset(
    {"conv2d", "linear", "norm", "pixel_shuffle", "elementwise", "row_attention", "repeat"}
)


def _parse_layer(spec: dict, out: list) -> None:
    _require(isinstance(spec, dict), f"layer must be an object, got {type(spec).__name__}")
    op = spec.get("op")
    _require(op in _OPS, f"unknown op {op!r}")
    if op == "repeat":
        count = _pos_int(spec, "count")
        inner = spec.get("layers")
        _require(isinstance(inner, list) and inner, "repeat: layers must be a non-empty list")
        for _ in range(count):
            for s in inner:
                _parse_layer(s, out)
        return
    if op == "conv2d":
        k = spec.get("k", spec.get("kernel", 3))
        if isinstance(k, int):
            kh = kw = k
        elif isinstance(k, (list, tuple)) and len(k) == 2:
            kh, kw = int(k[0]), int(k[1])
        else:
            raise ParseError(f"conv2d: k must be an int or [kh, kw], got {k!r}")
        layer = Conv2d(
            in_ch=_pos_int(spec, "in_ch"),
            out_ch=_pos_int(spec, "out_ch"),
            kernel_h=kh,
            kernel_w=kw,
            stride=_pos_int(spec, "stride", 1),
            padding=spec.get("padding", "same"),
            groups=_pos_int(spec, "groups", 1),
            bias=bool(spec.get("bias", True)),
        )
    elif op == "linear":
        layer = Linear(
            in_features=_pos_int(spec, "in_features"),
            out_features=_pos_int(spec, "out_features"),
            bias=bool(spec.get("bias", True)),
        )
    elif op == "norm":
        layer = Norm(channels=_pos_int(spec, "channels"))
    elif op == "pixel_shuffle":
        layer = PixelShuffle(r=_pos_int(spec, "r"))
    elif op == "elementwise":
        layer = Elementwise(kind=str(spec.get("kind", "relu")))
    else:  # row_attention
        layer = RowAttention(
            channels=_pos_int(spec, "channels"),
            bias=bool(spec.get("bias", True)),
        )
    layer.validate()
    out.append(layer)


@dataclass
class GraphDescriptor:
    input: InputSpec
    layers: list
    shapes: list = field(default_factory=list)  # (h, w, c) after each layer

    def propagate(self, inp: InputSpec | None = None) -> list:
        """Shapes after each layer for the given (default: declared) input."""
        inp = inp or self.input
        h, w, c = inp.height, inp.width, inp.channels
        shapes = []
        for i, layer in enumerate(self.layers):
            try:
                h, w, c = layer.out_shape(h, w, c)
            except ShapeError as e:
                raise ShapeError(f"layer {i}: {e}") from None
            shapes.append((h, w, c))
        return shapes


def parse_graph(text: str) -> GraphDescriptor:
    """Parse and validate a JSON graph; repeat groups are expanded."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"graph is not valid JSON: {e}") from None
    _require(isinstance(doc, dict), "graph must be a JSON object")
    inp_spec = doc.get("input", {})
    _require(isinstance(inp_spec, dict), "input must be an object")
    try:
        inp = InputSpec(**{**REFERENCE_INPUT, **inp_spec})
    except TypeError as e:
        raise ParseError(f"bad input spec: {e}") from None
    layers_spec = doc.get("layers")
    _require(isinstance(layers_spec, list) and layers_spec, "layers must be a non-empty list")
    layers: list = []
    for spec in layers_spec:
        _parse_layer(spec, layers)
    g = GraphDescriptor(input=inp, layers=layers)
    g.shapes = g.propagate()
    return g


def load_graph(path: str | Path) -> GraphDescriptor:
    with open(path) as f:
        return parse_graph(f.read())


def count_params(graph: GraphDescriptor) -> int:
    """Total learnable parameters (weights are shared across views)."""
    return sum(layer.params() for layer in graph.layers)


def count_macs(graph: GraphDescriptor, inp: InputSpec | None = None) -> int:
    """Total MACs for one stereo input at the given (default declared) size."""
    inp = inp or graph.input
    h, w, c = inp.height, inp.width, inp.channels
    total = 0
    for i, layer in enumerate(graph.layers):
        per_apply = layer.macs(h, w, c)
        total += per_apply if layer.cross_view else per_apply * inp.views
        h, w, c = layer.out_shape(h, w, c)
    return total


@dataclass(frozen=True)
class BudgetVerdict:
    total_params: int
    total_macs: int
    param_limit: int = PARAM_LIMIT
    macs_limit: int = MACS_LIMIT
    per_layer: tuple = ()

    @property
    def params_ok(self) -> bool:
        return self.total_params <= self.param_limit

    @property
    def macs_ok(self) -> bool:
        return self.total_macs <= self.macs_limit

    @property
    def ok(self) -> bool:
        return self.params_ok and self.macs_ok


def verdict_from_totals(total_params: int, total_macs: int) -> BudgetVerdict:
    """Check externally reported totals against the challenge limits."""
    return BudgetVerdict(int(total_params), int(total_macs))


def check_budget(graph: GraphDescriptor, inp: InputSpec | None = None) -> BudgetVerdict:
    inp = inp or graph.input
    h, w, c = inp.height, inp.width, inp.channels
    rows = []
    total_macs = 0
    for i, layer in enumerate(graph.layers):
        per_apply = layer.macs(h, w, c)
        macs = per_apply if layer.cross_view else per_apply * inp.views
        rows.append((i, type(layer).__name__, layer.params(), macs))
        total_macs += macs
        h, w, c = layer.out_shape(h, w, c)
    rows.sort(key=lambda r: -r[3])
    return BudgetVerdict(
        total_params=count_params(graph),
        total_macs=total_macs,
        per_layer=tuple(rows),
    )


def format_verdict(verdict: BudgetVerdict, top: int = 10) -> str:
    lines = [
        f"params: {verdict.total_params / 1e6:.3f}M "
        f"{'PASS' if verdict.params_ok else 'FAIL'} "
        f"({verdict.total_params:,} of {verdict.param_limit:,})",
        f"macs:   {verdict.total_macs / 1e9:.3f}G "
        f"{'PASS' if verdict.macs_ok else 'FAIL'} "
        f"({verdict.total_macs:,} of {verdict.macs_limit:,})",
    ]
    if verdict.per_layer:
        lines.append("top layers by MACs:")
        for i, name, params, macs in verdict.per_layer[:top]:
            lines.append(f"  layer {i:3d} {name:<14} params {params:>10,}  macs {macs:>16,}")
    return "\n".join(lines)
