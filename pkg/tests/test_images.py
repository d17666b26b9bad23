import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from stereobench.errors import (
    DimensionMismatch,
    EmptyResult,
    MissingView,
    UnsupportedFormat,
)
from stereobench.images import (
    SceneId,
    StereoPair,
    crop_to_multiple,
    list_scenes,
    load_image,
    load_stereo_pair,
    quantize8,
    save_image,
    to_float,
)

from conftest import natural_image8, write_scene
from oracles import png_read_reference, png_write_reference


# --- quantisation ---------------------------------------------------------

def test_endpoint_roundtrip():
    img = np.full((2, 2, 3), 255, np.uint8)
    assert to_float(img).max() == 1.0
    assert quantize8(to_float(img)).max() == 255


def test_half_rounds_away_from_zero():
    # 0.5 * 255 = 127.5 -> 128
    img = np.full((1, 1, 3), 0.5)
    assert quantize8(img)[0, 0, 0] == 128


def test_clamp_above_one():
    img = np.full((1, 1, 3), 1.7)
    assert quantize8(img)[0, 0, 0] == 255


def test_clamp_below_zero():
    img = np.full((1, 1, 3), -0.3)
    assert quantize8(img)[0, 0, 0] == 0


@given(hnp.arrays(np.uint8, (4, 5, 3)))
@settings(max_examples=100, deadline=None)
def test_quantize_of_to_float_is_identity(img8):
    assert np.array_equal(quantize8(to_float(img8)), img8)


@given(st.floats(min_value=-1.0, max_value=2.0, allow_nan=False))
@settings(max_examples=200, deadline=None)
def test_quantize_matches_scalar_reference(v):
    from oracles import quantize_reference

    img = np.full((1, 1, 3), v)
    assert int(quantize8(img)[0, 0, 0]) == quantize_reference(v)


# --- PNG io ----------------------------------------------------------------

def test_black_png_roundtrip(tmp_path):
    img = np.zeros((2, 2, 3), np.uint8)
    save_image(img, tmp_path / "z.png")
    assert np.array_equal(load_image(tmp_path / "z.png"), img)


def test_single_pixel_independent_codec(tmp_path):
    # written by the reference codec, read by the production loader
    img = np.array([[[255, 128, 0]]], dtype=np.uint8)
    png_write_reference(tmp_path / "p.png", img)
    assert np.array_equal(load_image(tmp_path / "p.png"), img)


def test_save_decodable_by_external_reader(tmp_path):
    img = natural_image8(48, 64, seed=3)
    save_image(img, tmp_path / "n.png")
    assert np.array_equal(png_read_reference(tmp_path / "n.png"), img)


def test_sixteen_bit_png_rejected(tmp_path):
    img16 = np.full((4, 4, 3), 40_000, np.uint32)
    png_write_reference(tmp_path / "deep.png", img16, bit_depth=16)
    with pytest.raises(UnsupportedFormat):
        load_image(tmp_path / "deep.png")


def test_non_png_rejected(tmp_path):
    (tmp_path / "fake.png").write_bytes(b"\xff\xd8\xff\xe0 not a png")
    with pytest.raises(UnsupportedFormat):
        load_image(tmp_path / "fake.png")


def test_missing_file_raises_builtin(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_image(tmp_path / "absent.png")


def test_save_empty_rejected(tmp_path):
    with pytest.raises(EmptyResult):
        save_image(np.zeros((0, 4, 3), np.uint8), tmp_path / "e.png")


# --- stereo pairs and layout ------------------------------------------------

def test_load_stereo_pair(tmp_path):
    left = natural_image8(90, 160, seed=1)
    right = natural_image8(90, 160, seed=2)
    write_scene(tmp_path, "0001", left, right)
    pair = load_stereo_pair(tmp_path, "0001")
    assert pair.shape == (90, 160, 3)
    assert np.array_equal(quantize8(pair.left), left)


def test_missing_view(tmp_path):
    save_image(natural_image8(16, 16, 0), tmp_path / "0001_L.png")
    with pytest.raises(MissingView, match="0001_R"):
        load_stereo_pair(tmp_path, "0001")


def test_view_dim_mismatch(tmp_path):
    save_image(natural_image8(90, 160, 0), tmp_path / "0001_L.png")
    save_image(natural_image8(92, 160, 0), tmp_path / "0001_R.png")
    with pytest.raises(DimensionMismatch):
        load_stereo_pair(tmp_path, "0001")


def test_pair_shape_validation():
    with pytest.raises(DimensionMismatch):
        StereoPair(np.zeros((4, 4, 3)), np.zeros((4, 5, 3)))


def test_scene_id_roundtrip():
    sid = SceneId(index=42)
    assert sid.stem == "0042"
    assert SceneId.parse("0042") == sid
    with pytest.raises(ValueError):
        SceneId.parse("abc")


def test_list_scenes(tmp_path):
    for i in (3, 1, 2):
        write_scene(tmp_path, f"{i:04d}", natural_image8(16, 16, i), natural_image8(16, 16, i))
    assert list_scenes(tmp_path) == ["0001", "0002", "0003"]


# --- crop_to_multiple --------------------------------------------------------

def test_crop_to_multiple():
    img = np.zeros((181, 321, 3))
    assert crop_to_multiple(img, 4).shape == (180, 320, 3)


def test_crop_noop_when_divisible():
    img = natural_image8(180, 320, 0)
    assert np.array_equal(crop_to_multiple(img, 4), img)


def test_crop_empty():
    with pytest.raises(EmptyResult):
        crop_to_multiple(np.zeros((3, 3, 3)), 4)


@given(
    h=st.integers(1, 50), w=st.integers(1, 50), s=st.integers(1, 8)
)
@settings(max_examples=100, deadline=None)
def test_crop_divisibility_property(h, w, s):
    if h < s or w < s:
        return
    out = crop_to_multiple(np.zeros((h, w, 3)), s)
    assert out.shape[0] % s == 0 and out.shape[1] % s == 0
    assert out.shape[0] > h - s and out.shape[1] > w - s
