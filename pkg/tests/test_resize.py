import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stereobench.errors import EmptyResult
from stereobench.resize import bicubic_resize, keys_cubic, resize_adjoint, resize_weights

from conftest import natural_image
from oracles import resize_reference


def test_kernel_values():
    # closed-form points of the a = -0.5 cubic
    assert keys_cubic(0.0) == 1.0
    assert keys_cubic(1.0) == 0.0
    assert keys_cubic(2.0) == 0.0
    assert np.isclose(keys_cubic(0.5), 0.5625)   # 1.5/8 - 2.5/4 + 1
    assert np.isclose(keys_cubic(1.5), -0.0625)  # -0.5*3.375 + 2.5*2.25 - 6 + 2
    assert keys_cubic(2.5) == 0.0


def test_rows_sum_to_one():
    for n_in, n_out, aa in ((64, 16, True), (64, 16, False), (16, 64, True), (7, 13, False)):
        w = resize_weights(n_in, n_out, antialias=aa)
        assert np.max(np.abs(w.sum(axis=1) - 1.0)) < 1e-12


def test_identity_resize_exact():
    img = natural_image(24, 31, seed=5)
    out = bicubic_resize(img, 24, 31)
    assert np.max(np.abs(out - img)) < 1e-12


@given(
    c=st.floats(min_value=-2.0, max_value=2.0, allow_nan=False),
    out_h=st.integers(2, 30),
    out_w=st.integers(2, 30),
)
@settings(max_examples=60, deadline=None)
def test_constant_preserved(c, out_h, out_w):
    img = np.full((17, 23), c)
    out = bicubic_resize(img, out_h, out_w)
    assert np.max(np.abs(out - c)) < 1e-11


def test_linear_ramp_reproduced_in_interior():
    # the cubic kernel reproduces affine data exactly, so interior samples of
    # a downscaled ramp must equal the ramp at the mapped coordinate
    # u = i/scale + 0.5 (1 - 1/scale)
    n_in, n_out = 64, 16
    scale = n_out / n_in
    ramp = np.tile(np.arange(1, n_in + 1, dtype=np.float64), (n_in, 1))
    out = bicubic_resize(ramp, n_in, n_out, antialias=True)
    i = np.arange(3, n_out - 2)  # away from clamped borders
    expected = (i + 1) / scale + 0.5 * (1 - 1 / scale)
    assert np.max(np.abs(out[10, i] - expected)) < 1e-9


def test_impulse_downscale_matches_oracle():
    img = np.zeros((16, 16))
    img[7, 7] = 1.0
    out = bicubic_resize(img, 4, 4, antialias=True)
    ref = resize_reference(img, 4, 4, antialias=True)
    assert np.max(np.abs(out - ref)) < 1e-6


@pytest.mark.parametrize("antialias", [True, False])
@pytest.mark.parametrize("shape", [(32, 48), (31, 45)])
def test_matches_reference_on_natural_images(antialias, shape):
    img = natural_image(*shape, seed=9)
    for out_shape in ((8, 12), (13, 17), (57, 91)):
        out = bicubic_resize(img, *out_shape, antialias=antialias)
        ref = resize_reference(img, *out_shape, antialias=antialias)
        assert np.max(np.abs(out - ref)) < 1e-10


def test_upscale_ignores_antialias_flag():
    img = natural_image(12, 12, seed=2)
    a = bicubic_resize(img, 24, 24, antialias=True)
    b = bicubic_resize(img, 24, 24, antialias=False)
    assert np.array_equal(a, b)


def test_empty_target_rejected():
    with pytest.raises(EmptyResult):
        bicubic_resize(np.zeros((8, 8)), 0, 4)


def test_adjoint_identity():
    # <W x, y> == <x, W^T y> for the separable operator
    rng = np.random.default_rng(0)
    x = rng.standard_normal((20, 14, 3))
    y = rng.standard_normal((5, 7, 3))
    wx = bicubic_resize(x, 5, 7, antialias=True)
    wty = resize_adjoint(y, 20, 14, antialias=True)
    assert np.isclose(np.sum(wx * y), np.sum(x * wty), rtol=1e-12, atol=1e-12)
