"""Independent reference implementations used as test oracles.

Everything here is written from the published definitions with simple,
direct code (scalar loops, explicit padding, no shared helpers with the
package) so that agreement with the production implementations is
meaningful.  Slow on purpose; only run on small fixtures.
"""

from __future__ import annotations

import math
import struct
import zlib

import numpy as np


# ---------------------------------------------------------------------------
# minimal PNG codec (independent of Pillow)

def png_write_reference(path, arr: np.ndarray, bit_depth: int = 8) -> None:
    """Write a non-interlaced truecolour PNG with filter type 0 rows."""
    h, w = arr.shape[:2]

    def chunk(tag: bytes, payload: bytes) -> bytes:
        return (
            struct.pack(">I", len(payload))
            + tag
            + payload
            + struct.pack(">I", zlib.crc32(tag + payload) & 0xFFFFFFFF)
        )

    ihdr = struct.pack(">IIBBBBB", w, h, bit_depth, 2, 0, 0, 0)
    raw = bytearray()
    for y in range(h):
        raw.append(0)  # filter type none
        if bit_depth == 8:
            raw.extend(arr[y].astype(np.uint8).tobytes())
        else:
            raw.extend(arr[y].astype(">u2").tobytes())
    data = (
        b"\x89PNG\r\n\x1a\n"
        + chunk(b"IHDR", ihdr)
        + chunk(b"IDAT", zlib.compress(bytes(raw)))
        + chunk(b"IEND", b"")
    )
    with open(path, "wb") as f:
        f.write(data)


def png_read_reference(path) -> np.ndarray:
    """Read a non-interlaced 8-bit RGB PNG (all five filter types)."""
    with open(path, "rb") as f:
        blob = f.read()
    assert blob[:8] == b"\x89PNG\r\n\x1a\n"
    pos = 8
    idat = bytearray()
    w = h = None
    while pos < len(blob):
        (length,) = struct.unpack(">I", blob[pos:pos + 4])
        tag = blob[pos + 4:pos + 8]
        payload = blob[pos + 8:pos + 8 + length]
        if tag == b"IHDR":
            w, h, depth, ctype, comp, filt, interlace = struct.unpack(">IIBBBBB", payload)
            assert depth == 8 and ctype == 2 and interlace == 0
        elif tag == b"IDAT":
            idat.extend(payload)
        elif tag == b"IEND":
            break
        pos += 12 + length
    raw = zlib.decompress(bytes(idat))
    stride = 3 * w
    out = np.zeros((h, w, 3), dtype=np.int64)
    prev = np.zeros(stride, dtype=np.int64)
    pos = 0
    for y in range(h):
        ftype = raw[pos]
        line = np.frombuffer(raw[pos + 1:pos + 1 + stride], dtype=np.uint8).astype(np.int64)
        pos += 1 + stride
        recon = np.zeros(stride, dtype=np.int64)
        for i in range(stride):
            a = recon[i - 3] if i >= 3 else 0  # left
            b = prev[i]                        # up
            c = prev[i - 3] if i >= 3 else 0   # upper-left
            if ftype == 0:
                val = line[i]
            elif ftype == 1:
                val = line[i] + a
            elif ftype == 2:
                val = line[i] + b
            elif ftype == 3:
                val = line[i] + (a + b) // 2
            elif ftype == 4:
                p = a + b - c
                pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
                pred = a if pa <= pb and pa <= pc else (b if pb <= pc else c)
                val = line[i] + pred
            else:
                raise AssertionError(f"bad filter {ftype}")
            recon[i] = val & 0xFF
        out[y] = recon.reshape(w, 3)
        prev = recon
    return out.astype(np.uint8)


# ---------------------------------------------------------------------------
# resampling / filtering

def _cubic_scalar(x: float) -> float:
    ax = abs(x)
    if ax <= 1.0:
        return 1.5 * ax ** 3 - 2.5 * ax ** 2 + 1.0
    if ax <= 2.0:
        return -0.5 * ax ** 3 + 2.5 * ax ** 2 - 4.0 * ax + 2.0
    return 0.0


def _resize_axis_reference(arr: np.ndarray, n_out: int, antialias: bool) -> np.ndarray:
    """Resample axis 0 with Matlab imresize semantics, scalar arithmetic."""
    n_in = arr.shape[0]
    scale = n_out / n_in
    if scale < 1.0 and antialias:
        support = 4.0 / scale
        kernel = lambda x: scale * _cubic_scalar(scale * x)
    else:
        support = 4.0
        kernel = _cubic_scalar
    p = int(math.ceil(support)) + 2
    out = np.zeros((n_out,) + arr.shape[1:], dtype=np.float64)
    for i in range(1, n_out + 1):
        u = i / scale + 0.5 * (1.0 - 1.0 / scale)
        left = math.floor(u - support / 2.0)
        weights = [kernel(u - (left + t)) for t in range(p)]
        total = sum(weights)
        acc = np.zeros(arr.shape[1:], dtype=np.float64)
        for t in range(p):
            src = min(max(left + t, 1), n_in)  # clamp: edge replication
            acc = acc + (weights[t] / total) * arr[src - 1]
        out[i - 1] = acc
    return out


def resize_reference(img: np.ndarray, out_h: int, out_w: int, antialias: bool = True) -> np.ndarray:
    """Independent Matlab-semantics bicubic resize (rows then columns)."""
    img = np.asarray(img, dtype=np.float64)
    tmp = _resize_axis_reference(img, out_h, antialias)
    tmp = np.swapaxes(tmp, 0, 1)
    tmp = _resize_axis_reference(tmp, out_w, antialias)
    return np.swapaxes(tmp, 0, 1)


def gaussian_kernel_reference(sigma: float, size: int) -> np.ndarray:
    half = size // 2
    k = np.zeros((size, size))
    for y in range(size):
        for x in range(size):
            k[y, x] = math.exp(-((y - half) ** 2 + (x - half) ** 2) / (2 * sigma * sigma))
    return k / k.sum()


def conv2d_reference(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Brute-force correlation with symmetric boundary handling."""
    img = np.asarray(img, dtype=np.float64)
    added_axis = img.ndim == 2
    if added_axis:
        img = img[:, :, None]
    h, w, c = img.shape
    kh, kw = kernel.shape
    hh, hw = kh // 2, kw // 2

    def reflect(i: int, n: int) -> int:
        # symmetric padding: -1 -> 0, -2 -> 1, n -> n-1, n+1 -> n-2
        while i < 0 or i >= n:
            if i < 0:
                i = -i - 1
            if i >= n:
                i = 2 * n - i - 1
        return i

    out = np.zeros_like(img)
    for y in range(h):
        for x in range(w):
            for ch in range(c):
                acc = 0.0
                for dy in range(kh):
                    for dx in range(kw):
                        sy = reflect(y + dy - hh, h)
                        sx = reflect(x + dx - hw, w)
                        acc += img[sy, sx, ch] * kernel[dy, dx]
                out[y, x, ch] = acc
    return out[:, :, 0] if added_axis else out


def dct2_reference(block: np.ndarray) -> np.ndarray:
    """8x8 forward DCT straight from the JPEG definition (double sum)."""
    out = np.zeros((8, 8))
    for u in range(8):
        for v in range(8):
            cu = 1.0 / math.sqrt(2.0) if u == 0 else 1.0
            cv = 1.0 / math.sqrt(2.0) if v == 0 else 1.0
            acc = 0.0
            for x in range(8):
                for y in range(8):
                    acc += (
                        block[x, y]
                        * math.cos((2 * x + 1) * u * math.pi / 16)
                        * math.cos((2 * y + 1) * v * math.pi / 16)
                    )
            out[u, v] = 0.25 * cu * cv * acc
    return out


# ---------------------------------------------------------------------------
# metrics

def psnr_reference(gt8: np.ndarray, sr8: np.ndarray) -> float:
    d = gt8.astype(np.float64) - sr8.astype(np.float64)
    mse = float((d * d).sum()) / d.size
    if mse == 0.0:
        return float("inf")
    return 10.0 * math.log10(255.0 ** 2 / mse)


def ssim_reference(gt8: np.ndarray, sr8: np.ndarray) -> float:
    """Windowed SSIM with explicit per-pixel 11x11 windows, no crop."""
    size, sigma = 11, 1.5
    half = size // 2
    g = np.zeros((size, size))
    for y in range(size):
        for x in range(size):
            g[y, x] = math.exp(-((y - half) ** 2 + (x - half) ** 2) / (2 * sigma * sigma))
    g /= g.sum()
    c1 = (0.01 * 255.0) ** 2
    c2 = (0.03 * 255.0) ** 2
    channel_means = []
    for ch in range(3):
        x = gt8[:, :, ch].astype(np.float64)
        y = sr8[:, :, ch].astype(np.float64)
        xp = np.pad(x, half, mode="symmetric")
        yp = np.pad(y, half, mode="symmetric")
        h, w = x.shape
        total = 0.0
        for i in range(h):
            for j in range(w):
                wx = xp[i:i + size, j:j + size]
                wy = yp[i:i + size, j:j + size]
                mx = float((g * wx).sum())
                my = float((g * wy).sum())
                vx = float((g * wx * wx).sum()) - mx * mx
                vy = float((g * wy * wy).sum()) - my * my
                cov = float((g * wx * wy).sum()) - mx * my
                total += ((2 * mx * my + c1) * (2 * cov + c2)) / (
                    (mx * mx + my * my + c1) * (vx + vy + c2)
                )
        channel_means.append(total / (h * w))
    return float(np.mean(channel_means))


# ---------------------------------------------------------------------------
# attention

def pam_reference(f_l: np.ndarray, f_r: np.ndarray):
    """Dense per-row attention with explicit loops.

    Returns (attn_r2l, attn_l2r, warped_r, warped_l).
    """
    h, w, c = f_l.shape
    attn_r2l = np.zeros((h, w, w))
    attn_l2r = np.zeros((h, w, w))
    warped_r = np.zeros_like(f_l)
    warped_l = np.zeros_like(f_r)
    for y in range(h):
        scores = np.zeros((w, w))
        for i in range(w):
            for j in range(w):
                scores[i, j] = float(np.dot(f_l[y, i], f_r[y, j])) / math.sqrt(c)
        for i in range(w):
            e = np.exp(scores[i] - scores[i].max())
            attn_r2l[y, i] = e / e.sum()
            e = np.exp(scores[:, i] - scores[:, i].max())
            attn_l2r[y, i] = e / e.sum()
        for i in range(w):
            for j in range(w):
                warped_r[y, i] += attn_r2l[y, i, j] * f_r[y, j]
                warped_l[y, i] += attn_l2r[y, i, j] * f_l[y, j]
    return attn_r2l, attn_l2r, warped_r, warped_l


def scam_reference(f_l: np.ndarray, f_r: np.ndarray, p) -> tuple[np.ndarray, np.ndarray]:
    """Loop-based cross-attention oracle mirroring the published block."""
    h, w, c = f_l.shape

    def norm(f, scale, shift):
        out = np.zeros_like(f)
        for y in range(h):
            for x in range(w):
                v = f[y, x]
                mu = v.mean()
                var = ((v - mu) ** 2).mean()
                out[y, x] = (v - mu) / math.sqrt(var + 1e-6) * scale + shift
        return out

    q = norm(f_l, p.norm_scale_l, p.norm_shift_l) @ p.w_q
    k = norm(f_r, p.norm_scale_r, p.norm_shift_r) @ p.w_k
    v_l = f_l @ p.w_v_l
    v_r = f_r @ p.w_v_r
    out_l = f_l.copy()
    out_r = f_r.copy()
    for y in range(h):
        s = (q[y] @ k[y].T) / math.sqrt(c)
        for i in range(w):
            e = np.exp(s[i] - s[i].max())
            a = e / e.sum()
            out_l[y, i] = f_l[y, i] + p.gamma_l * (a @ v_r[y])
        for i in range(w):
            e = np.exp(s[:, i] - s[:, i].max())
            a = e / e.sum()
            out_r[y, i] = f_r[y, i] + p.gamma_r * (a @ v_l[y])
    return out_l, out_r


# ---------------------------------------------------------------------------
# miscellaneous

def fd_gradient(f, x: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central finite differences, elementwise."""
    g = np.zeros_like(x, dtype=np.float64)
    flat = x.reshape(-1)
    out = g.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        fp = f(x)
        flat[i] = orig - h
        fm = f(x)
        flat[i] = orig
        out[i] = (fp - fm) / (2.0 * h)
    return g


def quantize_reference(x: float) -> int:
    """Scalar clamp + scale + round half away from zero."""
    v = min(max(x, 0.0), 1.0) * 255.0
    return int(math.floor(v + 0.5))
