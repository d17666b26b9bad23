"""Baseline JPEG (JFIF) codec used for the track-2 compression stage.

Encoder: BT.601 full-range RGB -> YCbCr, 4:2:0 chroma subsampling by 2x2
mean, 8x8 blocks level-shifted by 128, orthonormal DCT-II (identical to the
JPEG FDCT), quantisation with the Annex-K example tables scaled by the IJG
quality mapping

    scale = 5000 / q          for q < 50
    scale = 200 - 2 q         otherwise
    entry = clamp(round(base * scale / 100), 1, 255)

and entropy coding with the Annex-K "typical" Huffman tables, emitted as a
standard JFIF stream (SOI, APP0, DQT, SOF0, DHT, SOS, EOI) with byte
stuffing.  Quantised coefficients round half away from zero.

Decoder: handles baseline sequential streams generally (any of the common
sampling factors, restart markers, 8/16-bit DQT entries), not just this
encoder's output.  Subsampled chroma is upsampled with the triangle filter
(3/4, 1/4 weights per axis, edges replicated) to match common decoders.

Quality 100 with 4:2:0 still loses chroma detail; that is the behaviour of
the mainstream encoders this stage models.
"""

from __future__ import annotations

import numpy as np
import scipy.fft

from .errors import DecodeError, EncodeError, UnsupportedFormat
from .images import validate_image8

# ---------------------------------------------------------------------------
# tables

# Annex K.1/K.2 example quantisation tables (natural row-major order)
LUMA_QUANT_BASE = np.array([
    [16, 11, 10, 16, 24, 40, 51, 61],
    [12, 12, 14, 19, 26, 58, 60, 55],
    [14, 13, 16, 24, 40, 57, 69, 56],
    [14, 17, 22, 29, 51, 87, 80, 62],
    [18, 22, 37, 56, 68, 109, 103, 77],
    [24, 35, 55, 64, 81, 104, 113, 92],
    [49, 64, 78, 87, 103, 121, 120, 101],
    [72, 92, 95, 98, 112, 100, 103, 99],
], dtype=np.int64)

CHROMA_QUANT_BASE = np.array([
    [17, 18, 24, 47, 99, 99, 99, 99],
    [18, 21, 26, 66, 99, 99, 99, 99],
    [24, 26, 56, 99, 99, 99, 99, 99],
    [47, 66, 99, 99, 99, 99, 99, 99],
    [99, 99, 99, 99, 99, 99, 99, 99],
    [99, 99, 99, 99, 99, 99, 99, 99],
    [99, 99, 99, 99, 99, 99, 99, 99],
    [99, 99, 99, 99, 99, 99, 99, 99],
], dtype=np.int64)


def _zigzag_order() -> np.ndarray:
    order = np.empty(64, dtype=np.int64)
    r = c = 0
    for k in range(64):
        order[k] = r * 8 + c
        if (r + c) % 2 == 0:  # moving up-right
            if c == 7:
                r += 1
            elif r == 0:
                c += 1
            else:
                r -= 1
                c += 1
        else:  # moving down-left
            if r == 7:
                c += 1
            elif c == 0:
                r += 1
            else:
                r += 1
                c -= 1
    return order


ZIGZAG = _zigzag_order()          # zigzag position -> natural index
UNZIGZAG = np.argsort(ZIGZAG)     # natural index -> zigzag position

# Annex K.3 typical Huffman tables: (bits per code length 1..16, values)
DC_LUMA_SPEC = (
    [0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0],
    list(range(12)),
)
DC_CHROMA_SPEC = (
    [0, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0],
    list(range(12)),
)
AC_LUMA_SPEC = (
    [0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 125],
    [
        0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12,
        0x21, 0x31, 0x41, 0x06, 0x13, 0x51, 0x61, 0x07,
        0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xA1, 0x08,
        0x23, 0x42, 0xB1, 0xC1, 0x15, 0x52, 0xD1, 0xF0,
        0x24, 0x33, 0x62, 0x72, 0x82, 0x09, 0x0A, 0x16,
        0x17, 0x18, 0x19, 0x1A, 0x25, 0x26, 0x27, 0x28,
        0x29, 0x2A, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39,
        0x3A, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49,
        0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59,
        0x5A, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69,
        0x6A, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79,
        0x7A, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89,
        0x8A, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98,
        0x99, 0x9A, 0xA2, 0xA3, 0xA4, 0xA5, 0xA6, 0xA7,
        0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4, 0xB5, 0xB6,
        0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3, 0xC4, 0xC5,
        0xC6, 0xC7, 0xC8, 0xC9, 0xCA, 0xD2, 0xD3, 0xD4,
        0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA, 0xE1, 0xE2,
        0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8, 0xE9, 0xEA,
        0xF1, 0xF2, 0xF3, 0xF4, 0xF5, 0xF6, 0xF7, 0xF8,
        0xF9, 0xFA,
    ],
)
AC_CHROMA_SPEC = (
    [0, 2, 1, 2, 4, 4, 3, 4, 7, 5, 4, 4, 0, 1, 2, 119],
    [
        0x00, 0x01, 0x02, 0x03, 0x11, 0x04, 0x05, 0x21,
        0x31, 0x06, 0x12, 0x41, 0x51, 0x07, 0x61, 0x71,
        0x13, 0x22, 0x32, 0x81, 0x08, 0x14, 0x42, 0x91,
        0xA1, 0xB1, 0xC1, 0x09, 0x23, 0x33, 0x52, 0xF0,
        0x15, 0x62, 0x72, 0xD1, 0x0A, 0x16, 0x24, 0x34,
        0xE1, 0x25, 0xF1, 0x17, 0x18, 0x19, 0x1A, 0x26,
        0x27, 0x28, 0x29, 0x2A, 0x35, 0x36, 0x37, 0x38,
        0x39, 0x3A, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48,
        0x49, 0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58,
        0x59, 0x5A, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68,
        0x69, 0x6A, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78,
        0x79, 0x7A, 0x82, 0x83, 0x84, 0x85, 0x86, 0x87,
        0x88, 0x89, 0x8A, 0x92, 0x93, 0x94, 0x95, 0x96,
        0x97, 0x98, 0x99, 0x9A, 0xA2, 0xA3, 0xA4, 0xA5,
        0xA6, 0xA7, 0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4,
        0xB5, 0xB6, 0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3,
        0xC4, 0xC5, 0xC6, 0xC7, 0xC8, 0xC9, 0xCA, 0xD2,
        0xD3, 0xD4, 0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA,
        0xE2, 0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8, 0xE9,
        0xEA, 0xF2, 0xF3, 0xF4, 0xF5, 0xF6, 0xF7, 0xF8,
        0xF9, 0xFA,
    ],
)


def quant_tables(quality: int) -> tuple[np.ndarray, np.ndarray]:
    """Annex-K tables scaled by the IJG quality mapping (natural order)."""
    if not 1 <= quality <= 100:
        raise EncodeError(f"quality must be in [1, 100], got {quality}")
    scale = 5000 // quality if quality < 50 else 200 - 2 * quality
    luma = (LUMA_QUANT_BASE * scale + 50) // 100
    chroma = (CHROMA_QUANT_BASE * scale + 50) // 100
    return np.clip(luma, 1, 255), np.clip(chroma, 1, 255)


# ---------------------------------------------------------------------------
# colour transforms (JFIF / BT.601 full range)

def rgb_to_ycbcr(rgb: np.ndarray) -> np.ndarray:
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    y = 0.299 * r + 0.587 * g + 0.114 * b
    cb = 128.0 - 0.168735892 * r - 0.331264108 * g + 0.5 * b
    cr = 128.0 + 0.5 * r - 0.418687589 * g - 0.081312411 * b
    return np.stack([y, cb, cr], axis=-1)


def ycbcr_to_rgb(ycc: np.ndarray) -> np.ndarray:
    y, cb, cr = ycc[..., 0], ycc[..., 1] - 128.0, ycc[..., 2] - 128.0
    r = y + 1.402 * cr
    g = y - 0.344136286 * cb - 0.714136286 * cr
    b = y + 1.772 * cb
    return np.stack([r, g, b], axis=-1)


# ---------------------------------------------------------------------------
# Huffman machinery

def _build_encode_table(spec) -> dict[int, tuple[int, int]]:
    """Canonical code assignment: symbol -> (code, bit length)."""
    bits, values = spec
    table = {}
    code = 0
    k = 0
    for length in range(1, 17):
        for _ in range(bits[length - 1]):
            table[values[k]] = (code, length)
            code += 1
            k += 1
        code <<= 1
    return table


class _DecodeTable:
    """JPEG F.2.2.3 three-array Huffman decoding structure."""

    def __init__(self, bits, values):
        self.values = list(values)
        self.mincode = [0] * 17
        self.maxcode = [-1] * 17
        self.valptr = [0] * 17
        code = 0
        k = 0
        for length in range(1, 17):
            if bits[length - 1]:
                self.valptr[length] = k
                self.mincode[length] = code
                code += bits[length - 1]
                k += bits[length - 1]
                self.maxcode[length] = code - 1
            code <<= 1


_ENC_DC_LUMA = _build_encode_table(DC_LUMA_SPEC)
_ENC_AC_LUMA = _build_encode_table(AC_LUMA_SPEC)
_ENC_DC_CHROMA = _build_encode_table(DC_CHROMA_SPEC)
_ENC_AC_CHROMA = _build_encode_table(AC_CHROMA_SPEC)


class _BitWriter:
    def __init__(self):
        self.out = bytearray()
        self.acc = 0
        self.nbits = 0

    def write(self, code: int, length: int) -> None:
        if length == 0:
            return
        self.acc = (self.acc << length) | (code & ((1 << length) - 1))
        self.nbits += length
        while self.nbits >= 8:
            byte = (self.acc >> (self.nbits - 8)) & 0xFF
            self.nbits -= 8
            self.acc &= (1 << self.nbits) - 1
            self.out.append(byte)
            if byte == 0xFF:  # byte stuffing
                self.out.append(0x00)

    def flush(self) -> None:
        if self.nbits:
            pad = 8 - self.nbits
            self.write((1 << pad) - 1, pad)  # pad final byte with 1 bits


def _category(v: int) -> int:
    return int(abs(v)).bit_length()


# ---------------------------------------------------------------------------
# encoder

def _plane_to_coefs(plane: np.ndarray, qtable: np.ndarray) -> np.ndarray:
    """(h, w) plane -> (nby, nbx, 64) quantised coefficients, zigzag order."""
    h, w = plane.shape
    blocks = plane.reshape(h // 8, 8, w // 8, 8).transpose(0, 2, 1, 3) - 128.0
    coefs = scipy.fft.dctn(blocks, axes=(2, 3), norm="ortho")
    scaled = coefs / qtable[None, None]
    quantised = np.sign(scaled) * np.floor(np.abs(scaled) + 0.5)
    zz = quantised.reshape(*quantised.shape[:2], 64)[..., ZIGZAG]
    return zz.astype(np.int64)


def _encode_block(writer: _BitWriter, zz: np.ndarray, pred: int,
                  dc_table: dict, ac_table: dict) -> int:
    dc = int(zz[0])
    diff = dc - pred
    cat = _category(diff)
    code, length = dc_table[cat]
    writer.write(code, length)
    if cat:
        writer.write(diff if diff >= 0 else diff + (1 << cat) - 1, cat)
    run = 0
    for k in range(1, 64):
        v = int(zz[k])
        if v == 0:
            run += 1
            continue
        while run > 15:
            code, length = ac_table[0xF0]  # ZRL: sixteen zeros
            writer.write(code, length)
            run -= 16
        size = _category(v)
        code, length = ac_table[(run << 4) | size]
        writer.write(code, length)
        writer.write(v if v >= 0 else v + (1 << size) - 1, size)
        run = 0
    if run:
        code, length = ac_table[0x00]  # EOB
        writer.write(code, length)
    return dc


def _marker(tag: int, payload: bytes = b"") -> bytes:
    if payload:
        return bytes([0xFF, tag]) + (len(payload) + 2).to_bytes(2, "big") + payload
    return bytes([0xFF, tag])


def encode(img8: np.ndarray, quality: int) -> bytes:
    """Encode an (H, W, 3) uint8 RGB image as baseline JFIF, 4:2:0."""
    validate_image8(img8)
    if not 1 <= quality <= 100:
        raise EncodeError(f"quality must be in [1, 100], got {quality}")
    h, w = img8.shape[:2]
    luma_q, chroma_q = quant_tables(quality)

    pad_h, pad_w = (-h) % 16, (-w) % 16
    padded = np.pad(img8.astype(np.float64), ((0, pad_h), (0, pad_w), (0, 0)), mode="edge")
    ycc = rgb_to_ycbcr(padded)
    y_plane = ycc[..., 0]
    hp, wp = y_plane.shape
    cb = ycc[..., 1].reshape(hp // 2, 2, wp // 2, 2).mean(axis=(1, 3))
    cr = ycc[..., 2].reshape(hp // 2, 2, wp // 2, 2).mean(axis=(1, 3))

    y_zz = _plane_to_coefs(y_plane, luma_q)
    cb_zz = _plane_to_coefs(cb, chroma_q)
    cr_zz = _plane_to_coefs(cr, chroma_q)

    out = bytearray()
    out += _marker(0xD8)  # SOI
    out += _marker(0xE0, b"JFIF\x00" + bytes([1, 1, 0]) + (1).to_bytes(2, "big") * 2 + b"\x00\x00")
    dqt = bytes([0x00]) + bytes(luma_q.flat[ZIGZAG].astype(np.uint8))
    dqt += bytes([0x01]) + bytes(chroma_q.flat[ZIGZAG].astype(np.uint8))
    out += _marker(0xDB, dqt)
    sof = bytes([8]) + h.to_bytes(2, "big") + w.to_bytes(2, "big") + bytes([3])
    sof += bytes([1, 0x22, 0])  # Y: 2x2 sampling, quant table 0
    sof += bytes([2, 0x11, 1])  # Cb
    sof += bytes([3, 0x11, 1])  # Cr
    out += _marker(0xC0, sof)
    dht = b""
    for cls, tid, spec in ((0, 0, DC_LUMA_SPEC), (1, 0, AC_LUMA_SPEC),
                           (0, 1, DC_CHROMA_SPEC), (1, 1, AC_CHROMA_SPEC)):
        dht += bytes([(cls << 4) | tid]) + bytes(spec[0]) + bytes(spec[1])
    out += _marker(0xC4, dht)
    sos = bytes([3, 1, 0x00, 2, 0x11, 3, 0x11, 0, 63, 0])
    out += _marker(0xDA, sos)

    writer = _BitWriter()
    preds = [0, 0, 0]
    mcus_y, mcus_x = hp // 16, wp // 16
    for my in range(mcus_y):
        for mx in range(mcus_x):
            for dy in range(2):
                for dx in range(2):
                    preds[0] = _encode_block(
                        writer, y_zz[2 * my + dy, 2 * mx + dx], preds[0],
                        _ENC_DC_LUMA, _ENC_AC_LUMA)
            preds[1] = _encode_block(writer, cb_zz[my, mx], preds[1],
                                     _ENC_DC_CHROMA, _ENC_AC_CHROMA)
            preds[2] = _encode_block(writer, cr_zz[my, mx], preds[2],
                                     _ENC_DC_CHROMA, _ENC_AC_CHROMA)
    writer.flush()
    out += writer.out
    out += _marker(0xD9)  # EOI
    return bytes(out)


# ---------------------------------------------------------------------------
# decoder

class _BitReader:
    def __init__(self, data: bytes, pos: int):
        self.data = data
        self.pos = pos
        self.acc = 0
        self.nbits = 0
        self.marker = None

    def _fill(self) -> None:
        if self.marker is not None:
            raise DecodeError("entropy stream ended at a marker mid-symbol")
        if self.pos >= len(self.data):
            raise DecodeError("entropy stream truncated")
        b = self.data[self.pos]
        if b == 0xFF:
            nxt = self.data[self.pos + 1] if self.pos + 1 < len(self.data) else None
            if nxt == 0x00:
                self.pos += 2  # stuffed 0xFF datum
            else:
                self.marker = nxt
                raise DecodeError("entropy stream ended at a marker mid-symbol")
        else:
            self.pos += 1
        self.acc = (self.acc << 8) | b
        self.nbits += 8

    def read_bit(self) -> int:
        if self.nbits == 0:
            self._fill()
        self.nbits -= 1
        return (self.acc >> self.nbits) & 1

    def receive(self, n: int) -> int:
        v = 0
        for _ in range(n):
            v = (v << 1) | self.read_bit()
        return v

    def sync_restart(self) -> None:
        """Byte-align and consume the next RSTn marker."""
        self.acc = 0
        self.nbits = 0
        if self.marker is None:
            if (self.pos + 1 >= len(self.data)
                    or self.data[self.pos] != 0xFF
                    or not 0xD0 <= self.data[self.pos + 1] <= 0xD7):
                raise DecodeError("expected restart marker")
            self.pos += 2
        else:
            if not 0xD0 <= self.marker <= 0xD7:
                raise DecodeError(f"expected restart marker, got ff{self.marker:02x}")
            self.pos += 2
            self.marker = None


def _decode_huffman(reader: _BitReader, table: _DecodeTable) -> int:
    code = 0
    for length in range(1, 17):
        code = (code << 1) | reader.read_bit()
        if code <= table.maxcode[length]:
            return table.values[table.valptr[length] + code - table.mincode[length]]
    raise DecodeError("invalid Huffman code")


def _extend(v: int, size: int) -> int:
    return v - (1 << size) + 1 if v < (1 << (size - 1)) else v


def _triangle_upsample_axis(plane: np.ndarray, axis: int) -> np.ndarray:
    """2x upsampling with 3/4, 1/4 weights; edge samples replicated."""
    p = np.moveaxis(plane, axis, 0)
    padded = np.concatenate([p[:1], p, p[-1:]], axis=0).astype(np.float64)
    up = np.empty((2 * p.shape[0],) + p.shape[1:], dtype=np.float64)
    up[0::2] = 0.75 * padded[1:-1] + 0.25 * padded[:-2]
    up[1::2] = 0.75 * padded[1:-1] + 0.25 * padded[2:]
    return np.moveaxis(up, 0, axis)


class _Component:
    def __init__(self, comp_id: int, h: int, v: int, tq: int):
        self.id = comp_id
        self.h = h
        self.v = v
        self.tq = tq
        self.dc_table = 0
        self.ac_table = 0
        self.blocks = None  # (rows, cols, 64) quantised coefficients
        self.pred = 0


def decode(data: bytes) -> np.ndarray:
    """Decode a baseline sequential JFIF stream to (H, W, 3) uint8 RGB."""
    if len(data) < 4 or data[0] != 0xFF or data[1] != 0xD8:
        raise DecodeError("missing SOI marker")
    pos = 2
    qtables: dict[int, np.ndarray] = {}
    htables: dict[tuple[int, int], _DecodeTable] = {}
    comps: list[_Component] = []
    frame_h = frame_w = 0
    restart_interval = 0

    while pos < len(data):
        if data[pos] != 0xFF:
            raise DecodeError(f"expected marker at offset {pos}")
        tag = data[pos + 1]
        pos += 2
        if tag == 0xD9:  # EOI
            break
        if tag in (0x01, *range(0xD0, 0xD8)):  # standalone markers
            continue
        if pos + 2 > len(data):
            raise DecodeError("truncated marker segment")
        seg_len = int.from_bytes(data[pos:pos + 2], "big")
        seg = data[pos + 2:pos + seg_len]
        if tag == 0xDB:  # DQT
            i = 0
            while i < len(seg):
                pq, tq = seg[i] >> 4, seg[i] & 0x0F
                i += 1
                if pq:
                    vals = np.frombuffer(seg[i:i + 128], dtype=">u2").astype(np.int64)
                    i += 128
                else:
                    vals = np.frombuffer(seg[i:i + 64], dtype=np.uint8).astype(np.int64)
                    i += 64
                table = np.zeros(64, dtype=np.int64)
                table[ZIGZAG] = vals
                qtables[tq] = table.reshape(8, 8)
        elif tag == 0xC4:  # DHT
            i = 0
            while i < len(seg):
                cls, tid = seg[i] >> 4, seg[i] & 0x0F
                bits = list(seg[i + 1:i + 17])
                n = sum(bits)
                values = list(seg[i + 17:i + 17 + n])
                htables[(cls, tid)] = _DecodeTable(bits, values)
                i += 17 + n
        elif tag == 0xC0 or tag == 0xC1:  # SOF0/1: baseline sequential
            if seg[0] != 8:
                raise UnsupportedFormat(f"unsupported sample precision {seg[0]}")
            frame_h = int.from_bytes(seg[1:3], "big")
            frame_w = int.from_bytes(seg[3:5], "big")
            ncomp = seg[5]
            if ncomp not in (1, 3):
                raise UnsupportedFormat(f"unsupported component count {ncomp}")
            for ci in range(ncomp):
                cid, hv, tq = seg[6 + 3 * ci:9 + 3 * ci]
                comps.append(_Component(cid, hv >> 4, hv & 0x0F, tq))
        elif tag in (0xC2, 0xC3, 0xC5, 0xC6, 0xC7, 0xC9, 0xCA, 0xCB, 0xCD, 0xCE, 0xCF):
            raise UnsupportedFormat("only baseline sequential JPEG is supported")
        elif tag == 0xDD:  # DRI
            restart_interval = int.from_bytes(seg[0:2], "big")
        elif tag == 0xDA:  # SOS
            ns = seg[0]
            order = []
            for si in range(ns):
                cid, tsel = seg[1 + 2 * si], seg[2 + 2 * si]
                comp = next((c for c in comps if c.id == cid), None)
                if comp is None:
                    raise DecodeError(f"scan references unknown component {cid}")
                comp.dc_table = tsel >> 4
                comp.ac_table = tsel & 0x0F
                order.append(comp)
            pos = pos + seg_len
            pos = _decode_scan(data, pos, order, htables, frame_h, frame_w,
                               restart_interval)
            continue
        # APPn, COM and anything else: skip
        pos += seg_len

    if not comps or frame_h == 0:
        raise DecodeError("no frame decoded")
    return _reconstruct(comps, qtables, frame_h, frame_w)


def _decode_scan(data, pos, order, htables, frame_h, frame_w, restart_interval):
    h_max = max(c.h for c in order)
    v_max = max(c.v for c in order)
    mcus_x = -(-frame_w // (8 * h_max))
    mcus_y = -(-frame_h // (8 * v_max))
    for c in order:
        c.blocks = np.zeros((mcus_y * c.v, mcus_x * c.h, 64), dtype=np.int64)
        c.pred = 0

    reader = _BitReader(data, pos)
    mcu_index = 0
    for my in range(mcus_y):
        for mx in range(mcus_x):
            if restart_interval and mcu_index and mcu_index % restart_interval == 0:
                reader.sync_restart()
                for c in order:
                    c.pred = 0
            for c in order:
                dc_tbl = htables.get((0, c.dc_table))
                ac_tbl = htables.get((1, c.ac_table))
                if dc_tbl is None or ac_tbl is None:
                    raise DecodeError("scan uses an undefined Huffman table")
                for by in range(c.v):
                    for bx in range(c.h):
                        block = c.blocks[my * c.v + by, mx * c.h + bx]
                        t = _decode_huffman(reader, dc_tbl)
                        diff = _extend(reader.receive(t), t) if t else 0
                        c.pred += diff
                        block[0] = c.pred
                        k = 1
                        while k < 64:
                            rs = _decode_huffman(reader, ac_tbl)
                            r, s = rs >> 4, rs & 0x0F
                            if s == 0:
                                if r != 15:
                                    break  # EOB
                                k += 16
                            else:
                                k += r
                                if k > 63:
                                    raise DecodeError("AC run exceeds block")
                                block[k] = _extend(reader.receive(s), s)
                                k += 1
            mcu_index += 1
    # skip trailing pad bits; leave position at the next marker
    end = reader.pos
    while end + 1 < len(data) and not (data[end] == 0xFF and data[end + 1] != 0x00):
        end += 1
    return end


def _reconstruct(comps, qtables, frame_h, frame_w) -> np.ndarray:
    h_max = max(c.h for c in comps)
    v_max = max(c.v for c in comps)
    planes = []
    for c in comps:
        if c.blocks is None:
            raise DecodeError(f"component {c.id} has no scan data")
        if c.tq not in qtables:
            raise DecodeError(f"component {c.id} uses undefined quant table {c.tq}")
        q = qtables[c.tq]
        rows, cols = c.blocks.shape[:2]
        natural = np.zeros((rows, cols, 64), dtype=np.float64)
        natural[..., ZIGZAG] = c.blocks
        dequant = natural.reshape(rows, cols, 8, 8) * q[None, None]
        pixels = scipy.fft.idctn(dequant, axes=(2, 3), norm="ortho") + 128.0
        plane = pixels.transpose(0, 2, 1, 3).reshape(rows * 8, cols * 8)
        # crop to this component's true extent, then upsample to frame size
        ch = -(-frame_h * c.v // v_max)
        cw = -(-frame_w * c.h // h_max)
        plane = plane[:ch, :cw]
        if c.v != v_max:
            if v_max // c.v != 2:
                raise UnsupportedFormat("only 1x and 2x chroma subsampling supported")
            plane = _triangle_upsample_axis(plane, 0)
        if c.h != h_max:
            if h_max // c.h != 2:
                raise UnsupportedFormat("only 1x and 2x chroma subsampling supported")
            plane = _triangle_upsample_axis(plane, 1)
        planes.append(plane[:frame_h, :frame_w])

    if len(planes) == 1:
        rgb = planes[0][..., None].repeat(3, axis=-1)
    else:
        rgb = ycbcr_to_rgb(np.stack(planes, axis=-1))
    return np.floor(np.clip(rgb, 0.0, 255.0) + 0.5).astype(np.uint8)


def jpeg_roundtrip(img8: np.ndarray, quality: int) -> np.ndarray:
    """Encode then decode; models the compression stage of track 2."""
    return decode(encode(img8, quality))
