"""Numpy fallback for the transform core.

Same pass structure as the compiled module: one small DFT per digit,
vectorized over fibres via reshape.  Digit k of the flat index has stride
M_k, so a row of length M_N viewed as (blocks, m_k, M_k) exposes digit k on
the middle axis.
"""

import numpy as np

_twiddles: dict[tuple[int, int], np.ndarray] = {}


def _twiddle(m: int, sign: int) -> np.ndarray:
    key = (m, sign)
    try:
        return _twiddles[key]
    except KeyError:
        e = np.arange(m)
        w = np.exp(sign * 2j * np.pi * np.outer(e, e) / m)
        _twiddles[key] = w
        return w


def mixed_radix_passes(data: np.ndarray, radices, sign: int) -> None:
    """In-place per-digit DFT along the last axis of (batch, M_N) data."""
    batch, total = data.shape
    stride = 1
    for m in radices:
        block = stride * m
        view = data.reshape(batch, total // block, m, stride)
        if m == 2:
            a = view[:, :, 0, :] + view[:, :, 1, :]
            b = view[:, :, 0, :] - view[:, :, 1, :]
            view[:, :, 0, :] = a
            view[:, :, 1, :] = b
        else:
            w = _twiddle(m, sign)
            view[:] = np.einsum("ed,bkds->bkes", w, view)
        stride = block


def walsh_passes_int(data: np.ndarray, ndigits: int) -> None:
    """In-place radix-2 butterflies on int64 rows (exact)."""
    batch, total = data.shape
    stride = 1
    for _ in range(ndigits):
        block = stride * 2
        view = data.reshape(batch, total // block, 2, stride)
        a = view[:, :, 0, :] + view[:, :, 1, :]
        b = view[:, :, 0, :] - view[:, :, 1, :]
        view[:, :, 0, :] = a
        view[:, :, 1, :] = b
        stride = block
