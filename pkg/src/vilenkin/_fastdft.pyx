# Compiled core for the per-digit DFT passes of the Vilenkin transform.
# Arrays are (batch, M_N) C-contiguous; passes run in place.

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, M_PI
from libc.stdlib cimport free, malloc

cnp.import_array()


def mixed_radix_passes(cnp.complex128_t[:, ::1] data, radices, int sign):
    """In-place per-digit DFT along the last axis.

    Digit k of the flat index has stride M_k = prod(radices[:k]).  Each pass
    replaces every length-m_k fibre by its m_k-point DFT with kernel
    exp(sign * 2*pi*i * e * d / m_k).  No normalization is applied.
    """
    cdef Py_ssize_t batch = data.shape[0]
    cdef Py_ssize_t total = data.shape[1]
    cdef Py_ssize_t b, base, off, d, e, k
    cdef Py_ssize_t stride, block, nblocks, m
    cdef double ang
    cdef double complex acc
    cdef double complex* w
    cdef double complex* buf
    cdef double complex u, v
    cdef double complex* row

    cdef long[:] rad = np.asarray(radices, dtype=np.int64)
    cdef Py_ssize_t ndig = rad.shape[0]
    cdef Py_ssize_t mmax = 0
    for k in range(ndig):
        if rad[k] > mmax:
            mmax = rad[k]

    w = <double complex*> malloc(mmax * mmax * sizeof(double complex))
    buf = <double complex*> malloc(mmax * sizeof(double complex))
    if w == NULL or buf == NULL:
        free(w)
        free(buf)
        raise MemoryError()

    try:
        with nogil:
            for b in range(batch):
                row = &data[b, 0]
                stride = 1
                for k in range(ndig):
                    m = rad[k]
                    block = stride * m
                    nblocks = total / block
                    if m == 2:
                        for base in range(0, total, block):
                            for off in range(stride):
                                u = row[base + off]
                                v = row[base + stride + off]
                                row[base + off] = u + v
                                row[base + stride + off] = u - v
                    else:
                        for e in range(m):
                            for d in range(m):
                                ang = sign * 2.0 * M_PI * (<double> ((e * d) % m)) / (<double> m)
                                w[e * m + d] = cos(ang) + 1j * sin(ang)
                        for base in range(0, total, block):
                            for off in range(stride):
                                for e in range(m):
                                    acc = 0
                                    for d in range(m):
                                        acc = acc + w[e * m + d] * row[base + d * stride + off]
                                    buf[e] = acc
                                for e in range(m):
                                    row[base + e * stride + off] = buf[e]
                    stride = block
    finally:
        free(w)
        free(buf)


def walsh_passes_int(cnp.int64_t[:, ::1] data, int ndigits):
    """In-place radix-2 butterfly passes on int64 rows (exact Walsh transform).

    Equals mixed_radix_passes for radices (2,)*ndigits up to dtype; sign is
    irrelevant because the order-2 kernel is +/-1.
    """
    cdef Py_ssize_t batch = data.shape[0]
    cdef Py_ssize_t total = data.shape[1]
    cdef Py_ssize_t b, k, base, off, stride, block
    cdef cnp.int64_t u, v
    cdef cnp.int64_t* row

    with nogil:
        for b in range(batch):
            row = &data[b, 0]
            stride = 1
            for k in range(ndigits):
                block = stride * 2
                for base in range(0, total, block):
                    for off in range(stride):
                        u = row[base + off]
                        v = row[base + stride + off]
                        row[base + off] = u + v
                        row[base + stride + off] = u - v
                stride = block
