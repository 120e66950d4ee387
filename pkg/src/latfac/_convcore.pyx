# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled coefficient-convolution core.

Dense-offset accumulation over coefficient pairs.  Keys arrive as int64
arrays, values as complex128; the caller guarantees the dense span fits and
that (key - min) indexes into it.
"""

import numpy as np

from libc.stdint cimport int64_t


def conv1(int64_t[::1] ja, double complex[::1] ca,
          int64_t[::1] jb, double complex[::1] cb,
          int64_t jmin, Py_ssize_t span):
    cdef Py_ssize_t ia, ib, na = ja.shape[0], nb = jb.shape[0]
    cdef double complex va
    out = np.zeros(span, dtype=np.complex128)
    cdef double complex[::1] acc = out
    for ia in range(na):
        va = ca[ia]
        for ib in range(nb):
            acc[ja[ia] + jb[ib] - jmin] = acc[ja[ia] + jb[ib] - jmin] + va * cb[ib]
    return out


def conv2(int64_t[::1] ja, int64_t[::1] ka, double complex[::1] ca,
          int64_t[::1] jb, int64_t[::1] kb, double complex[::1] cb,
          int64_t jmin, int64_t kmin, Py_ssize_t spanj, Py_ssize_t spank):
    cdef Py_ssize_t ia, ib, na = ja.shape[0], nb = jb.shape[0]
    cdef Py_ssize_t idx
    cdef double complex va
    out = np.zeros(spanj * spank, dtype=np.complex128)
    cdef double complex[::1] acc = out
    for ia in range(na):
        va = ca[ia]
        for ib in range(nb):
            idx = (ja[ia] + jb[ib] - jmin) * spank + (ka[ia] + kb[ib] - kmin)
            acc[idx] = acc[idx] + va * cb[ib]
    return out
