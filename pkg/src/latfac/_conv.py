"""Backend selection for sparse coefficient convolution.

Prefers the compiled core; falls back to the NumPy implementation when the
extension is absent or when LATFAC_PURE_PYTHON=1.  Both backends share the
dense-offset contract; callers that cannot bound the dense span (wildly
scattered frequencies) use the dict path here instead.
"""

import os

import numpy as np

from . import _convpure

if os.environ.get("LATFAC_PURE_PYTHON") == "1":
    _impl = _convpure
    BACKEND = "pure"
else:
    try:
        from . import _convcore as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _convpure
        BACKEND = "pure"

# Above this dense-span size the scatter arrays stop paying for themselves
# and a hash-map accumulation is used instead.
_DENSE_SPAN_CAP = 1 << 26


def _split1(coeffs):
    ja = np.fromiter(coeffs.keys(), dtype=np.int64, count=len(coeffs))
    ca = np.fromiter(coeffs.values(), dtype=np.complex128, count=len(coeffs))
    return ja, ca


def convolve1(a: dict, b: dict) -> dict:
    """Coefficient convolution of two 1-variable maps {j: c}."""
    if not a or not b:
        return {}
    ja, ca = _split1(a)
    jb, cb = _split1(b)
    jmin = int(ja.min() + jb.min())
    jmax = int(ja.max() + jb.max())
    span = jmax - jmin + 1
    if span > _DENSE_SPAN_CAP:
        out: dict = {}
        for j1, c1 in a.items():
            for j2, c2 in b.items():
                k = j1 + j2
                out[k] = out.get(k, 0.0) + c1 * c2
        return {k: v for k, v in out.items() if v != 0}
    dense = _impl.conv1(ja, ca, jb, cb, jmin, span)
    (nz,) = np.nonzero(dense)
    return {int(j + jmin): complex(dense[j]) for j in nz}


def _split2(coeffs):
    n = len(coeffs)
    ja = np.empty(n, dtype=np.int64)
    ka = np.empty(n, dtype=np.int64)
    ca = np.empty(n, dtype=np.complex128)
    for i, ((j, k), c) in enumerate(coeffs.items()):
        ja[i] = j
        ka[i] = k
        ca[i] = c
    return ja, ka, ca


def convolve2(a: dict, b: dict) -> dict:
    """Coefficient convolution of two 2-variable maps {(j, k): c}."""
    if not a or not b:
        return {}
    ja, ka, ca = _split2(a)
    jb, kb, cb = _split2(b)
    jmin = int(ja.min() + jb.min())
    kmin = int(ka.min() + kb.min())
    spanj = int(ja.max() + jb.max()) - jmin + 1
    spank = int(ka.max() + kb.max()) - kmin + 1
    if spanj * spank > _DENSE_SPAN_CAP:
        out: dict = {}
        for (j1, k1), c1 in a.items():
            for (j2, k2), c2 in b.items():
                key = (j1 + j2, k1 + k2)
                out[key] = out.get(key, 0.0) + c1 * c2
        return {k: v for k, v in out.items() if v != 0}
    dense = _impl.conv2(ja, ka, ca, jb, kb, cb, jmin, kmin, spanj, spank)
    (nz,) = np.nonzero(dense)
    return {
        (int(i // spank + jmin), int(i % spank + kmin)): complex(dense[i])
        for i in nz
    }
