"""NumPy fallback for the coefficient-convolution core.

Same contract as the compiled module `_convcore`: dense-offset accumulation,
keys as int64 arrays, values as complex128.  The scatter runs over the smaller
operand so the vectorized inner axis is the larger one.  Within one scatter
the target indices are distinct (unique keys shifted by a constant), so plain
fancy-index accumulation is exact.
"""

import numpy as np


def conv1(ja, ca, jb, cb, jmin, span):
    out = np.zeros(span, dtype=np.complex128)
    if len(ja) > len(jb):
        ja, jb = jb, ja
        ca, cb = cb, ca
    base = jb - jmin
    for i in range(len(ja)):
        out[base + ja[i]] += ca[i] * cb
    return out


def conv2(ja, ka, ca, jb, kb, cb, jmin, kmin, spanj, spank):
    out = np.zeros(spanj * spank, dtype=np.complex128)
    if len(ja) > len(jb):
        ja, jb = jb, ja
        ka, kb = kb, ka
        ca, cb = cb, ca
    base = (jb - jmin) * spank + (kb - kmin)
    for i in range(len(ja)):
        out[base + ja[i] * spank + ka[i]] += ca[i] * cb
    return out
