"""The two convolution backends must agree; the dict path guards huge spans."""

import numpy as np
import pytest

from latfac import _conv, _convpure


def _rand_map1(rng, n_keys, spread):
    keys = rng.choice(np.arange(-spread, spread + 1), size=n_keys, replace=False)
    return {int(k): complex(rng.normal(), rng.normal()) for k in keys}


def _rand_map2(rng, n_keys, spread):
    out = {}
    while len(out) < n_keys:
        jk = (int(rng.integers(-spread, spread + 1)), int(rng.integers(-spread, spread + 1)))
        out[jk] = complex(rng.normal(), rng.normal())
    return out


def _dict_conv1(a, b):
    out = {}
    for j1, c1 in a.items():
        for j2, c2 in b.items():
            out[j1 + j2] = out.get(j1 + j2, 0j) + c1 * c2
    return out


def _dict_conv2(a, b):
    out = {}
    for (j1, k1), c1 in a.items():
        for (j2, k2), c2 in b.items():
            key = (j1 + j2, k1 + k2)
            out[key] = out.get(key, 0j) + c1 * c2
    return out


def _close(got, want, tol=1e-12):
    keys = set(got) | set(want)
    return all(abs(got.get(k, 0j) - want.get(k, 0j)) <= tol for k in keys)


class TestAgreement:
    def test_conv1_matches_reference(self, rng):
        for _ in range(25):
            a = _rand_map1(rng, 8, 30)
            b = _rand_map1(rng, 5, 30)
            assert _close(_conv.convolve1(a, b), _dict_conv1(a, b))

    def test_conv2_matches_reference(self, rng):
        for _ in range(25):
            a = _rand_map2(rng, 8, 12)
            b = _rand_map2(rng, 5, 12)
            assert _close(_conv.convolve2(a, b), _dict_conv2(a, b))

    def test_pure_backend_matches_selected(self, rng):
        a = _rand_map1(rng, 12, 40)
        b = _rand_map1(rng, 9, 40)
        ja = np.fromiter(a.keys(), dtype=np.int64)
        ca = np.fromiter(a.values(), dtype=np.complex128)
        jb = np.fromiter(b.keys(), dtype=np.int64)
        cb = np.fromiter(b.values(), dtype=np.complex128)
        jmin = int(ja.min() + jb.min())
        span = int(ja.max() + jb.max()) - jmin + 1
        pure = _convpure.conv1(ja, ca, jb, cb, jmin, span)
        sel = _conv._impl.conv1(ja, ca, jb, cb, jmin, span)
        assert np.allclose(pure, sel, atol=1e-14)


class TestEdges:
    def test_empty_operand(self):
        assert _conv.convolve1({}, {0: 1.0}) == {}
        assert _conv.convolve2({(0, 0): 1.0}, {}) == {}

    def test_huge_span_falls_back_to_dict_path(self):
        a = {0: 1.0 + 0j, 1 << 27: 2.0 + 0j}
        b = {0: 3.0 + 0j}
        got = _conv.convolve1(a, b)
        assert got == {0: 3.0 + 0j, 1 << 27: 6.0 + 0j}

    def test_huge_span_2d(self):
        a = {(0, 0): 1.0 + 0j, (1 << 14, 1 << 14): 1.0 + 0j}
        b = {(1, 1): 1.0 + 0j}
        got = _conv.convolve2(a, b)
        assert got == {(1, 1): 1.0 + 0j, ((1 << 14) + 1, (1 << 14) + 1): 1.0 + 0j}

    def test_cancellation_drops_key(self):
        # exact cancellation must not leave a stored zero
        a = {0: 1.0 + 0j, 1: 1.0 + 0j}
        b = {0: 1.0 + 0j, 1: -1.0 + 0j}
        got = _conv.convolve1(a, b)  # (1+z)(1-z) = 1 - z^2
        assert got == {0: 1.0 + 0j, 2: -1.0 + 0j}

    def test_compiled_backend_present(self):
        # the build is expected to produce the extension in this environment
        assert _conv.BACKEND == "compiled"
