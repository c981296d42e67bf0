"""Philox4x64-10 inside numba kernels.

Bit-compatible with :class:`numpy.random.Philox`: a state created by
:func:`new_state` from ``(key0, key1, lane)`` produces the same ``random_raw``
sequence as ``Philox(key=[key0, key1], counter=[0, 0, 0, lane])``.

State layout (uint64[11]): key0, key1, ctr0..ctr3, buf0..buf3, buffer_pos.
"""

import numpy as np
from llvmlite import ir
from numba import njit, types
from numba.extending import intrinsic

_M0 = np.uint64(0xD2E7470EE14C6C93)
_M1 = np.uint64(0xCA5A826395121157)
_W0 = np.uint64(0x9E3779B97F4A7C15)
_W1 = np.uint64(0xBB67AE8584CAA73B)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_ZERO = np.uint64(0)
_TWO_M53 = 2.0 ** -53

STATE_SIZE = 11


@intrinsic
def _umulhi(typingctx, a, b):
    """High 64 bits of a 64x64 product, via a 128-bit LLVM multiply."""
    sig = types.uint64(types.uint64, types.uint64)

    def codegen(context, builder, signature, args):
        i128 = ir.IntType(128)
        prod = builder.mul(builder.zext(args[0], i128), builder.zext(args[1], i128))
        return builder.trunc(builder.lshr(prod, ir.Constant(i128, 64)), ir.IntType(64))

    return sig, codegen


@njit(cache=True, inline="always")
def _mulhilo(a, b):
    return _umulhi(a, b), a * b


@njit(cache=True, inline="always")
def _block(c0, c1, c2, c3, k0, k1):
    for r in range(10):
        if r > 0:
            k0 += _W0
            k1 += _W1
        hi0, lo0 = _mulhilo(_M0, c0)
        hi1, lo1 = _mulhilo(_M1, c2)
        c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
    return c0, c1, c2, c3


@njit(cache=True)
def _refill(st):
    # increment the 256-bit counter first, matching numpy
    st[2] += _ONE
    if st[2] == _ZERO:
        st[3] += _ONE
        if st[3] == _ZERO:
            st[4] += _ONE
            if st[4] == _ZERO:
                st[5] += _ONE
    st[6], st[7], st[8], st[9] = _block(st[2], st[3], st[4], st[5], st[0], st[1])
    st[10] = _ZERO


@njit(cache=True)
def new_state(key0, key1, lane):
    st = np.zeros(STATE_SIZE, dtype=np.uint64)
    st[0] = np.uint64(key0)
    st[1] = np.uint64(key1)
    st[5] = np.uint64(lane)
    st[10] = np.uint64(4)
    return st


@njit(cache=True)
def next_raw(st):
    if st[10] >= np.uint64(4):
        _refill(st)
    out = st[6 + np.int64(st[10])]
    st[10] += _ONE
    return out


@njit(cache=True)
def next_uniform(st):
    """Uniform on the open interval (0, 1): 53 random bits, centred in their cell."""
    return (np.float64(next_raw(st) >> _S11) + 0.5) * _TWO_M53


@njit(cache=True)
def next_exponential(st):
    return -np.log(next_uniform(st))


@njit(cache=True)
def fill_raw(st, out):
    n = out.shape[0]
    i = 0
    while i < n and st[10] < np.uint64(4):
        out[i] = st[6 + np.int64(st[10])]
        st[10] += _ONE
        i += 1
    # whole blocks straight from local counters; carry beyond ctr0 is
    # left to _refill (2**64 blocks per lane is out of reach)
    c0 = st[2]
    c1 = st[3]
    c2 = st[4]
    c3 = st[5]
    k0 = st[0]
    k1 = st[1]
    while n - i >= 4 and c0 < np.uint64(0xFFFFFFFFFFFFFFFF):
        c0 += _ONE
        a, b, c, d = _block(c0, c1, c2, c3, k0, k1)
        out[i] = a
        out[i + 1] = b
        out[i + 2] = c
        out[i + 3] = d
        i += 4
    st[2] = c0
    while i < n:
        out[i] = next_raw(st)
        i += 1


@njit(cache=True)
def fill_uniform(st, out):
    raw = np.empty(out.shape[0], dtype=np.uint64)
    fill_raw(st, raw)
    for i in range(out.shape[0]):
        out[i] = (np.float64(raw[i] >> _S11) + 0.5) * _TWO_M53
