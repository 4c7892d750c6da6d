"""Fixed-point big-integer helpers for the heavy contractions.

A real x is carried as the Python int round(x * 2**F).  numpy object arrays
of such ints multiply and add an order of magnitude faster than arrays of
mpf, and the only rounding is the explicit rescale after each product.
"""
import numpy as np
from mpmath import mp, mpf


def to_fixed(x, bits):
    """round(x * 2**bits) as a Python int (exact rounding of an mpf)."""
    return int(mp.nint(mp.ldexp(mpf(x), bits)))


def from_fixed(n, bits):
    """n / 2**bits as an mpf at the working precision."""
    return mp.ldexp(mpf(int(n)), -bits)


def rescale(n, bits):
    """Divide a product by 2**bits with round-half-up (works on object arrays)."""
    if bits <= 0:
        return n
    return (n + (1 << (bits - 1))) >> bits


def array_to_fixed(values, bits):
    arr = np.asarray(values, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = to_fixed(v, bits) if v != 0 else 0
    return out


def zeros(shape):
    out = np.empty(shape, dtype=object)
    out.fill(0)
    return out
