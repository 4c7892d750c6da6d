"""Approximate truncated transition amplitudes.

The amplitude for (a, b) -> (a', b') is a finite sum over the bath output
index l' <= L and normal-mode indices kappa, chi, kappa', chi' <= N of

    z_u^(kappa - kappa') z_v^(chi - chi') f[...] * (omega_u omega_v / omega_x omega_y)
        * sqrt((1 - r) / (pi (1 + r))),

with f = I[a', l', kappa', chi'] I[b', l', kappa, chi] J[b, a, kappa, chi, kappa', chi', r]
and z_u = exp(-i omega_u t), z_v = exp(-i omega_v t).  f does not depend on
t, so the terms are grouped by (kappa - kappa', chi - chi') once; every time
step afterwards costs (2N+1)^2 phase multiplications per amplitude.

Expanding J along its Mehler series makes every such group a correlation of
two arrays P[kappa, chi] = I[p, l', kappa, chi] I[q, l, kappa, chi], which is
how the grouped sums are built.

Index convention: A[a, b, a', b'] maps the coefficient of |b><a| in the input
to the coefficient of |b'><a'| in the output.
"""
import itertools
from dataclasses import dataclass
from decimal import Decimal, localcontext

import numpy as np
from mpmath import mp, mpf, mpc

from . import _fixed
from .errors import DomainError
from .gauss_integrals import (
    hermite_product_quadrature, integral_J, intensity_cap, mehler_cutoff,
    thermal_kernel_matrix,
)


@dataclass(frozen=True)
class TruncationSpec:
    """D: largest system level; L: bath output cutoff; N: normal-mode cutoff; N_prime: refinement order."""

    D: int = 3
    L: int = 2
    N: int = 6
    N_prime: int = None

    def __post_init__(self):
        if min(self.D, self.L, self.N) < 0:
            raise DomainError("D, L and N must be nonnegative")
        if self.N_prime is not None and self.N_prime <= self.N:
            raise DomainError("N_prime must exceed N")

    @property
    def term_count(self):
        """Terms per amplitude before parity pruning: (L+1)(N+1)^4."""
        return (self.L + 1) * (self.N + 1) ** 4


def amplitude_prefactor(frame, r):
    """(omega_u omega_v / (omega_x omega_y)) * sqrt((1 - r) / (pi (1 + r)))."""
    r = mpf(r)
    return frame.jacobian * mp.sqrt((1 - r) / (mp.pi * (1 + r)))


def path_integrand_f(a, b, a_p, b_p, ell_p, kappa, kappa_p, chi, chi_p, table, r, frame,
                     tail_tol=mpf("1e-40")):
    """f = I[a', l', kappa', chi'] I[b', l', kappa, chi] J[b, a, kappa, chi, kappa', chi', r]."""
    if (a_p + ell_p + kappa_p + chi_p) % 2 or (b_p + ell_p + kappa + chi) % 2:
        return mpf(0)
    j, _ = integral_J(b, a, kappa, chi, kappa_p, chi_p, r, frame, tail_tol=tail_tol, table=table)
    return table[a_p, ell_p, kappa_p, chi_p] * table[b_p, ell_p, kappa, chi] * j


def path_integrand_direct(a, b, a_p, b_p, ell_p, kappa, kappa_p, chi, chi_p, r, frame, nodes=None):
    """f by one 8-D whitened quadrature over (x1..x4, y1..y4); oracle for tiny indices."""
    u1, u2, v1, v2 = frame.coefficients
    (k11, k12), (k21, k22) = thermal_kernel_matrix(r)

    def e(*pairs):
        row = [0] * 8
        for i, c in pairs:
            row[i] = c
        return tuple(row)

    # slots 0..3 are x1..x4, slots 4..7 are y1..y4
    factors = [(a_p, e((0, 1))), (b_p, e((1, 1))), (b, e((2, 1))), (a, e((3, 1))),
               (ell_p, e((4, 1))), (ell_p, e((5, 1)))]
    for slot, (k, c) in enumerate([(kappa_p, chi_p), (kappa, chi), (kappa, chi), (kappa_p, chi_p)]):
        factors.append((k, e((slot, u1), (slot + 4, u2))))
        factors.append((c, e((slot, v1), (slot + 4, v2))))
    extra = [[mpf(0)] * 8 for _ in range(8)]
    extra[6][6], extra[6][7], extra[7][6], extra[7][7] = k11, k12, k21, k22
    return hermite_product_quadrature(factors, extra=extra, nodes=nodes)


@dataclass(frozen=True)
class GroupedSums:
    """G[a, b, a', b', dk + N, dc + N]: time-independent sums over kappa - kappa' = dk, chi - chi' = dc.

    Includes the amplitude prefactor.  ``mehler_tail`` bounds the error from
    truncating the J series (zero at r = 0).
    """

    values: np.ndarray
    spec: TruncationSpec
    r: object
    frame_digest: str
    precision_bits: int
    mehler_tail: object
    _fixed_values: np.ndarray = None
    _fixed_bits: int = 0

    @property
    def N(self):
        return self.spec.N


def _fixed_bits(precision_bits):
    return precision_bits + 32


def build_grouped_sums(spec, table, r, frame, tail_tol=mpf("1e-40")):
    """Populate the grouped sums for every (a, b, a', b') <= D."""
    r = mpf(r)
    D, L, N = spec.D, spec.L, spec.N
    prec = table.precision_bits
    with mp.workprec(prec):
        cap = intensity_cap(frame)
        m_top, j_tail = mehler_cutoff(r, tail_tol, cap)
        if not table.covers(D, max(L, m_top), N):
            raise DomainError(
                f"integral table must cover a <= {D}, l <= {max(L, m_top)}, kappa <= {N}")
        bits = _fixed_bits(prec)
        ifix = _fixed.zeros((D + 1, max(L, m_top) + 1, N + 1, N + 1))
        for idx in itertools.product(range(D + 1), range(max(L, m_top) + 1), range(N + 1), range(N + 1)):
            v = table[idx]
            if v:
                ifix[idx] = _fixed.to_fixed(v, bits)
        weights = [_fixed.to_fixed(r ** l, bits) for l in range(m_top + 1)] if r else [1 << bits]
        n1 = N + 1
        pairs = D + 1
        acc = _fixed.zeros((pairs, pairs, pairs, pairs, 2 * N + 1, 2 * N + 1))
        for ell_p in range(L + 1):
            for ell in range(m_top + 1):
                if not weights[ell]:
                    continue
                # P[(p, q), kappa, chi] = I[p, l', kappa, chi] I[q, l, kappa, chi]
                prod = _fixed.rescale(ifix[:, ell_p, None, :, :] * ifix[None, :, ell, :, :], bits)
                prod = prod.reshape(pairs * pairs, n1, n1)
                part = _fixed.zeros((pairs * pairs, pairs * pairs, 2 * N + 1, 2 * N + 1))
                for dk in range(-N, N + 1):
                    lo, hi = max(0, -dk), min(N, N - dk)
                    # rows kappa = kappa' + dk on the (b', b) side, kappa' on the (a', a) side
                    x1 = prod[:, lo + dk:hi + dk + 1, :].transpose(1, 0, 2).reshape(hi - lo + 1, -1)
                    x2 = prod[:, lo:hi + 1, :].transpose(1, 0, 2).reshape(hi - lo + 1, -1)
                    m4 = np.dot(x1.T, x2).reshape(pairs * pairs, n1, pairs * pairs, n1)
                    for dc in range(-N, N + 1):
                        # sum over chi' of M[(s1, chi' + dc), (s2, chi')]
                        part[:, :, dk + N, dc + N] = np.diagonal(
                            m4, offset=-dc, axis1=1, axis2=3).sum(axis=-1)
                part = _fixed.rescale(part, bits) * weights[ell]
                # s1 = (b', b), s2 = (a', a) -> acc[a, b, a', b']
                acc += _fixed.rescale(part, bits).reshape(
                    pairs, pairs, pairs, pairs, 2 * N + 1, 2 * N + 1).transpose(3, 1, 2, 0, 4, 5)
        pref = frame.jacobian * (1 - r)
        pfix = _fixed.to_fixed(pref, bits)
        gfix = _fixed.rescale(acc * pfix, bits)
        values = np.empty(gfix.shape, dtype=object)
        for idx, v in np.ndenumerate(gfix):
            values[idx] = _fixed.from_fixed(v, bits) if v else mpf(0)
        # J truncation: (L+1)(N+1)^4 terms, each |I I| <= cap^2, times the prefactor
        tail = amplitude_prefactor(frame, r) * spec.term_count * cap ** 2 * j_tail
    return GroupedSums(values, spec, r, table.frame_digest, prec, tail, gfix, bits)


def grouped_sums_direct(spec, table, r, frame, tail_tol=mpf("1e-40")):
    """Reference grouping: sum f term by term (slow; for tests at small N)."""
    D, L, N = spec.D, spec.L, spec.N
    pref = amplitude_prefactor(frame, r)
    out = np.empty((D + 1,) * 4 + (2 * N + 1, 2 * N + 1), dtype=object)
    out.fill(mpf(0))
    rng = range(N + 1)
    for a, b, a_p, b_p in itertools.product(range(D + 1), repeat=4):
        if (a + b + a_p + b_p) % 2:
            continue
        for ell_p, k, kp, c, cp in itertools.product(range(L + 1), rng, rng, rng, rng):
            f = path_integrand_f(a, b, a_p, b_p, ell_p, k, kp, c, cp, table, r, frame, tail_tol)
            if f:
                out[a, b, a_p, b_p, k - kp + N, c - cp + N] += f * pref
    return out


def _phases(omega, t, n, bits):
    """Fixed-point (cos, -sin) of omega t d for d = -n..n, i.e. exp(-i omega t d)."""
    re, im = [0] * (2 * n + 1), [0] * (2 * n + 1)
    re[n] = 1 << bits
    for d in range(1, n + 1):
        phi = omega * t * d
        c, s = _fixed.to_fixed(mp.cos(phi), bits), _fixed.to_fixed(mp.sin(phi), bits)
        re[n + d], im[n + d] = c, -s
        re[n - d], im[n - d] = c, s
    return np.array(re, dtype=object), np.array(im, dtype=object)


@dataclass(frozen=True)
class AmplitudeTensor:
    """Complex A[a, b, a', b'] at time t (seconds)."""

    values: np.ndarray
    t: object
    spec: TruncationSpec
    frame_digest: str
    precision_bits: int

    def __getitem__(self, idx):
        return self.values[idx]

    @property
    def D(self):
        return self.values.shape[0] - 1

    def to_csv(self):
        """RFC 4180 text with columns a,b,a_p,b_p,re,im, row-major over (a, b, a', b')."""
        digits = csv_digits(self.precision_bits)
        lines = ["a,b,a_p,b_p,re,im"]
        for (a, b, ap, bp), v in np.ndenumerate(self.values):
            lines.append(f"{a},{b},{ap},{bp},{format_fixed(v.real, digits)},{format_fixed(v.imag, digits)}")
        return "\r\n".join(lines) + "\r\n"


def csv_digits(precision_bits):
    """Fixed decimal digits written per value: floor(precision_bits log10 2) - 5."""
    return int(precision_bits * 0.30102999566398120) - 5


def format_fixed(x, digits):
    """Exact decimal rendering of an mpf rounded half-even to ``digits`` places."""
    sign, man, exp, _ = mpf(x)._mpf_
    if not man:
        return "0." + "0" * digits if digits else "0"
    with localcontext() as ctx:
        ctx.prec = max(50, abs(exp) + man.bit_length() + digits + 10)
        d = Decimal(-int(man) if sign else int(man)) * (Decimal(2) ** exp)
        q = d.quantize(Decimal(1).scaleb(-digits))
        if q == 0:
            q = abs(q)
        return format(q, "f")


def amplitudes_at(t, sums, frame):
    """A[a, b, a', b'](t) = sum z_u^dk z_v^dc G[a, b, a', b', dk, dc]."""
    t = mpf(t)
    if t < 0:
        raise DomainError("t must be nonnegative")
    N, bits = sums.N, sums._fixed_bits
    with mp.workprec(sums.precision_bits + 32):
        ur, ui = _phases(frame.omega_u, t, N, bits)
        vr, vi = _phases(frame.omega_v, t, N, bits)
    zr = _fixed.rescale(np.outer(ur, vr) - np.outer(ui, vi), bits).reshape(-1)
    zi = _fixed.rescale(np.outer(ur, vi) + np.outer(ui, vr), bits).reshape(-1)
    g = sums._fixed_values
    shape = g.shape[:4]
    flat = g.reshape(-1, zr.size)
    re = np.dot(flat, zr)
    im = np.dot(flat, zi)
    values = np.empty(len(re), dtype=object)
    with mp.workprec(sums.precision_bits):
        for i, (x, y) in enumerate(zip(re, im)):
            values[i] = mpc(_fixed.from_fixed(x, 2 * bits) if x else 0,
                            _fixed.from_fixed(y, 2 * bits) if y else 0)
    return AmplitudeTensor(values.reshape(shape), t, sums.spec, sums.frame_digest, sums.precision_bits)


def amplitude_sweep(times, sums, frame):
    """amplitudes_at for each time, in order."""
    return [amplitudes_at(t, sums, frame) for t in times]
