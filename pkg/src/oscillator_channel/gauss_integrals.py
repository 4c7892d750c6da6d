"""Exact Hermite-Gaussian integrals.

Every integrand here is a product of Hermite functions of linear forms, i.e.
a polynomial times exp(-x.Q.x / 2).  The primary evaluator expands the
polynomial with exact integer Hermite coefficients and integrates monomials
with the Isserlis (Wick) moment recursion.  A whitened tensor Gauss-Hermite
rule, exact for the same polynomials, serves as an independent oracle.

I[a, l, kappa, chi] = int psi_a(x) psi_l(y) psi_kappa(u) psi_chi(v) dx dy,
    u = u1 x + u2 y,  v = v1 x + v2 y.

J[b, a, kappa, chi, kappa', chi', r] couples two such integrals through the
thermal kernel exp(-((1+r^2)(y^2+z^2) - 4 r y z) / (2 (1-r^2))), which by
Mehler's formula equals sqrt(pi (1-r^2)) sum_l r^l psi_l(y) psi_l(z).
"""
import hashlib
import itertools
import json
import math
import os
import struct
import zlib
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
from mpmath import mp, mpf

from . import _fixed
from .errors import DomainError, SingularForm
from .hermite import normalized_coefficients, polynomial_part_all

CACHE_MAGIC = b"OCIT"
CACHE_VERSION = 1


def guard_bits(precision_bits, degree):
    """Working precision for a polynomial of the given total degree.

    Monomial expansion of Hermite polynomials cancels roughly two bits per
    degree; the extra 64 bits absorb accumulation error.
    """
    return precision_bits + 64 + 2 * degree


# --- quadratic forms and moments ---------------------------------------------


@dataclass(frozen=True)
class QuadraticForm:
    """Symmetric positive-definite Q of the weight exp(-x.Q.x / 2)."""

    matrix: tuple
    _moments: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        rows = tuple(tuple(mpf(v) for v in row) for row in self.matrix)
        object.__setattr__(self, "matrix", rows)
        d = len(rows)
        if any(len(row) != d for row in rows):
            raise SingularForm("matrix must be square")
        for i in range(d):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise SingularForm("matrix must be symmetric")
        if any(p <= 0 for p in self.pivots):
            raise SingularForm("matrix is not positive definite")

    @classmethod
    def from_linear_forms(cls, coeff_rows, extra=None):
        """Q = extra + sum_i c_i c_i^T for the exponents -(c_i . x)^2 / 2."""
        d = len(coeff_rows[0]) if coeff_rows else len(extra)
        q = [[mpf(0)] * d for _ in range(d)]
        if extra is not None:
            for i in range(d):
                for j in range(d):
                    q[i][j] += mpf(extra[i][j])
        for c in coeff_rows:
            for i in range(d):
                for j in range(d):
                    q[i][j] += mpf(c[i]) * mpf(c[j])
        return cls(tuple(tuple(row) for row in q))

    @property
    def dimension(self):
        return len(self.matrix)

    @cached_property
    def pivots(self):
        """Pivots of the symmetric LDL^T factorization (all > 0 iff Q is SPD)."""
        d = self.dimension
        a = [list(row) for row in self.matrix]
        piv = []
        for k in range(d):
            p = a[k][k]
            piv.append(p)
            if p <= 0:
                return tuple(piv)
            for i in range(k + 1, d):
                f = a[i][k] / p
                for j in range(k + 1, d):
                    a[i][j] -= f * a[k][j]
        return tuple(piv)

    @cached_property
    def determinant(self):
        return mp.fprod(self.pivots)

    @cached_property
    def covariance(self):
        inv = mp.inverse(mp.matrix([list(r) for r in self.matrix]))
        d = self.dimension
        return tuple(tuple(inv[i, j] for j in range(d)) for i in range(d))

    @cached_property
    def normalization(self):
        """int exp(-x.Q.x/2) dx = sqrt((2 pi)^d / det Q)."""
        return mp.sqrt((2 * mp.pi) ** self.dimension / self.determinant)

    def expectation(self, alpha):
        """E[x^alpha] under N(0, Q^{-1}), memoized on the multi-index."""
        alpha = tuple(alpha)
        if sum(alpha) % 2:
            return mpf(0)
        cache = self._moments
        if alpha in cache:
            return cache[alpha]
        if not any(alpha):
            return mpf(1)
        # Isserlis: pair the first occupied slot with every remaining factor
        i = next(k for k, e in enumerate(alpha) if e)
        beta = list(alpha)
        beta[i] -= 1
        sigma = self.covariance
        total = mpf(0)
        for j, e in enumerate(beta):
            if e:
                gamma = list(beta)
                gamma[j] -= 1
                total += e * sigma[i][j] * self.expectation(gamma)
        cache[alpha] = total
        return total


def gaussian_moment(form, alpha):
    """int x^alpha exp(-x.Q.x / 2) dx (zero for odd total degree)."""
    if len(alpha) != form.dimension:
        raise DomainError("multi-index dimension does not match the form")
    if any(e < 0 for e in alpha):
        raise DomainError("multi-index entries must be nonnegative")
    return form.normalization * form.expectation(alpha)


def bivariate_moments(form, degree):
    """Array M[p, q] = int x^p y^q exp(-x.Q.x/2) for p + q <= degree (else 0)."""
    (s11, s12), (_, s22) = form.covariance
    m = np.empty((degree + 1, degree + 1), dtype=object)
    m.fill(mpf(0))
    m[0, 0] = form.normalization
    for total in range(2, degree + 1, 2):
        for p in range(total + 1):
            q = total - p
            if p:
                v = mpf(0)
                if p >= 2:
                    v += (p - 1) * s11 * m[p - 2, q]
                if q:
                    v += q * s12 * m[p - 1, q - 1]
            else:
                v = (q - 1) * s22 * m[0, q - 2]
            m[p, q] = v
    return m


# --- polynomial expansion ----------------------------------------------------


def linear_hermite_poly(n, c1, c2):
    """Coefficients B[i, j] of x^i y^j in h_n(c1 x + c2 y) (h_n = normalized H_n)."""
    coeffs = normalized_coefficients(n)
    out = np.empty((n + 1, n + 1), dtype=object)
    out.fill(mpf(0))
    p1 = [mpf(1)]
    p2 = [mpf(1)]
    for _ in range(n):
        p1.append(p1[-1] * c1)
        p2.append(p2[-1] * c2)
    for d, c in enumerate(coeffs):
        if not c:
            continue
        for i in range(d + 1):
            out[i, d - i] += c * math.comb(d, i) * p1[i] * p2[d - i]
    return out


def _poly_mul(a, b):
    out = np.empty((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1), dtype=object)
    out.fill(mpf(0))
    for (i, j), v in np.ndenumerate(a):
        if v:
            out[i:i + b.shape[0], j:j + b.shape[1]] += v * b
    return out


def _separable(frame):
    return frame.u2 == 0 and frame.v1 == 0


def overlap_1d(n, m, c):
    """int psi_n(x) psi_m(c x) dx; exactly the Kronecker delta when c == 1."""
    if (n + m) % 2:
        return mpf(0)
    if c == 1:
        return mpf(1) if n == m else mpf(0)
    with mp.workprec(guard_bits(mp.prec, n + m)):
        c = mpf(c)
        form = QuadraticForm(((1 + c * c,),))
        cn, cm = normalized_coefficients(n), normalized_coefficients(m)
        total = mpf(0)
        for i, a in enumerate(cn):
            if not a:
                continue
            for j, b in enumerate(cm):
                if b and (i + j) % 2 == 0:
                    total += a * b * c ** j * gaussian_moment(form, (i + j,))
    return +total


def hermite_gram(nmax):
    """Matrix of int psi_m psi_n dx for m, n <= nmax through the moment engine."""
    prec = mp.prec
    with mp.workprec(guard_bits(prec, 2 * nmax)):
        form = QuadraticForm(((2,),))
        coeffs = [normalized_coefficients(n) for n in range(nmax + 1)]
        gram = [[mpf(0)] * (nmax + 1) for _ in range(nmax + 1)]
        for m in range(nmax + 1):
            for n in range(m, nmax + 1):
                if (m + n) % 2:
                    continue
                val = mp.fsum(a * b * gaussian_moment(form, (i + j,))
                              for i, a in enumerate(coeffs[m]) if a
                              for j, b in enumerate(coeffs[n]) if b)
                gram[m][n] = gram[n][m] = val
    return [[+v for v in row] for row in gram]


def _frame_form(frame):
    u1, u2, v1, v2 = (mpf(x) for x in frame.coefficients)
    return QuadraticForm.from_linear_forms([(1, 0), (0, 1), (u1, u2), (v1, v2)])


def integral_I(a, ell, kappa, chi, frame):
    """I[a, ell, kappa, chi] by exact polynomial-times-Gaussian integration."""
    if min(a, ell, kappa, chi) < 0:
        raise DomainError("indices must be nonnegative")
    if (a + ell + kappa + chi) % 2:
        return mpf(0)
    if _separable(frame):
        return overlap_1d(a, kappa, frame.u1) * overlap_1d(ell, chi, frame.v2)
    degree = a + ell + kappa + chi
    prec = mp.prec
    with mp.workprec(guard_bits(prec, degree)):
        u1, u2, v1, v2 = (mpf(x) for x in frame.coefficients)
        base = np.empty((a + 1, ell + 1), dtype=object)
        ca, cl = normalized_coefficients(a), normalized_coefficients(ell)
        for i in range(a + 1):
            for j in range(ell + 1):
                base[i, j] = ca[i] * cl[j]
        poly = _poly_mul(_poly_mul(base, linear_hermite_poly(kappa, u1, u2)),
                         linear_hermite_poly(chi, v1, v2))
        moments = bivariate_moments(_frame_form(frame), degree)
        terms = [v * moments[i, j] for (i, j), v in np.ndenumerate(poly)
                 if v and (i + j) % 2 == 0]
        total = mp.fsum(sorted(terms, key=abs))
    return +total


def intensity_cap(frame):
    """Cauchy-Schwarz cap on |I|: |det(u, v)|^{-1/2} = (omega_x omega_y / (omega_u omega_v))^{1/4}."""
    return (1 / frame.jacobian) ** mpf(0.25)


# --- batch table -------------------------------------------------------------


@dataclass(frozen=True)
class IntegralTable:
    """Dense table of I[a, l, kappa, chi] for a <= a_max, l <= ell_max, kappa, chi <= kappa_max."""

    values: np.ndarray
    frame_digest: str
    precision_bits: int

    @property
    def a_max(self):
        return self.values.shape[0] - 1

    @property
    def ell_max(self):
        return self.values.shape[1] - 1

    @property
    def kappa_max(self):
        return self.values.shape[2] - 1

    def __getitem__(self, idx):
        return self.values[idx]

    def covers(self, a_max, ell_max, kappa_max):
        return a_max <= self.a_max and ell_max <= self.ell_max and kappa_max <= self.kappa_max

    def max_abs(self):
        return max(abs(v) for v in self.values.flat)

    def key(self):
        return table_key(self.frame_digest, self.precision_bits,
                         self.a_max, self.ell_max, self.kappa_max)

    # serialization: magic, version, then zlib-compressed JSON of exact mantissas
    def to_bytes(self):
        entries = []
        for v in self.values.flat:
            sign, man, exp, _ = v._mpf_
            entries.append([-int(man) if sign else int(man), int(exp)] if man else [0, 0])
        payload = {
            "shape": list(self.values.shape),
            "frame": self.frame_digest,
            "precision_bits": self.precision_bits,
            "entries": entries,
        }
        body = zlib.compress(json.dumps(payload, separators=(",", ":")).encode())
        return CACHE_MAGIC + struct.pack("<H", CACHE_VERSION) + body

    @classmethod
    def from_bytes(cls, blob):
        if blob[:4] != CACHE_MAGIC:
            raise ValueError("not an integral-table cache file")
        (version,) = struct.unpack("<H", blob[4:6])
        if version != CACHE_VERSION:
            raise ValueError(f"unsupported cache version {version}")
        payload = json.loads(zlib.decompress(blob[6:]))
        with mp.workprec(payload["precision_bits"]):
            flat = [mpf((m, e)) if m else mpf(0) for m, e in payload["entries"]]
        values = np.empty(len(flat), dtype=object)
        values[:] = flat
        return cls(values.reshape(payload["shape"]), payload["frame"], payload["precision_bits"])


def table_key(frame_digest, precision_bits, a_max, ell_max, kappa_max):
    text = f"{frame_digest}:{precision_bits}:{a_max}:{ell_max}:{kappa_max}"
    return hashlib.sha256(text.encode()).hexdigest()[:32]


def _fixed_linear_polys(nmax, c1, c2, bits):
    return [_fixed.array_to_fixed(linear_hermite_poly(n, c1, c2), bits) for n in range(nmax + 1)]


@lru_cache(maxsize=None)
def _coef_l1_log2(n):
    """log2 of sum_q |c_q| over the monomial coefficients of h_n."""
    with mp.workprec(64):
        return float(mp.log(mp.fsum(abs(c) for c in normalized_coefficients(n)), 2))


def table_bits(precision_bits, frame, a_max, ell_max, kappa_max):
    """Working precision for the fixed-point table kernel.

    Rounding errors are absolute, so they are amplified by the coefficient
    1-norms of every polynomial factor and by the size of the largest
    moment; at large bath indices this grows faster than the per-degree
    allowance of guard_bits.
    """
    degree = a_max + ell_max + 2 * kappa_max
    with mp.workprec(64):
        u1, u2, v1, v2 = (abs(mpf(x)) for x in frame.coefficients)
        lu, lv = (float(mp.log(max(mpf(1), s), 2)) for s in (u1 + u2, v1 + v2))
        form = _frame_form(frame)
        (s11, s12), (_, s22) = form.covariance
        smax = float(mp.log(max(mpf(1), (s11 + s22 + abs(s12) * 2)), 2))
        moment = (float(mp.loggamma(degree + 1)) / 2 / math.log(2) + degree * smax / 2
                  + float(mp.log(form.normalization, 2)))
    amp = (_coef_l1_log2(a_max) + _coef_l1_log2(ell_max) + 2 * _coef_l1_log2(kappa_max)
           + kappa_max * (lu + lv) + max(0.0, moment))
    return max(guard_bits(precision_bits, degree), precision_bits + 64 + int(math.ceil(amp)))


def _build_values(frame, a_max, ell_max, kappa_max, precision_bits):
    shape = (a_max + 1, ell_max + 1, kappa_max + 1, kappa_max + 1)
    values = np.empty(shape, dtype=object)
    values.fill(mpf(0))
    if _separable(frame):
        with mp.workprec(precision_bits):
            ox = [[overlap_1d(a, k, frame.u1) for k in range(kappa_max + 1)] for a in range(a_max + 1)]
            oy = [[overlap_1d(l, c, frame.v2) for c in range(kappa_max + 1)] for l in range(ell_max + 1)]
            for a, l, k, c in itertools.product(*map(range, shape)):
                values[a, l, k, c] = ox[a][k] * oy[l][c]
        return values

    degree = a_max + ell_max + 2 * kappa_max
    bits = table_bits(precision_bits, frame, a_max, ell_max, kappa_max)
    with mp.workprec(bits):
        u1, u2, v1, v2 = (mpf(x) for x in frame.coefficients)
        moments = _fixed.array_to_fixed(bivariate_moments(_frame_form(frame), degree), bits)
        upolys = _fixed_linear_polys(kappa_max, u1, u2, bits)
        vpolys = _fixed_linear_polys(kappa_max, v1, v2, bits)
        ca = [[_fixed.to_fixed(c, bits) for c in normalized_coefficients(a)] for a in range(a_max + 1)]
        cl = [[_fixed.to_fixed(c, bits) for c in normalized_coefficients(l)] for l in range(ell_max + 1)]

        size = degree + 1
        for chi in range(kappa_max + 1):
            # W[p, q] = sum_ij V_chi[i, j] M[p + i, q + j]
            span = size - chi
            w = _fixed.zeros((span, span))
            for (i, j), c in np.ndenumerate(vpolys[chi]):
                if c:
                    w += c * moments[i:i + span, j:j + span]
            w = _fixed.rescale(w, bits)
            for kappa in range(kappa_max + 1):
                # X[p, q] = sum_ij U_kappa[i, j] W[p + i, q + j], p <= a_max, q <= ell_max
                x = _fixed.zeros((a_max + 1, ell_max + 1))
                for (i, j), c in np.ndenumerate(upolys[kappa]):
                    if c:
                        x += c * w[i:i + a_max + 1, j:j + ell_max + 1]
                x = _fixed.rescale(x, bits)
                for a in range(a_max + 1):
                    xa = np.dot(np.array(ca[a], dtype=object), x[:a + 1, :])
                    for ell in range(ell_max + 1):
                        if (a + ell + kappa + chi) % 2:
                            continue
                        acc = sum(cl[ell][q] * xa[q] for q in range(ell + 1) if cl[ell][q])
                        values[a, ell, kappa, chi] = _fixed.from_fixed(acc, 3 * bits)
    with mp.workprec(precision_bits):
        for idx, v in np.ndenumerate(values):
            values[idx] = +v
    return values


def build_integral_table(frame, a_max, ell_max, kappa_max, precision_bits=None, cache_dir=None):
    """All I[a, l, kappa, chi] up to the given bounds, parity zeros stored as exact 0.

    With ``cache_dir`` the table is read from / written to a versioned binary
    file keyed by the frame digest, precision and bounds.
    """
    precision_bits = precision_bits or frame.precision_bits
    digest = frame.digest()
    path = None
    if cache_dir is not None:
        key = table_key(digest, precision_bits, a_max, ell_max, kappa_max)
        path = os.path.join(cache_dir, f"itable-{key}.bin")
        if os.path.exists(path):
            with open(path, "rb") as fh:
                table = IntegralTable.from_bytes(fh.read())
            if table.frame_digest == digest:
                return table
    table = IntegralTable(_build_values(frame, a_max, ell_max, kappa_max, precision_bits),
                          digest, precision_bits)
    if path is not None:
        os.makedirs(cache_dir, exist_ok=True)
        tmp = path + ".tmp"
        with open(tmp, "wb") as fh:
            fh.write(table.to_bytes())
        os.replace(tmp, path)
    return table


# --- J integrals -------------------------------------------------------------


def mehler_weights_prefactor(r):
    """sqrt(pi (1 - r^2)), the kernel-to-series normalization."""
    return mp.sqrt(mp.pi * (1 - mpf(r) ** 2))


def mehler_cutoff(r, tail_tol, cap=1, min_terms=0):
    """Largest bath index M kept in the Mehler sum, and the certified tail bound.

    Terms beyond M are bounded by sqrt(pi (1-r^2)) cap^2 r^l, so the tail is
    at most sqrt(pi (1-r^2)) cap^2 r^(M+1) / (1-r).
    """
    r = mpf(r)
    if not 0 <= r < 1:
        raise DomainError("r must lie in [0, 1)")
    if r == 0:
        return max(0, min_terms), mpf(0)
    if tail_tol <= 0:
        raise DomainError("tail_tol must be positive")
    pref = mehler_weights_prefactor(r) * mpf(cap) ** 2
    m = int(mp.ceil(mp.log(mpf(tail_tol) * (1 - r) / pref) / mp.log(r)))
    m = max(m, min_terms, 0)
    return m, pref * r ** (m + 1) / (1 - r)


def integral_J(b, a, kappa, chi, kappa_p, chi_p, r, frame, tail_tol=mpf("1e-40"), table=None):
    """J via the Mehler expansion of the thermal kernel; returns ``(value, tail_bound)``."""
    r = mpf(r)
    if not 0 <= r < 1:
        raise DomainError("r must lie in [0, 1)")
    m, tail = mehler_cutoff(r, tail_tol, intensity_cap(frame))
    # term l needs l = b + kappa + chi = a + kappa' + chi' (mod 2); at r = 0 only l = 0 exists
    if (b + kappa + chi - a - kappa_p - chi_p) % 2 or (r == 0 and (b + kappa + chi) % 2):
        return mpf(0), tail
    kmax = max(kappa, chi, kappa_p, chi_p)
    if table is None or not table.covers(max(a, b), m, kmax):
        table = build_integral_table(frame, max(a, b), m, kmax, mp.prec)
    pref = mehler_weights_prefactor(r)
    terms = [r ** l * table[b, l, kappa, chi] * table[a, l, kappa_p, chi_p] for l in range(m + 1)]
    return pref * mp.fsum(terms), tail


# --- quadrature oracle -------------------------------------------------------


@lru_cache(maxsize=64)
def gauss_hermite_rule(n, precision_bits):
    """Probabilists' Gauss-Hermite nodes and weights normalized to sum 1.

    Double-precision nodes are polished by Newton steps on He_n.
    """
    with mp.workprec(precision_bits + 20):
        seeds, _ = np.polynomial.hermite_e.hermegauss(n)

        def he(x):
            p0, p1 = mpf(1), x
            if n == 0:
                return p0, mpf(0)
            for k in range(1, n):
                p0, p1 = p1, x * p1 - k * p0
            return p1, p0  # He_n, He_{n-1}

        nodes, weights = [], []
        for s in seeds:
            x = mpf(s)
            for _ in range(100):
                hn, hm = he(x)
                step = hn / (n * hm)
                x -= step
                if abs(step) < mpf(2) ** (-precision_bits - 10) * max(1, abs(x)):
                    break
            _, hm = he(x)
            nodes.append(x)
            weights.append(mp.factorial(n) / (n * n * hm * hm))
        total = mp.fsum(weights)
        weights = [w / total for w in weights]
    with mp.workprec(precision_bits):
        return tuple(+x for x in nodes), tuple(+w for w in weights)


def hermite_product_quadrature(factors, extra=None, nodes=None):
    """int prod_i psi_{n_i}(c_i . xi) exp(-xi.K.xi / 2) d xi by whitened tensor Gauss-Hermite.

    ``factors`` is a sequence of ``(n_i, c_i)``; ``extra`` is the optional
    Gaussian matrix K.  The whole exponent is whitened with a symmetric
    eigendecomposition, after which the polynomial part is integrated exactly
    when ``nodes`` >= degree/2 + 1 per axis (default degree/2 + 2).
    """
    coeff_rows = [tuple(mpf(v) for v in c) for _, c in factors]
    form = QuadraticForm.from_linear_forms(coeff_rows, extra)
    d = form.dimension
    degree = sum(n for n, _ in factors)
    nodes = nodes or degree // 2 + 2
    evals, evecs = mp.eigsy(mp.matrix([list(r) for r in form.matrix]))
    # xi = T eta with T = V diag(lambda^{-1/2})
    t = mp.matrix(d, d)
    for i in range(d):
        for j in range(d):
            t[i, j] = evecs[i, j] / mp.sqrt(evals[j])
    mapped = []
    for c in coeff_rows:
        mapped.append([mp.fsum(c[i] * t[i, j] for i in range(d)) for j in range(d)])
    xs, ws = gauss_hermite_rule(nodes, mp.prec)
    orders = [n for n, _ in factors]
    total = mpf(0)
    for combo in itertools.product(range(nodes), repeat=d):
        weight = mp.fprod(ws[k] for k in combo)
        eta = [xs[k] for k in combo]
        value = weight
        for n, row in zip(orders, mapped):
            arg = mp.fsum(row[j] * eta[j] for j in range(d))
            value *= polynomial_part_all(n, arg)[n]
        total += value
    jac = mp.sqrt(mp.fprod(evals))
    return total * (2 * mp.pi) ** (mpf(d) / 2) / jac


def integral_I_quadrature(a, ell, kappa, chi, frame, nodes=None):
    """Oracle for integral_I: 2-D whitened tensor Gauss-Hermite."""
    u1, u2, v1, v2 = frame.coefficients
    factors = [(a, (1, 0)), (ell, (0, 1)), (kappa, (u1, u2)), (chi, (v1, v2))]
    return hermite_product_quadrature(factors, nodes=nodes)


def thermal_kernel_matrix(r):
    """K with exp(-(y, z).K.(y, z) / 2) equal to the bath kernel."""
    r = mpf(r)
    s = 1 - r * r
    return ((1 + r * r) / s, -2 * r / s), (-2 * r / s, (1 + r * r) / s)


def integral_J_direct(b, a, kappa, chi, kappa_p, chi_p, r, frame, nodes=None):
    """Oracle for integral_J: 4-D whitened quadrature over (w, x, y, z), no Mehler series."""
    r = mpf(r)
    if not 0 <= r < 1:
        raise DomainError("r must lie in [0, 1)")
    u1, u2, v1, v2 = frame.coefficients
    (k11, k12), (k21, k22) = thermal_kernel_matrix(r)
    zero = mpf(0)
    extra = ((zero,) * 4, (zero,) * 4, (zero, zero, k11, k12), (zero, zero, k21, k22))
    factors = [
        (b, (1, 0, 0, 0)), (a, (0, 1, 0, 0)),
        (kappa, (u1, 0, u2, 0)), (chi, (v1, 0, v2, 0)),
        (kappa_p, (0, u1, 0, u2)), (chi_p, (0, v1, 0, v2)),
    ]
    return hermite_product_quadrature(factors, extra=extra, nodes=nodes)
