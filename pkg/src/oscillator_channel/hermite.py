"""Hermite polynomials and Hermite functions in extended precision.

The normalized Hermite function is

    psi_n(x) = exp(-x**2 / 2) H_n(x) / sqrt(2**n n! sqrt(pi)),

evaluated through the recurrence on the normalized functions themselves,
which never forms n! or 2**n explicitly.  Scalar arguments are evaluated
with mpmath at the current working precision; float ndarrays take a
vectorized float64 path (used for dense grid checks).
"""
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from mpmath import mp, mpf, mpc

from .errors import DomainError

CHARLIER_CRAMER = "1.086435"
LEMMA1_CONSTANT = "1.74"


@lru_cache(maxsize=None)
def hermite_coefficients(n):
    """Exact integer coefficients of the physicists' Hermite polynomial H_n.

    Returns a tuple ``c`` with ``H_n(x) = sum(c[j] * x**j)``.
    """
    if n < 0:
        raise DomainError("order must be nonnegative")
    prev, cur = (1,), (0, 2)
    if n == 0:
        return prev
    for k in range(1, n):
        # H_{k+1} = 2x H_k - 2k H_{k-1}
        nxt = [0] * (k + 2)
        for j, c in enumerate(cur):
            nxt[j + 1] += 2 * c
        for j, c in enumerate(prev):
            nxt[j] -= 2 * k * c
        prev, cur = cur, tuple(nxt)
    return cur


def normalization(n):
    """1 / sqrt(2**n n! sqrt(pi)) at the working precision."""
    return 1 / mp.sqrt(mpf(2) ** n * mp.factorial(n) * mp.sqrt(mp.pi))


def normalized_coefficients(n):
    """Coefficients of h_n = H_n / sqrt(2**n n! sqrt(pi)), so psi_n = h_n exp(-x**2/2)."""
    scale = normalization(n)
    return [scale * c if c else mpf(0) for c in hermite_coefficients(n)]


def _is_float_array(x):
    return isinstance(x, np.ndarray) and x.dtype.kind in "fi"


def psi_all(nmax, x):
    """Values psi_0(x), ..., psi_nmax(x).

    For a float ndarray ``x`` the result is an array of shape
    ``(nmax + 1,) + x.shape``; otherwise a list of mpf values.
    """
    if nmax < 0:
        raise DomainError("order must be nonnegative")
    if _is_float_array(x):
        x = np.asarray(x, dtype=float)
        out = np.empty((nmax + 1,) + x.shape)
        out[0] = np.exp(-0.5 * x * x) / np.pi ** 0.25
        if nmax >= 1:
            out[1] = np.sqrt(2.0) * x * out[0]
        for k in range(1, nmax):
            out[k + 1] = (x * np.sqrt(2.0 / (k + 1)) * out[k]
                          - np.sqrt(k / (k + 1.0)) * out[k - 1])
        return out
    x = mpf(x)
    vals = [mp.exp(-x * x / 2) / mp.pi ** mpf(0.25)]
    if nmax >= 1:
        vals.append(mp.sqrt(2) * x * vals[0])
    for k in range(1, nmax):
        vals.append(x * mp.sqrt(mpf(2) / (k + 1)) * vals[k]
                    - mp.sqrt(mpf(k) / (k + 1)) * vals[k - 1])
    return vals


def polynomial_part_all(nmax, x):
    """Values h_0(x), ..., h_nmax(x) with psi_n = h_n exp(-x**2/2) (mpf only)."""
    x = mpf(x)
    vals = [1 / mp.pi ** mpf(0.25)]
    if nmax >= 1:
        vals.append(mp.sqrt(2) * x * vals[0])
    for k in range(1, nmax):
        vals.append(x * mp.sqrt(mpf(2) / (k + 1)) * vals[k]
                    - mp.sqrt(mpf(k) / (k + 1)) * vals[k - 1])
    return vals


def eval_psi(n, x):
    """Hermite function psi_n(x)."""
    return psi_all(n, x)[n]


def eval_psi_scaled(n, c, x):
    """Rescaled Hermite function sqrt(c) psi_n(c x), for c > 0."""
    if c <= 0:
        raise DomainError("scale c must be positive")
    if _is_float_array(x):
        return np.sqrt(c) * eval_psi(n, c * np.asarray(x, dtype=float))
    c = mpf(c)
    return mp.sqrt(c) * eval_psi(n, c * mpf(x))


def mehler_kernel(z, x, y):
    """Closed form of sum_n z**n psi_n(x) psi_n(y) for |z| < 1 (z may be complex)."""
    z = mpc(z) if isinstance(z, complex) or isinstance(z, mpc) else mpf(z)
    if abs(z) >= 1:
        raise DomainError("Mehler kernel requires |z| < 1")
    x, y = mpf(x), mpf(y)
    one_minus = 1 - z * z
    expo = (4 * x * y * z - (x * x + y * y) * (1 + z * z)) / (2 * one_minus)
    return mp.exp(expo) / mp.sqrt(mp.pi * one_minus)


def mehler_partial_sum(z, x, y, terms):
    """sum_{n < terms} z**n psi_n(x) psi_n(y); the series side of Mehler's formula."""
    px, py = psi_all(terms - 1, x), psi_all(terms - 1, y)
    return mp.fsum(z ** n * px[n] * py[n] for n in range(terms))


# --- zeros and 1-norms -------------------------------------------------------


def _bisect(f, lo, hi, flo, bits):
    width = mpf(2) ** (-bits)
    while hi - lo > width * max(1, abs(lo)):
        mid = (lo + hi) / 2
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return (lo + hi) / 2


def hermite_zeros(n, bits=None):
    """Nonnegative zeros of H_n in increasing order.

    Double-precision Gauss-Hermite nodes seed brackets; each bracket is then
    bisected on the normalized recurrence down to ``bits`` binary digits
    (default: half the working precision).
    """
    if n == 0:
        return []
    bits = mp.prec // 2 if bits is None else bits
    seeds = np.sort(np.polynomial.hermite.hermgauss(n)[0])
    seeds = seeds[seeds > -1e-12]
    f = lambda t: eval_psi(n, t)
    gaps = np.diff(np.concatenate(([-seeds[0]], seeds))) if len(seeds) else []
    zeros = []
    for i, s in enumerate(seeds):
        if abs(s) < 1e-12:
            # odd n: x = 0 is an exact zero
            zeros.append(mpf(0))
            continue
        half = mpf(gaps[i]) / 4 if i < len(gaps) else mpf(0.1)
        if i + 1 < len(seeds):
            half = min(half, mpf(seeds[i + 1] - s) / 4)
        lo, hi = mpf(s) - half, mpf(s) + half
        flo, fhi = f(lo), f(hi)
        if flo * fhi > 0:
            raise ArithmeticError(f"failed to bracket zero {i} of H_{n}")
        zeros.append(_bisect(f, lo, hi, flo, bits))
    return zeros


def gaussian_tail_bound(n, cutoff):
    """Upper bound on the integral of |psi_n| over [cutoff, inf).

    Uses |h_n(x)| <= sum_j |c_j| x**j and the upper incomplete gamma
    function for each monomial against exp(-x**2/2).
    """
    cutoff = mpf(cutoff)
    total = mpf(0)
    for j, c in enumerate(normalized_coefficients(n)):
        if c:
            s = mpf(j + 1) / 2
            total += abs(c) * mpf(2) ** ((j - 1) / mpf(2)) * mp.gammainc(s, cutoff ** 2 / 2)
    return total


def one_norm(n):
    """L1 norm of psi_n and the certified tail bound that was not integrated.

    |psi_n| is integrated with tanh-sinh quadrature on each interval between
    consecutive zeros of H_n (where it is smooth), out to
    X = sqrt(2n + 1) + 10; beyond X the tail is bounded analytically.

    Returns ``(value, tail)``; the true norm lies in [value, value + tail]
    up to quadrature round-off.
    """
    cutoff = mp.sqrt(2 * n + 1) + 10
    nodes = [mpf(0)] + [z for z in hermite_zeros(n) if z > 0] + [cutoff]
    f = lambda t: abs(eval_psi(n, t))
    half = mp.fsum(mp.quad(f, [nodes[i], nodes[i + 1]]) for i in range(len(nodes) - 1))
    return 2 * half, 2 * gaussian_tail_bound(n, cutoff)


@dataclass(frozen=True)
class NormTable:
    """1-norms of psi_0 .. psi_max_order with their tail bounds."""

    one_norms: tuple
    tail_bounds: tuple
    precision_bits: int

    @property
    def max_order(self):
        return len(self.one_norms) - 1

    def upper(self, j):
        """Certified upper bound on ||psi_j||_1."""
        with mp.workprec(self.precision_bits):
            return self.one_norms[j] + self.tail_bounds[j] + mpf(2) ** (-self.precision_bits // 2)

    def max_upper(self, order):
        """max_{0 <= j <= order} of the upper bounds (tilde n_order)."""
        if order > self.max_order:
            raise DomainError(f"norm table covers orders <= {self.max_order}")
        return max(self.upper(j) for j in range(order + 1))


@lru_cache(maxsize=32)
def build_norm_table(max_order, precision_bits=256):
    with mp.workprec(precision_bits):
        pairs = [one_norm(j) for j in range(max_order + 1)]
    return NormTable(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs), precision_bits)


# --- bound predicates --------------------------------------------------------


def lemma1_bound(n):
    """1.74 n^(-5/4), the claimed envelope inside [-sqrt(n), sqrt(n)]."""
    return float(LEMMA1_CONSTANT) * n ** -1.25


def lemma2_bound(n, x):
    """2^n sqrt(n! n^n / (e^n sqrt(pi))) exp(-x^2/4), with 0^0 = 1."""
    x = np.asarray(x, dtype=float)
    log_pref = (n * np.log(2.0)
                + 0.5 * (float(mp.loggamma(n + 1)) + (n * np.log(n) if n else 0.0)
                         - n - 0.5 * np.log(np.pi)))
    return np.exp(log_pref - x * x / 4)


def charlier_cramer_bound():
    return float(CHARLIER_CRAMER) / np.pi ** 0.25


def _grid(grid):
    return np.atleast_1d(np.asarray(grid, dtype=float))


def check_lemma1(n, grid):
    """True iff |psi_n(x)| < 1.74 n^(-5/4) at every grid point of the oscillatory region [-sqrt(n), sqrt(n)]."""
    if n < 1:
        raise DomainError("the interior envelope needs n >= 1")
    x = _grid(grid)
    if np.any(np.abs(x) > np.sqrt(n) * (1 + 1e-15)):
        raise DomainError("grid points must lie in [-sqrt(n), sqrt(n)]")
    return bool(np.all(np.abs(eval_psi(n, x)) < lemma1_bound(n)))


def check_lemma2(n, grid):
    """True iff |psi_n(x)| <= the coarse Gaussian envelope at every grid point with |x| > 1."""
    x = _grid(grid)
    if np.any(np.abs(x) <= 1):
        raise DomainError("the Gaussian envelope applies for |x| > 1")
    return bool(np.all(np.abs(eval_psi(n, x)) <= lemma2_bound(n, x)))


def check_charlier_cramer(n, grid):
    """True iff |psi_n(x)| <= 1.086435 / pi^(1/4) on the grid."""
    x = _grid(grid)
    return bool(np.all(np.abs(eval_psi(n, x)) <= charlier_cramer_bound()))


def worst_ratio(n, grid, bound):
    """max |psi_n(x)| / bound(x) over the grid; > 1 means the bound is violated."""
    x = _grid(grid)
    b = bound(x) if callable(bound) else bound
    return float(np.max(np.abs(eval_psi(n, x)) / b))


@dataclass(frozen=True)
class HermiteEvaluator:
    """Fixed-precision front end over the module functions."""

    precision_bits: int = 256
    max_order: int = 64
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def _check(self, n):
        if not 0 <= n <= self.max_order:
            raise DomainError(f"order {n} outside [0, {self.max_order}]")

    def psi(self, n, x):
        self._check(n)
        with mp.workprec(self.precision_bits):
            return +eval_psi(n, x)

    def psi_scaled(self, n, c, x):
        self._check(n)
        with mp.workprec(self.precision_bits):
            return +eval_psi_scaled(n, c, x)

    def norms(self):
        return build_norm_table(self.max_order, self.precision_bits)
