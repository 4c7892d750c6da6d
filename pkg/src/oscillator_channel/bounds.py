"""Rigorous bounds on the error of the finite amplitude approximation.

The constants come from two envelope estimates for Hermite functions: an
algebraic decay (kappa^-5/2) inside the oscillatory region and an
exponential decay (exp(-kappa C)) outside it.  ``theorem1_bound`` is the
closed-form bound on |T - A_{L,N,t}|; ``remark3_bound`` replaces most of it
by sums over actually computed I-integrals up to a larger order N'.
"""
import functools
import hashlib
import itertools
from dataclasses import dataclass

import numpy as np
from mpmath import mp, mpf

from .amplitudes import amplitude_prefactor
from .errors import DegenerateCoupling, DomainError

LEMMA1 = "1.74"
A_TILDE = "4.74"
B_CONST = "57.6"
B_TILDE = "39.6"
REMARK_CAP = "14.7103"


def _frame_precision(fn):
    """Run ``fn`` at the precision of its ``frame`` argument (not the ambient one)."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        frame = kwargs.get("frame")
        if frame is None:
            frame = next(a for a in args if hasattr(a, "precision_bits") and hasattr(a, "jacobian"))
        with mp.workprec(max(mp.prec, frame.precision_bits)):
            return fn(*args, **kwargs)
    return wrapper


def _pow00(n):
    """n^n with 0^0 = 1."""
    return mpf(n) ** n if n else mpf(1)


def norm_table_digest(norms):
    h = hashlib.sha256()
    for v in norms.one_norms + norms.tail_bounds:
        h.update(repr(v._mpf_).encode())
    return h.hexdigest()[:16]


@dataclass(frozen=True)
class BoundConstants:
    """c1, c2, the decay rate C and the prefactors A, A~, B, B~ for given (D, L).

    ``C`` is ``mp.inf`` for an uncoupled frame; every exp(-n C) is then an
    exact zero.  ``n_D`` and ``n_L`` are the largest certified 1-norm upper
    bounds of psi_0..psi_D and psi_0..psi_L.
    """

    c1: object
    c2: object
    C: object
    A: object
    A_tilde: object
    B: object
    B_tilde: object
    D: int
    L: int
    n_D: object
    n_L: object
    norm_table_hash: str

    def decay(self, multiple):
        """exp(-multiple * C), exactly zero when C is infinite."""
        if mp.isinf(self.C):
            return mpf(0)
        return mp.exp(-mpf(multiple) * self.C)


@_frame_precision
def compute_constants(frame, norms, D, L, allow_uncoupled=False):
    """Constants of the error bound from the frame coefficients and 1-norm table."""
    if max(D, L) > norms.max_order:
        raise DomainError(f"norm table covers orders <= {norms.max_order}")
    c1 = min(abs(frame.u1), abs(frame.u2))
    c2 = min(abs(frame.v1), abs(frame.v2))
    if c1 == 0 or c2 == 0:
        if not allow_uncoupled:
            raise DegenerateCoupling("a vanishing coordinate coefficient makes C infinite")
        C = mp.inf
    else:
        C = min(1 / (4 * c1 ** 2), 1 / (4 * c2 ** 2))
    n_D, n_L = norms.max_upper(D), norms.max_upper(L)
    A = mpf(LEMMA1) ** 2 * n_D * n_L
    A_t = (mpf(A_TILDE) * (2 * mp.exp(mpf(-0.5))) ** (D + L)
           * mp.sqrt(mp.factorial(D) * _pow00(D) * mp.factorial(L) * _pow00(L)))
    B = mpf(B_CONST) * n_D ** 2
    B_t = mpf(B_TILDE) * (2 * mp.exp(-1)) ** D * mp.factorial(D) * _pow00(D)
    return BoundConstants(c1, c2, C, A, A_t, B, B_t, D, L, n_D, n_L, norm_table_digest(norms))


def bracket_terms(consts, N):
    """The six terms inside the squared bracket, in displayed order."""
    if N < 1:
        raise DomainError("N must be at least 1")
    A, At, B, Bt = consts.A, consts.A_tilde, consts.B, consts.B_tilde
    N = mpf(N)
    h = N - mpf(0.5)
    q_half = 1 - consts.decay(mpf(0.5))
    q_one = 1 - consts.decay(1)
    return (
        4 * mp.sqrt(A * A * B) / (9 * h ** 3),
        4 * mp.sqrt(A * At * B) / (3 * N ** mpf(1.25) * h ** mpf(1.5)) * consts.decay(N / 2) / q_half,
        mp.sqrt(At * At * B) / N ** mpf(2.5) * consts.decay(N) / q_half ** 2,
        mp.sqrt(A * A * Bt) / N ** mpf(2.5) * consts.decay(N) / q_half ** 2,
        2 * mp.sqrt(A * At * Bt) / N ** mpf(1.25) * consts.decay(3 * N / 2) / (q_half * q_one),
        mp.sqrt(At * At * Bt) * consts.decay(2 * N) / q_one ** 2,
    )


@_frame_precision
def theorem1_bound(consts, N, L, r, frame):
    """(sum of the six bracket terms)^2 * prefactor * (L + 1)."""
    return mp.fsum(bracket_terms(consts, N)) ** 2 * amplitude_prefactor(frame, r) * (L + 1)


def exponential_products(consts, N):
    """The five constant products that carry exp(-n C) factors, each times its factor."""
    A, At, B, Bt = consts.A, consts.A_tilde, consts.B, consts.B_tilde
    return {
        "A*At*B": A * At * B * consts.decay(mpf(N) / 2),
        "At^2*B": At * At * B * consts.decay(N),
        "A^2*Bt": A * A * Bt * consts.decay(N),
        "A*At*Bt": A * At * Bt * consts.decay(mpf(3) * N / 2),
        "At^2*Bt": At * At * Bt * consts.decay(2 * N),
    }


@_frame_precision
def remark1_dominant(consts, N, L, r, frame):
    """Large-C dominant term 4 A^2 B / (81 (N - 1/2)^6) * prefactor * (L + 1)."""
    h = mpf(N) - mpf(0.5)
    return 4 * consts.A ** 2 * consts.B / (81 * h ** 6) * amplitude_prefactor(frame, r) * (L + 1)


@_frame_precision
def remark1_numeric_cap(consts, N, L, r, frame):
    """14.7103 (L+1) n_D^4 n_L^2 / (N - 1/2)^6 * jacobian * sqrt((1-r)/(1+r))."""
    r = mpf(r)
    h = mpf(N) - mpf(0.5)
    return (mpf(REMARK_CAP) * (L + 1) * consts.n_D ** 4 * consts.n_L ** 2 / h ** 6
            * frame.jacobian * mp.sqrt((1 - r) / (1 + r)))


def _weighted_tail_sums(table, D, L, N, N_p):
    """s[p][l'] = sum_{N < kappa, chi <= N'} |I[p, l', kappa, chi]| (kappa chi)^(-5/2)."""
    w = [mpf(0)] + [mpf(k) ** mpf(-2.5) for k in range(1, N_p + 1)]
    out = []
    for p in range(D + 1):
        row = []
        for l in range(L + 1):
            row.append(mp.fsum(abs(table[p, l, k, c]) * w[k] * w[c]
                               for k in range(N + 1, N_p + 1) for c in range(N + 1, N_p + 1)
                               if table[p, l, k, c]))
        out.append(row)
    return out


def remark3_terms(consts, N, N_p, table, spec):
    """Table of the refined-sum part for every (a', b'), without the order-N' remainder."""
    if N_p <= N:
        raise DomainError("N_prime must exceed N")
    D, L = spec.D, spec.L
    if not table.covers(D, L, N_p):
        raise DomainError(f"integral table must cover a <= {D}, l <= {L}, kappa <= {N_p}")
    s = _weighted_tail_sums(table, D, L, N, N_p)
    return [[consts.B * mp.fsum(s[ap][l] * s[bp][l] for l in range(L + 1)) for bp in range(D + 1)]
            for ap in range(D + 1)]


@_frame_precision
def remark3_bound(consts, N, N_p, table, spec, r, frame, a_p=None, b_p=None):
    """Refined error bound with explicit I-sums over N < indices <= N'.

    With ``a_p`` and ``b_p`` given, returns the bound for that output pair;
    otherwise the worst case over all (a', b') <= D.
    """
    terms = remark3_terms(consts, N, N_p, table, spec)
    if a_p is not None and b_p is not None:
        explicit = terms[a_p][b_p]
    else:
        explicit = max(max(row) for row in terms)
    return explicit + theorem1_bound(consts, N_p, spec.L, r, frame)


@dataclass(frozen=True)
class ErrorBudget:
    """Error bounds for one (D, L, N, N', r, frame) configuration."""

    epsilon: object
    epsilon_refined: object
    dominant_term: object
    numeric_cap: object
    constants: BoundConstants
    D: int
    L: int
    N: int
    N_prime: int
    r: object
    frame_digest: str

    @property
    def best(self):
        """The smaller of the two bounds (the refined one when available)."""
        if self.epsilon_refined is None:
            return self.epsilon
        return min(self.epsilon, self.epsilon_refined)


@_frame_precision
def error_budget(frame, norms, spec, r, table=None, allow_uncoupled=False):
    """Assemble constants, the closed-form bound, the refined bound and the dominant term."""
    consts = compute_constants(frame, norms, spec.D, spec.L, allow_uncoupled=allow_uncoupled)
    eps = theorem1_bound(consts, spec.N, spec.L, r, frame)
    refined = None
    if spec.N_prime is not None and table is not None:
        refined = remark3_bound(consts, spec.N, spec.N_prime, table, spec, r, frame)
    return ErrorBudget(
        epsilon=eps, epsilon_refined=refined,
        dominant_term=remark1_dominant(consts, spec.N, spec.L, r, frame),
        numeric_cap=remark1_numeric_cap(consts, spec.N, spec.L, r, frame),
        constants=consts, D=spec.D, L=spec.L, N=spec.N, N_prime=spec.N_prime,
        r=mpf(r), frame_digest=frame.digest(),
    )


@_frame_precision
def certified_refined_bound(consts, sums_n, sums_np, r, frame):
    """max over (a, b, a', b') of sum_dk,dc |G_N' - G_N| plus theorem1_bound at N'.

    Unlike remark3_bound this counts every term that changes between the
    two truncations, including those mixing indices <= N with indices > N,
    so it bounds |A_N(t) - A_N'(t)| at every t without further assumptions.
    """
    n, n_p = sums_n.N, sums_np.N
    if n_p <= n:
        raise DomainError("the second grouped sums must use the larger truncation")
    shift = n_p - n
    worst = mpf(0)
    for idx in itertools.product(*(range(s) for s in sums_np.values.shape[:4])):
        big = sums_np.values[idx]
        small = sums_n.values[idx]
        total = mpf(0)
        for (i, j), v in np.ndenumerate(big):
            if shift <= i < shift + 2 * n + 1 and shift <= j < shift + 2 * n + 1:
                v = v - small[i - shift, j - shift]
            total += abs(v)
        worst = max(worst, total)
    return worst + theorem1_bound(consts, n_p, sums_np.spec.L, r, frame)
