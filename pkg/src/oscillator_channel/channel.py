"""Linear algebra of the truncated qubit channel.

The amplitude tensor is restricted to a qubit input {|0>, |1>}.  Parity
conservation sends |0><0| mainly to even levels and |1><1| mainly to odd
levels (the opposite parity needs an odd bath excitation and is tiny), so
within D = 3 the Choi matrix is taken on the four product states |0,0>,
|2,0>, |1,1>, |3,1> (output level first, input level second).

The Choi matrix is laid out entry by entry as chi[(i', i), (j', j)] =
A[i, j, i', j'].  With the tensor convention used here (A[a, b, a', b']
carries |b><a| to |b'><a'|) that layout is the complex conjugate of the
standard Choi operator sum_K |K>><<K|.  The eigenvalues are unaffected; the
dominant Kraus operator is built from the conjugated leading eigenvector.
"""
import functools
from dataclasses import dataclass

import numpy as np
from mpmath import mp, mpf, mpc

from .errors import DomainError, InvalidState, NonHermitianInput

# ordered basis: (output level, input level)
CHOI_BASIS = ((0, 0), (2, 0), (1, 1), (3, 1))


def _own_precision(fn):
    """Run ``fn`` at the precision carried by its first argument, when it has one."""
    @functools.wraps(fn)
    def wrapper(obj, *args, **kwargs):
        bits = getattr(obj, "precision_bits", None)
        with mp.workprec(max(mp.prec, bits or mp.prec)):
            return fn(obj, *args, **kwargs)
    return wrapper


def _zeros(n, m=None):
    m = n if m is None else m
    return mp.matrix(n, m)


def _dagger(x):
    return x.transpose_conj()


def _max_abs(x):
    return max((abs(v) for v in x), default=mpf(0))


@dataclass(frozen=True)
class ChoiMatrix:
    """Hermitized 4x4 Choi matrix of the truncated qubit channel at time t."""

    matrix: object
    t: object
    spec_hash: str
    correction: object
    precision_bits: int = None

    @property
    def trace(self):
        return mp.re(mp.fsum(self.matrix[i, i] for i in range(4)))


def choi_entry_indices():
    """(i, j, i', j') amplitude index for every Choi entry, row-major."""
    return [[(i, j, ip, jp) for (jp, j) in CHOI_BASIS] for (ip, i) in CHOI_BASIS]


@_own_precision
def build_choi(amplitudes, eps=None):
    """Fill the Choi layout from the tensor and Hermitize it.

    Raises NonHermitianInput if the Hermitizing correction exceeds 10 eps.
    """
    if amplitudes.D < 3:
        raise DomainError("the Choi layout needs amplitudes up to level 3")
    raw = _zeros(4)
    for r, row in enumerate(choi_entry_indices()):
        for c, idx in enumerate(row):
            raw[r, c] = mpc(amplitudes[idx])
    herm = (raw + _dagger(raw)) / 2
    correction = mp.mnorm(raw - herm, "f")
    if eps is not None and correction > 10 * mpf(eps):
        raise NonHermitianInput(f"Hermitian defect {mp.nstr(correction, 5)} exceeds 10 eps")
    return ChoiMatrix(herm, amplitudes.t, f"{amplitudes.frame_digest}:{amplitudes.spec}", correction,
                      amplitudes.precision_bits)


# --- Hermitian Jacobi eigensolver --------------------------------------------


def _off_norm(a, n):
    return mp.sqrt(mp.fsum(abs(a[i, j]) ** 2 for i in range(n) for j in range(n) if i != j))


def jacobi_eigh(h, max_sweeps=100):
    """Cyclic complex Jacobi for a Hermitian mp.matrix.

    Returns ``(eigenvalues, v, off)`` with the columns of ``v`` the
    eigenvectors, in the original diagonal order, and ``off`` the final
    off-diagonal Frobenius norm.
    """
    n = h.rows
    a = h.copy()
    v = mp.eye(n)
    scale = max(mp.mnorm(a, "f"), mpf(1))
    target = mpf(2) ** (-mp.prec + 8) * scale
    for _ in range(max_sweeps):
        if _off_norm(a, n) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0:
                    continue
                phase = apq / mag  # e^{i phi}
                app, aqq = mp.re(a[p, p]), mp.re(a[q, q])
                tau = (aqq - app) / (2 * mag)
                t = (1 if tau >= 0 else -1) / (abs(tau) + mp.sqrt(1 + tau * tau))
                c = 1 / mp.sqrt(1 + t * t)
                s = t * c
                # U acts on columns p, q: U = diag(1, e^{-i phi}) [[c, s], [-s, c]]
                upp, upq = c, s
                uqp, uqq = -s * mp.conj(phase), c * mp.conj(phase)
                for k in range(n):
                    akp, akq = a[k, p], a[k, q]
                    a[k, p] = akp * upp + akq * uqp
                    a[k, q] = akp * upq + akq * uqq
                for k in range(n):
                    apk, aqk = a[p, k], a[q, k]
                    a[p, k] = mp.conj(upp) * apk + mp.conj(uqp) * aqk
                    a[q, k] = mp.conj(upq) * apk + mp.conj(uqq) * aqk
                a[p, q] = a[q, p] = mpf(0)
                a[p, p], a[q, q] = mp.re(a[p, p]), mp.re(a[q, q])
                for k in range(n):
                    vkp, vkq = v[k, p], v[k, q]
                    v[k, p] = vkp * upp + vkq * uqp
                    v[k, q] = vkp * upq + vkq * uqq
    return [mp.re(a[i, i]) for i in range(n)], v, _off_norm(a, n)


def _fix_phase(vec):
    """Scale so the largest-magnitude component (first on ties) is real positive."""
    mags = [abs(x) for x in vec]
    k = mags.index(max(mags))
    if mags[k] == 0:
        return vec
    ph = mp.conj(vec[k]) / mags[k]
    out = [x * ph for x in vec]
    out[k] = mpc(mags[k], 0)
    return out


@dataclass(frozen=True)
class SpectralData:
    """Descending eigenvalues, phase-fixed eigenvectors and the dominant Kraus operator A1."""

    eigenvalues: tuple
    eigenvectors: tuple
    kraus: object
    off_norm: object
    precision_bits: int = None

    @property
    def dominance(self):
        """lambda_1 / max(|lambda_2|, |lambda_3|, |lambda_4|) (inf if the rest vanish)."""
        rest = max(abs(x) for x in self.eigenvalues[1:])
        return mp.inf if rest == 0 else self.eigenvalues[0] / rest


def dominant_kraus(lam, vec):
    """4x2 operator sqrt(lam) (k0|0><0| + k2|2><0| + k1|1><1| + k3|3><1|).

    ``vec`` is an eigenvector of the displayed layout; its conjugate holds
    (k0, k2, k1, k3).
    """
    k = [mp.conj(x) for x in vec]
    root = mp.sqrt(max(lam, mpf(0)))
    op = _zeros(4, 2)
    for (out_level, in_level), coeff in zip(CHOI_BASIS, k):
        op[out_level, in_level] = root * coeff
    return op


@_own_precision
def spectral(choi):
    """Eigendecomposition of the Choi matrix with deterministic ordering and phases."""
    vals, vecs, off = jacobi_eigh(choi.matrix)
    order = sorted(range(4), key=lambda i: (-vals[i], i))
    lam = tuple(vals[i] for i in order)
    ev = tuple(tuple(_fix_phase([vecs[r, i] for r in range(4)])) for i in order)
    return SpectralData(lam, ev, dominant_kraus(lam[0], ev[0]), off, choi.precision_bits)


# --- physical figures of merit -----------------------------------------------


@_own_precision
def leakage_lower_bound(amplitudes, eps):
    """1/2 (|A[0,0,2,2]| + |A[1,1,3,3]|) - 2 eps, clamped at 0, for the maximally mixed qubit."""
    val = (abs(amplitudes[0, 0, 2, 2]) + abs(amplitudes[1, 1, 3, 3])) / 2 - 2 * mpf(eps)
    return max(val, mpf(0))


@_own_precision
def leakage_exact(amplitudes):
    """Population above level 1 after the truncated channel acts on the maximally mixed qubit."""
    out = apply_truncated_channel(amplitudes, mp.matrix([[mpf(0.5), 0], [0, mpf(0.5)]]))
    return mp.re(mp.fsum(out[i, i] for i in range(2, out.rows)))


@_own_precision
def fidelity_no_recovery(amplitudes, eps):
    """Entanglement fidelity of |Phi> = (|00> + |11>)/sqrt 2 with no recovery.

    Returns ``(exact, lower_bound)``; exact is 1/4 sum Re(A^2) over qubit
    indices, the lower bound keeps only the four diagonal amplitudes.
    """
    eps = mpf(eps)
    exact = mp.fsum(mp.re(mpc(amplitudes[a, b, ap, bp]) ** 2)
                    for a in (0, 1) for b in (0, 1) for ap in (0, 1) for bp in (0, 1)) / 4
    diag = [mpc(amplitudes[i]) ** 2 for i in ((0, 0, 0, 0), (1, 1, 1, 1), (0, 1, 0, 1), (1, 0, 1, 0))]
    lower = mp.re(mp.fsum(diag)) / 4 - 8 * (2 * eps + eps ** 2)
    return exact, lower


@_own_precision
def bk_recovery_fidelity(spec_data, eps):
    """Lower bound on the fidelity with Barnum-Knill recovery.

    Eigenvalues are divided by the qubit dimension 2 so the identity
    channel gives exactly 1 at eps = 0.
    """
    eps = mpf(eps)
    lam = [x / 2 for x in spec_data.eigenvalues]
    return lam[0] ** 2 - (abs(lam[1]) + abs(lam[2]) + abs(lam[3])) / 4 - (2 * eps + eps ** 2) / 4


def _psd_sqrt_pinv(m, threshold):
    """(M)^{-1/2} on the support of a PSD Hermitian M, singular values below threshold dropped."""
    vals, vecs, _ = jacobi_eigh(m)
    out = _zeros(m.rows)
    for i, lam in enumerate(vals):
        if lam > threshold:
            col = vecs[:, i]
            out += (col * _dagger(col)) / mp.sqrt(lam)
    return out


@_own_precision
def recovery_kraus(spec_data, precision_bits=None):
    """Single Kraus operator A1^dagger (A1 A1^dagger)^{-1/2+} of the Barnum-Knill recovery."""
    bits = precision_bits or mp.prec
    a1 = spec_data.kraus
    threshold = spec_data.eigenvalues[0] * mpf(2) ** (-bits // 2)
    return _dagger(a1) * _psd_sqrt_pinv(a1 * _dagger(a1), threshold)


def _qubit_images(amplitudes):
    """N(|i><j|) for i, j in {0, 1}, as (D+1)x(D+1) matrices."""
    d = amplitudes.D + 1
    images = {}
    for i in (0, 1):
        for j in (0, 1):
            out = _zeros(d)
            # |i><j| is the coefficient slot (a, b) = (j, i)
            for ap in range(d):
                for bp in range(d):
                    out[bp, ap] = mpc(amplitudes[j, i, ap, bp])
            images[i, j] = out
    return images


@_own_precision
def entanglement_fidelity(amplitudes, recovery=None):
    """<Phi| (R x R)(N x N)(|Phi><Phi|) |Phi> for an optional single-Kraus recovery R (2 x (D+1))."""
    total = mpf(0)
    for (i, j), m in _qubit_images(amplitudes).items():
        r = m if recovery is None else recovery * m * _dagger(recovery)
        total += mp.re(mp.fsum(r[p, q] ** 2 for p in (0, 1) for q in (0, 1)))
    return total / 4


@_own_precision
def bk_fidelity_exact(amplitudes, spec_data):
    """Entanglement fidelity after composing each channel with its Barnum-Knill recovery."""
    rec = recovery_kraus(spec_data, amplitudes.precision_bits)
    d = amplitudes.D + 1
    if d != 4:
        pad = _zeros(2, d)
        for r in range(2):
            for c in range(4):
                pad[r, c] = rec[r, c]
        rec = pad
    return entanglement_fidelity(amplitudes, rec)


def _as_matrix(rho):
    if isinstance(rho, mp.matrix):
        return rho
    arr = np.asarray(rho, dtype=object)
    return mp.matrix([[mpc(x) for x in row] for row in arr])


def validate_state(rho, tol=mpf("1e-30")):
    m = _as_matrix(rho)
    if m.rows != 2 or m.cols != 2:
        raise InvalidState("rho must be 2x2 (levels 0 and 1)")
    if _max_abs(m - _dagger(m)) > tol:
        raise InvalidState("rho must be Hermitian")
    if abs(m[0, 0] + m[1, 1] - 1) > tol:
        raise InvalidState("rho must have unit trace")
    a, d, b = mp.re(m[0, 0]), mp.re(m[1, 1]), m[0, 1]
    lam_min = (a + d) / 2 - mp.sqrt(((a - d) / 2) ** 2 + abs(b) ** 2)
    if lam_min < -tol:
        raise InvalidState("rho must be positive semidefinite")
    return m


@_own_precision
def apply_truncated_channel(amplitudes, rho):
    """Output density matrix on levels 0..D for a qubit input rho.

    out[b', a'] = sum_{a, b <= 1} A[a, b, a', b'] rho[b, a].
    """
    m = validate_state(rho)
    d = amplitudes.D + 1
    out = _zeros(d)
    for ap in range(d):
        for bp in range(d):
            out[bp, ap] = mp.fsum(mpc(amplitudes[a, b, ap, bp]) * m[b, a]
                                  for a in (0, 1) for b in (0, 1))
    return out


def hermitian_eigenvalues(m):
    vals, _, _ = jacobi_eigh((m + _dagger(m)) / 2)
    return sorted(vals, reverse=True)
