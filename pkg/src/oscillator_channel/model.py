"""Physical parameters and the decoupled normal-mode frame.

Two harmonic oscillators (system x, bath y) joined by a spring k.  The
spring's quadratic self-terms shift both frequencies; what remains is a
single cross term that a rotation by theta removes.  Everything downstream
(integrals, amplitudes, bounds) consumes only the dimensionless coefficients
u1, u2, v1, v2 and the two normal-mode frequencies.
"""
import hashlib
from dataclasses import dataclass, fields

from mpmath import mp, mpf

from .constants import hbar, k_b
from .errors import DegenerateResonance, DomainError

RESONANCE_FLOOR = mpf("1e-30")


def _mp(x):
    return x if isinstance(x, mp.mpf) else mpf(x)


@dataclass(frozen=True)
class OscillatorParams:
    """Raw inputs: masses (kg), bare frequencies (rad/s), spring constant (N/m), bath r."""

    m_x: object
    m_y: object
    omega_x_bare: object
    omega_y_bare: object
    k: object = 0
    r: object = 0
    precision_bits: int = 256

    def __post_init__(self):
        with mp.workprec(self.precision_bits):
            for name in ("m_x", "m_y", "omega_x_bare", "omega_y_bare", "k", "r"):
                object.__setattr__(self, name, _mp(getattr(self, name)))
        if self.precision_bits < 16:
            raise DomainError("precision_bits must be at least 16")
        for name in ("m_x", "m_y", "omega_x_bare", "omega_y_bare"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.k < 0:
            raise DomainError("k must be nonnegative")
        if not 0 <= self.r < 1:
            raise DomainError("r must lie in [0, 1)")


@dataclass(frozen=True)
class DecoupledFrame:
    """Normal-mode data derived from OscillatorParams.

    ``u = u1 x + u2 y`` and ``v = v1 x + v2 y`` are the dimensionless
    normal-mode coordinates expressed in the dimensionless oscillator
    coordinates x, y.
    """

    omega_x: object
    omega_y: object
    theta: object
    cos_theta: object
    sin_theta: object
    omega_u: object
    omega_v: object
    u1: object
    u2: object
    v1: object
    v2: object
    m: object
    mu: object
    k: object
    precision_bits: int

    @property
    def coefficients(self):
        return self.u1, self.u2, self.v1, self.v2

    @property
    def uncoupled(self):
        return self.k == 0

    @property
    def jacobian(self):
        """omega_u omega_v / (omega_x omega_y)."""
        return self.omega_u * self.omega_v / (self.omega_x * self.omega_y)

    def digest(self):
        """Stable hex digest of every field (used as a cache key)."""
        h = hashlib.sha256()
        for f in fields(self):
            v = getattr(self, f.name)
            h.update(f.name.encode())
            h.update(repr(v._mpf_ if isinstance(v, mp.mpf) else v).encode())
        return h.hexdigest()


def renormalize(m, omega_bare, k):
    """sqrt(omega_bare**2 + k/m): the frequency after absorbing the spring self-term."""
    m, omega_bare, k = _mp(m), _mp(omega_bare), _mp(k)
    return mp.sqrt(omega_bare ** 2 + k / m)


def _one_minus_inv_sqrt(eps):
    """1 - 1/sqrt(1 + eps), without cancellation for small eps."""
    s = mp.sqrt(1 + eps)
    return eps / (s * (1 + s))


def derive_frame(params, resonance_floor=RESONANCE_FLOOR):
    """Build the DecoupledFrame for ``params``.

    The uncoupled case k = 0 is returned exactly (theta = 0, omega_u = omega_x,
    omega_v = omega_y) so that identity-frame fixtures carry exact zeros.
    """
    with mp.workprec(params.precision_bits):
        m_x, m_y, k = params.m_x, params.m_y, params.k
        wx = renormalize(m_x, params.omega_x_bare, k)
        wy = renormalize(m_y, params.omega_y_bare, k)
        m = mp.sqrt(m_x * m_y)
        mu = (m_x / m_y) ** mpf(0.25)
        gap = wy ** 2 - wx ** 2
        if abs(gap) < resonance_floor * (wx ** 2 + wy ** 2):
            raise DegenerateResonance("renormalized frequencies coincide; rotation angle undefined")
        if k == 0:
            theta, c, s = mpf(0), mpf(1), mpf(0)
            wu, wv = wx, wy
        else:
            km = k / m
            theta = mp.atan(2 * km / gap) / 2
            # cos^2 = (1 + 1/sqrt(1+eps))/2, sin^2 = (1 - 1/sqrt(1+eps))/2 with eps = tan^2(2 theta)
            eps = (2 * km / gap) ** 2
            c = mp.sqrt((2 - _one_minus_inv_sqrt(eps)) / 2)
            s = mp.sqrt(_one_minus_inv_sqrt(eps) / 2)
            if gap < 0:
                s = -s
            sin2 = 2 * s * c
            wu = mp.sqrt(wx ** 2 * c ** 2 + wy ** 2 * s ** 2 - km * sin2)
            wv = mp.sqrt(wx ** 2 * s ** 2 + wy ** 2 * c ** 2 + km * sin2)
        u1 = mp.sqrt(m_y * wu / (m_x * wx)) * c
        u2 = mp.sqrt(m_x * wu / (m_y * wy)) * s
        v1 = -mp.sqrt(m_y * wv / (m_x * wx)) * s
        v2 = mp.sqrt(m_x * wv / (m_y * wy)) * c
        if k == 0 and m_x == m_y:
            u1, u2, v1, v2 = mpf(1), mpf(0), mpf(0), mpf(1)
        return DecoupledFrame(
            omega_x=wx, omega_y=wy, theta=theta, cos_theta=c, sin_theta=s,
            omega_u=wu, omega_v=wv, u1=u1, u2=u2, v1=v1, v2=v2, m=m, mu=mu, k=k,
            precision_bits=params.precision_bits,
        )


def bath_r_from_temperature(omega_y, temperature):
    """Boltzmann ratio exp(-hbar omega_y / (k_B T)); zero at T = 0."""
    omega_y, temperature = _mp(omega_y), _mp(temperature)
    if temperature < 0:
        raise DomainError("temperature must be nonnegative")
    if omega_y <= 0:
        raise DomainError("omega_y must be positive")
    if temperature == 0:
        return mpf(0)
    return mp.exp(-hbar() * omega_y / (k_b() * temperature))


def case_study_params(k=1000, r=0, precision_bits=256):
    """Tabulated case-study inputs (microgram-scale system, heavier bath)."""
    return OscillatorParams(
        m_x="1e-6", m_y="2e-6", omega_x_bare="1e6", omega_y_bare="1e7",
        k=k, r=r, precision_bits=precision_bits,
    )
