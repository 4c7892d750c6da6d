import itertools

import numpy as np
import pytest
from mpmath import mp, mpf, mpc

from conftest import random_frame
from oscillator_channel.amplitudes import (
    TruncationSpec, amplitude_prefactor, amplitudes_at, build_grouped_sums, csv_digits,
    format_fixed, grouped_sums_direct, path_integrand_direct, path_integrand_f,
)
from oscillator_channel.bounds import certified_refined_bound, compute_constants, remark3_bound, theorem1_bound
from oscillator_channel.errors import DomainError
from oscillator_channel.gauss_integrals import build_integral_table
from oscillator_channel.hermite import build_norm_table

# frozen from an independent run of the term-by-term reference grouping at 256 bits
A0000_T0 = "0.999825783007633352"
ABS_AT_5US = {(0, 0, 0, 0): "0.8115656029793535287", (0, 0, 2, 2): "0.1380108417690199644",
              (1, 1, 3, 3): "0.2726632893834052662"}


@pytest.fixture(scope="module")
def case_sums(case_frame):
    with mp.workprec(256):
        spec = TruncationSpec(3, 2, 6, 15)
        table = build_integral_table(case_frame, 3, 2, 15)
        return spec, table, build_grouped_sums(spec, table, 0, case_frame)


def test_spec_validation():
    assert TruncationSpec(3, 2, 6).term_count == 7203
    with pytest.raises(DomainError):
        TruncationSpec(3, 2, 6, 6)
    with pytest.raises(DomainError):
        TruncationSpec(-1, 2, 6)


def test_identity_frame_integrand(identity_frame):
    table = build_integral_table(identity_frame, 3, 2, 3)
    for a, b, ap, bp, lp, k, kp, c, cp in itertools.product(range(2), range(2), range(2), range(2),
                                                           range(2), range(2), range(2), range(2), range(2)):
        f = path_integrand_f(a, b, ap, bp, lp, k, kp, c, cp, table, 0, identity_frame)
        delta = (ap == kp and lp == cp and bp == k and lp == c and b == k and c == 0 and a == kp and cp == 0)
        assert f == (mp.sqrt(mp.pi) if delta else 0)


def test_integrand_parity(case_frame):
    table = build_integral_table(case_frame, 3, 2, 4)
    assert path_integrand_f(0, 0, 1, 0, 0, 0, 0, 0, 0, table, 0, case_frame) == 0


def test_integrand_matches_eight_dim_quadrature(case_frame):
    table = build_integral_table(case_frame, 1, 1, 2)
    for r in (0, mpf("0.3")):
        f = path_integrand_f(0, 0, 0, 0, 0, 0, 0, 0, 0, table, r, case_frame, tail_tol=mpf("1e-30"))
        assert abs(f - path_integrand_direct(0, 0, 0, 0, 0, 0, 0, 0, 0, r, case_frame)) < mpf(10) ** -25


def test_grouped_sums_match_reference(rng):
    frame = random_frame(rng)
    spec = TruncationSpec(1, 1, 2)
    for r in (0, mpf("0.3")):
        table = build_integral_table(frame, 1, 60 if r else 1, 2)
        fast = build_grouped_sums(spec, table, r, frame, tail_tol=mpf("1e-30"))
        ref = grouped_sums_direct(spec, table, r, frame, tail_tol=mpf("1e-30"))
        assert max(abs(x - y) for x, y in zip(fast.values.flat, ref.flat)) < mpf(10) ** -28


def test_grouped_sums_real(rng):
    for _ in range(3):
        frame = random_frame(rng)
        sums = build_grouped_sums(TruncationSpec(3, 2, 4), build_integral_table(frame, 3, 2, 4), 0, frame)
        assert all(not isinstance(v, mpc) for v in sums.values.flat)


def test_identity_grouped_sums_concentrated(identity_frame):
    spec = TruncationSpec(3, 2, 6)
    sums = build_grouped_sums(spec, build_integral_table(identity_frame, 3, 2, 6), 0, identity_frame)
    nz = {idx for idx, v in np.ndenumerate(sums.values) if v}
    assert nz == {(a, b, a, b, b - a + 6, 6) for a in range(4) for b in range(4)}


def test_identity_amplitudes_exact_phases(identity_frame):
    spec = TruncationSpec(3, 2, 6)
    sums = build_grouped_sums(spec, build_integral_table(identity_frame, 3, 2, 6), 0, identity_frame)
    for t in (mpf(0), mpf("3.7e-7"), mpf("4.1e-6")):
        amp = amplitudes_at(t, sums, identity_frame)
        for idx in itertools.product(range(4), repeat=4):
            a, b, ap, bp = idx
            if (ap, bp) == (a, b):
                assert abs(amp[idx] - mp.exp(-1j * identity_frame.omega_x * (b - a) * t)) < mpf(2) ** -100
            else:
                assert amp[idx] == 0


def test_case_study_frozen(case_frame, case_sums):
    _, _, sums = case_sums
    amp0 = amplitudes_at(0, sums, case_frame)
    assert mp.im(amp0[0, 0, 0, 0]) == 0
    assert abs(amp0[0, 0, 0, 0] - mpf(A0000_T0)) < mpf(10) ** -18
    amp = amplitudes_at(mpf("5e-6"), sums, case_frame)
    for idx, ref in ABS_AT_5US.items():
        assert abs(abs(amp[idx]) - mpf(ref)) < mpf(10) ** -18


def test_parity_and_hermitian_symmetry(case_frame, case_sums, rng):
    _, _, sums = case_sums
    for _ in range(5):
        amp = amplitudes_at(mpf(rng.random()) * mpf("5e-6"), sums, case_frame)
        for a, b, ap, bp in itertools.product(range(4), repeat=4):
            if (a + b + ap + bp) % 2:
                assert amp[a, b, ap, bp] == 0
            assert abs(amp[a, b, ap, bp] - mp.conj(amp[b, a, bp, ap])) <= mpf(2) ** -128


@pytest.mark.xfail(strict=True, reason="mass-weighted coordinate map squeezes level 3 below 0.9 at t = 0")
def test_near_identity_at_zero(case_frame, case_sums):
    _, _, sums = case_sums
    amp = amplitudes_at(0, sums, case_frame)
    for a, b in itertools.product(range(4), repeat=2):
        assert abs(amp[a, b, a, b]) >= mpf("0.9")


def test_truncated_trace(case_frame, case_sums, rng):
    spec, table, sums = case_sums
    consts = compute_constants(case_frame, build_norm_table(3), 3, 2)
    eps = remark3_bound(consts, 6, 15, table, spec, 0, case_frame)
    for _ in range(5):
        amp = amplitudes_at(mpf(rng.random()) * mpf("5e-6"), sums, case_frame)
        for a in range(4):
            assert mp.fsum(mp.re(amp[a, a, ap, ap]) for ap in range(4)) <= 1 + eps * 4


def test_time_enters_through_phases(rng):
    frame = random_frame(rng)
    sums = build_grouped_sums(TruncationSpec(2, 1, 3), build_integral_table(frame, 2, 1, 3), 0, frame)
    # z_u and z_v are 2 pi periodic in omega t; choose t so both return (rational ratio not needed)
    t = mpf("0.37")
    tu = t + 2 * mp.pi / frame.omega_u
    a1, a2 = amplitudes_at(t, sums, frame), amplitudes_at(tu, sums, frame)
    zu = lambda s: mp.exp(-1j * frame.omega_u * s)
    zv = lambda s: mp.exp(-1j * frame.omega_v * s)
    assert abs(zu(t) - zu(tu)) < mpf(10) ** -60
    dv = abs(zv(t) - zv(tu))
    assert max(abs(x - y) for x, y in zip(a1.values.flat, a2.values.flat)) <= 20 * dv + mpf(10) ** -60


@pytest.mark.xfail(strict=True, reason="remark3_bound omits terms mixing indices <= N and > N")
def test_refinement_bounds_difference(case_frame, case_sums):
    spec, table, sums6 = case_sums
    sums15 = build_grouped_sums(TruncationSpec(3, 2, 15), table, 0, case_frame)
    consts = compute_constants(case_frame, build_norm_table(3), 3, 2)
    for t in (mpf("1e-6"), mpf("4.4e-6")):
        a6, a15 = amplitudes_at(t, sums6, case_frame), amplitudes_at(t, sums15, case_frame)
        for ap, bp in [(0, 0), (2, 2), (1, 3), (3, 3)]:
            bound = remark3_bound(consts, 6, 15, table, spec, 0, case_frame, ap, bp)
            for a, b in itertools.product(range(4), repeat=2):
                assert abs(a6[a, b, ap, bp] - a15[a, b, ap, bp]) <= bound


def test_certified_refinement_bounds_difference(case_frame, case_sums, rng):
    spec, table, sums6 = case_sums
    sums15 = build_grouped_sums(TruncationSpec(3, 2, 15), table, 0, case_frame)
    consts = compute_constants(case_frame, build_norm_table(3), 3, 2)
    bound = certified_refined_bound(consts, sums6, sums15, 0, case_frame)
    for _ in range(5):
        t = mpf(rng.random()) * mpf("5e-6")
        a6, a15 = amplitudes_at(t, sums6, case_frame), amplitudes_at(t, sums15, case_frame)
        assert max(abs(x - y) for x, y in zip(a6.values.flat, a15.values.flat)) <= bound


def test_csv_layout(case_frame, case_sums):
    _, _, sums = case_sums
    text = amplitudes_at(mpf("1e-6"), sums, case_frame).to_csv()
    lines = text.split("\r\n")
    assert lines[0] == "a,b,a_p,b_p,re,im" and lines[-1] == "" and len(lines) == 258
    digits = csv_digits(256)
    assert digits == 72
    assert len(lines[1].split(",")[4].split(".")[1]) == digits
    assert text == amplitudes_at(mpf("1e-6"), sums, case_frame).to_csv()


def test_format_fixed():
    assert format_fixed(mpf("0.125"), 2) == "0.12"
    assert format_fixed(mpf("-0.375"), 2) == "-0.38"
    assert format_fixed(mpf(0), 3) == "0.000"
    assert format_fixed(mpf("-1e-30"), 5) == "0.00000"


def test_prefactor():
    with mp.workprec(256):
        class F:
            jacobian = mpf(1)
        assert amplitude_prefactor(F, 0) == 1 / mp.sqrt(mp.pi)
    with pytest.raises(DomainError):
        amplitudes_at(-1, None, None)
