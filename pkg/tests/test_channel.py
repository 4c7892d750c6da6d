import itertools
import random

import pytest
from mpmath import mp, mpf, mpc

from oscillator_channel.amplitudes import amplitudes_at
from oscillator_channel.channel import (
    CHOI_BASIS, ChoiMatrix, apply_truncated_channel, bk_fidelity_exact, bk_recovery_fidelity,
    build_choi, choi_entry_indices, entanglement_fidelity, fidelity_no_recovery, jacobi_eigh,
    leakage_exact, leakage_lower_bound, spectral, validate_state,
)
from oscillator_channel.errors import InvalidState, NonHermitianInput

MIXED = [[mpf(0.5), 0], [0, mpf(0.5)]]


def _trace(m):
    return mp.re(mp.fsum(m[i, i] for i in range(m.rows)))


def _times(n, seed=3):
    rng = random.Random(seed)
    return [mpf(rng.random()) * mpf("5e-6") for _ in range(n)]


def test_choi_layout_indices():
    idx = choi_entry_indices()
    assert idx[0][0] == (0, 0, 0, 0) and idx[0][2] == (0, 1, 0, 1)
    assert idx[1][2] == (0, 1, 2, 1)  # row |2,0>, column |1,1>
    assert len(CHOI_BASIS) == 4


def test_identity_choi(identity_pipeline):
    p = identity_pipeline
    for t in (mpf(0), mpf("2e-6")):
        amp = amplitudes_at(t, p.sums, p.frame)
        choi = build_choi(amp, eps=0)
        zu = mp.exp(-1j * p.frame.omega_x * t)
        m = choi.matrix
        assert m[0, 0] == 1 and m[2, 2] == 1
        assert abs(m[0, 2] - zu) < mpf(2) ** -100 and abs(m[2, 0] - mp.conj(zu)) < mpf(2) ** -100
        assert m[1, 1] == 0 and m[3, 3] == 0
        sd = spectral(choi)
        assert abs(sd.eigenvalues[0] - 2) < mpf(2) ** -200
        assert all(abs(x) < mpf(2) ** -200 for x in sd.eigenvalues[1:])
        assert abs(bk_recovery_fidelity(sd, 0) - 1) < mpf(2) ** -200
        assert leakage_lower_bound(amp, 0) == 0


def test_identity_fidelities_and_channel(identity_pipeline):
    p = identity_pipeline
    amp = amplitudes_at(0, p.sums, p.frame)
    exact, lower = fidelity_no_recovery(amp, 0)
    assert exact == 1 and lower == 1
    out = apply_truncated_channel(amp, [[1, 0], [0, 0]])
    assert out[0, 0] == 1 and all(out[i, j] == 0 for i in range(4) for j in range(4) if (i, j) != (0, 0))
    assert abs(bk_fidelity_exact(amp, spectral(build_choi(amp))) - 1) < mpf(2) ** -100


def test_jacobi_diagonal_and_ties():
    vals, vecs, off = jacobi_eigh(mp.diag([3, 1, 4, 1]))
    assert off == 0
    choi = ChoiMatrix(mp.diag([3, 1, 4, 1]), 0, "", 0, 256)
    assert spectral(choi).eigenvalues == (4, 3, 1, 1)


def test_jacobi_reconstruction_random():
    rng = random.Random(5)
    for _ in range(5):
        h = mp.matrix(4, 4)
        for i in range(4):
            h[i, i] = mpf(rng.uniform(-2, 2))
            for j in range(i + 1, 4):
                h[i, j] = mpc(rng.uniform(-1, 1), rng.uniform(-1, 1))
                h[j, i] = mp.conj(h[i, j])
        sd = spectral(ChoiMatrix(h, 0, "", 0, 256))
        rec = mp.matrix(4, 4)
        for lam, vec in zip(sd.eigenvalues, sd.eigenvectors):
            col = mp.matrix(vec)
            rec += lam * (col * col.transpose_conj())
        assert mp.mnorm(rec - h, "f") < mpf(2) ** -128
        assert list(sd.eigenvalues) == sorted(sd.eigenvalues, reverse=True)
        assert sd.off_norm <= mpf(2) ** (-256 + 8) * 10
        for v in sd.eigenvectors:
            k = max(range(4), key=lambda i: abs(v[i]))
            assert mp.im(v[k]) == 0 and mp.re(v[k]) > 0


def test_non_hermitian_rejected(case_pipeline):
    amp = amplitudes_at(mpf("1e-6"), case_pipeline.sums, case_pipeline.frame)
    vals = amp.values.copy()
    vals[0, 1, 0, 1] += mpc(0, 1)
    bad = type(amp)(vals, amp.t, amp.spec, amp.frame_digest, amp.precision_bits)
    with pytest.raises(NonHermitianInput):
        build_choi(bad, eps=mpf("1e-3"))


def test_case_study_spectrum(case_pipeline):
    p = case_pipeline
    for t in _times(6):
        choi = build_choi(amplitudes_at(t, p.sums, p.frame), eps=p.eps)
        assert choi.correction <= mpf(2) ** -120
        sd = spectral(choi)
        assert abs(mp.fsum(sd.eigenvalues) - choi.trace) < mpf(2) ** -120
        assert sd.dominance > 10
        # the dominant Kraus operator reproduces lambda_1 |v><v| through the displayed layout
        k = sd.kraus
        stacked = [mp.conj(k[o, i]) for (o, i) in CHOI_BASIS]
        for r, c in itertools.product(range(4), repeat=2):
            target = sd.eigenvalues[0] * sd.eigenvectors[0][r] * mp.conj(sd.eigenvectors[0][c])
            assert abs(stacked[r] * mp.conj(stacked[c]) - target) < mpf(2) ** -120


def test_case_study_frozen_spectrum(case_pipeline):
    p = case_pipeline
    sd = spectral(build_choi(amplitudes_at(mpf("5e-6"), p.sums, p.frame)))
    assert abs(sd.eigenvalues[0] - mpf("1.75675212433936080763")) < mpf(10) ** -18
    assert abs(bk_recovery_fidelity(sd, p.eps) - mpf("0.76986792558034473614")) < mpf(10) ** -18


def test_bounds_relations(case_pipeline):
    p = case_pipeline
    for t in _times(6):
        amp = amplitudes_at(t, p.sums, p.frame)
        exact, lower = fidelity_no_recovery(amp, p.eps)
        assert lower <= exact + 16 * p.eps
        sd = spectral(build_choi(amp))
        assert bk_recovery_fidelity(sd, p.eps) <= 1
        assert leakage_lower_bound(amp, p.eps) <= leakage_lower_bound(amp, p.eps / 2)
        assert abs(entanglement_fidelity(amp) - exact) < mpf(2) ** -120
        out = apply_truncated_channel(amp, MIXED)
        assert _trace(out) <= 1 + 4 * p.eps
        assert leakage_exact(amp) + mp.re(out[0, 0] + out[1, 1]) <= 1 + 4 * p.eps
        evals = sorted(mp.eigh(out)[0])
        assert evals[0] >= -4 * p.eps


def test_parity_of_output(case_pipeline, identity_pipeline):
    amp = amplitudes_at(mpf("3e-6"), case_pipeline.sums, case_pipeline.frame)
    out = apply_truncated_channel(amp, [[1, 0], [0, 0]])
    for i, j in itertools.product(range(4), repeat=2):
        if (i + j) % 2:
            assert out[i, j] == 0
    # odd levels are reached only together with an odd bath excitation, so they stay tiny
    assert 0 < abs(out[1, 1]) < mpf(10) ** -8
    amp = amplitudes_at(mpf("3e-6"), identity_pipeline.sums, identity_pipeline.frame)
    out = apply_truncated_channel(amp, [[1, 0], [0, 0]])
    assert all(out[i, j] == 0 for i, j in itertools.product(range(4), repeat=2) if i % 2 or j % 2)


def test_state_validation():
    validate_state(MIXED)
    for bad in ([[1, 0], [0, 1]], [[0.5, 0.6], [0.6, 0.5]], [[0.5, 1j], [0, 0.5]], [[1, 0, 0]] * 3):
        with pytest.raises(InvalidState):
            validate_state(bad)
