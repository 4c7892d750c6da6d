"""Cross-module invariant suite behind ``python -m oscillator_channel verify``.

Each check returns ``(passed, detail)``; ``run_suite`` collects them into a
JSON-ready report.  Grid sizes are kept small so the suite finishes in well
under a minute; the acceptance tests run the full-size versions.
"""
import itertools
import random
import time

import numpy as np
from mpmath import mp, mpf

from .amplitudes import amplitudes_at
from .channel import apply_truncated_channel, build_choi
from .gauss_integrals import (
    hermite_gram, integral_I, integral_I_quadrature, integral_J, integral_J_direct,
)
from .hermite import (
    check_charlier_cramer, check_lemma1, check_lemma2, mehler_kernel, mehler_partial_sum,
    worst_ratio, lemma1_bound,
)

SEED = 20240601


def check_orthonormality(pipe, nmax=12):
    gram = hermite_gram(nmax)
    err = max(abs(gram[m][n] - (1 if m == n else 0)) for m in range(nmax + 1) for n in range(nmax + 1))
    tol = mpf(2) ** (16 - mp.prec)
    return err <= tol, {"max_error": mp.nstr(err, 5), "tol": mp.nstr(tol, 5)}


def check_mehler(pipe):
    worst = mpf(0)
    for z, x, y in (("0.5", "0.3", "-0.7"), ("0.3", "1.1", "0.4"), ("-0.6", "-0.2", "0.9")):
        z = mpf(z)
        terms = int(mp.prec / -mp.log(abs(z), 2)) + 40
        worst = max(worst, abs(mehler_partial_sum(z, x, y, terms) - mehler_kernel(z, x, y)))
    tol = mpf(2) ** (-mp.prec // 2)
    return worst <= tol, {"max_error": mp.nstr(worst, 5)}


def check_envelopes(pipe, n_max=20, points=2000):
    violations = []
    for n in range(0, n_max + 1):
        if n >= 1:
            grid = np.linspace(-np.sqrt(n), np.sqrt(n), points)
            if not check_lemma1(n, grid):
                violations.append({"bound": "interior", "n": n, "worst_ratio":
                                   worst_ratio(n, grid, lemma1_bound(n))})
        outer = np.concatenate([np.linspace(-30, -1.0001, points // 2), np.linspace(1.0001, 30, points // 2)])
        if not check_lemma2(n, outer):
            violations.append({"bound": "gaussian", "n": n})
        if not check_charlier_cramer(n, np.linspace(-30, 30, points)):
            violations.append({"bound": "charlier_cramer", "n": n})
    return not violations, {"violations": violations}


def check_I_oracle(pipe, samples=8):
    rng = random.Random(SEED)
    worst = mpf(0)
    for _ in range(samples):
        idx = [rng.randint(0, 4) for _ in range(4)]
        worst = max(worst, abs(integral_I(*idx, pipe.frame) - integral_I_quadrature(*idx, pipe.frame)))
    return worst <= mpf("1e-20"), {"max_error": mp.nstr(worst, 5)}


def check_J_oracle(pipe, samples=3):
    rng = random.Random(SEED + 1)
    worst, worst_ok = mpf(0), True
    for _ in range(samples):
        b, a, kappa, chi, kp, cp = (rng.randint(0, 2) for _ in range(6))
        val, tail = integral_J(b, a, kappa, chi, kp, cp, pipe.r, pipe.frame)
        err = abs(val - integral_J_direct(b, a, kappa, chi, kp, cp, pipe.r, pipe.frame))
        worst = max(worst, err)
        worst_ok &= err <= max(mpf("1e-18"), tail)
    return worst_ok, {"max_error": mp.nstr(worst, 5), "r": mp.nstr(pipe.r, 10)}


def _sample_times(pipe, count):
    rng = random.Random(SEED + 2)
    t0, t1 = pipe.config.real("t_start"), pipe.config.real("t_end")
    return [t0 + (t1 - t0) * mpf(rng.random()) for _ in range(count)]


def check_parity(pipe, times=3):
    bad = 0
    for t in _sample_times(pipe, times):
        tensor = amplitudes_at(t, pipe.sums, pipe.frame)
        d = tensor.D + 1
        bad += sum(1 for i in itertools.product(range(d), repeat=4) if sum(i) % 2 and tensor[i] != 0)
    return bad == 0, {"nonzero_parity_mismatched": bad}


def check_hermiticity(pipe, times=3):
    tol = mpf(2) ** -128
    worst = mpf(0)
    for t in _sample_times(pipe, times):
        tensor = amplitudes_at(t, pipe.sums, pipe.frame)
        d = tensor.D + 1
        for a, b, ap, bp in itertools.product(range(d), repeat=4):
            worst = max(worst, abs(tensor[a, b, ap, bp] - mp.conj(tensor[b, a, bp, ap])))
        chi = build_choi(tensor).matrix
        for i in range(4):
            for j in range(4):
                worst = max(worst, abs(chi[i, j] - mp.conj(chi[j, i])))
    return worst <= tol, {"max_defect": mp.nstr(worst, 5)}


def check_trace(pipe, times=5):
    eps = pipe.eps
    mixed = mp.matrix([[mpf(0.5), 0], [0, mpf(0.5)]])
    worst = -mp.inf
    for t in _sample_times(pipe, times):
        out = apply_truncated_channel(amplitudes_at(t, pipe.sums, pipe.frame), mixed)
        worst = max(worst, mp.re(mp.fsum(out[i, i] for i in range(out.rows))))
    return worst <= 1 + 4 * eps, {"max_trace": mp.nstr(worst, 15), "limit": mp.nstr(1 + 4 * eps, 15)}


CHECKS = (
    ("orthonormality", check_orthonormality),
    ("mehler_convergence", check_mehler),
    ("envelope_grids", check_envelopes),
    ("I_oracle", check_I_oracle),
    ("J_oracle", check_J_oracle),
    ("parity_zeros", check_parity),
    ("hermiticity", check_hermiticity),
    ("trace_non_increase", check_trace),
)


def run_suite(config):
    from .cli import build_pipeline

    with mp.workprec(config.precision_bits):
        pipe = build_pipeline(config)
        results = []
        for name, check in CHECKS:
            start = time.perf_counter()
            try:
                passed, detail = check(pipe)
            except Exception as exc:  # a crashing check is a failed check
                passed, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
            results.append({"name": name, "passed": bool(passed),
                            "seconds": round(time.perf_counter() - start, 3), "detail": detail})
    return {"passed": all(r["passed"] for r in results), "checks": results}
