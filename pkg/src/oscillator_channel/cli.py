"""Command-line front end.

    python -m oscillator_channel derive     [--config FILE] [--KEY VALUE ...]
    python -m oscillator_channel amplitudes [--t SECONDS] ...
    python -m oscillator_channel sweep      [--out FILE] ...
    python -m oscillator_channel bounds     ...
    python -m oscillator_channel verify     ...

Configuration files hold one ``key = value`` pair per line; ``#`` starts a
comment.  Numerals are kept as text until the working precision is known, so
``k = 1e3`` is exactly 1000 at any precision.  Flags override file values.

Exit codes: 0 success, 1 invalid input, 2 computation error, 3 verify failure.
"""
import argparse
import json
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace

import numpy as np
from mpmath import mp, mpf

from . import _svg
from .amplitudes import (
    TruncationSpec, amplitudes_at, build_grouped_sums, csv_digits, format_fixed,
)
from .bounds import certified_refined_bound, error_budget
from .channel import (
    apply_truncated_channel, build_choi, choi_entry_indices, fidelity_no_recovery,
    leakage_lower_bound, spectral, bk_recovery_fidelity,
)
from .errors import DomainError, OscillatorChannelError, ParseError, ValidationError
from .gauss_integrals import build_integral_table, intensity_cap, mehler_cutoff
from .hermite import build_norm_table
from .model import OscillatorParams, bath_r_from_temperature, derive_frame

EXIT_OK, EXIT_INVALID, EXIT_COMPUTE, EXIT_VERIFY = 0, 1, 2, 3

NUMERAL = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
INTEGER = re.compile(r"^[+-]?\d+$")
REAL_KEYS = ("m_x", "m_y", "omega_x_bare", "omega_y_bare", "k", "r", "temperature_K",
             "t_start", "t_end")
INT_KEYS = ("D", "L", "N", "N_prime", "steps", "precision_bits")
TEXT_KEYS = ("cache_dir", "output")
OUTPUT_FORMATS = ("csv", "csv+svg")


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs.  Real-valued fields hold exact decimal text."""

    m_x: str = "1e-6"
    m_y: str = "2e-6"
    omega_x_bare: str = "1e6"
    omega_y_bare: str = "1e7"
    k: str = "1000"
    r: str = "0"
    temperature_K: str = None
    D: int = 3
    L: int = 2
    N: int = 6
    N_prime: int = 15
    t_start: str = "0"
    t_end: str = "5e-6"
    steps: int = 200
    precision_bits: int = 256
    cache_dir: str = None
    output: str = "csv"

    def real(self, name):
        with mp.workprec(self.precision_bits):
            return mpf(getattr(self, name))

    @property
    def spec(self):
        return TruncationSpec(self.D, self.L, self.N, self.N_prime)

    def times(self):
        """steps + 1 equally spaced times from t_start to t_end inclusive."""
        with mp.workprec(self.precision_bits):
            t0, t1 = mpf(self.t_start), mpf(self.t_end)
            return [t0 + (t1 - t0) * i / self.steps for i in range(self.steps + 1)]

    def oscillator_params(self):
        """OscillatorParams, with r derived from temperature_K when that is set."""
        base = OscillatorParams(self.m_x, self.m_y, self.omega_x_bare, self.omega_y_bare,
                                self.k, "0", self.precision_bits)
        if self.temperature_K is None:
            return replace(base, r=self.real("r"))
        with mp.workprec(self.precision_bits):
            omega_y = derive_frame(base).omega_y
            r = bath_r_from_temperature(omega_y, self.real("temperature_K"))
        if not r < 1:
            raise ValidationError("temperature too high: r rounds to 1")
        return replace(base, r=r)


def _coerce(key, value, line=None):
    if key in REAL_KEYS:
        if not NUMERAL.match(value):
            raise ParseError(f"{key}: not a decimal numeral: {value!r}", line)
        return value
    if key in INT_KEYS:
        if key == "N_prime" and value.lower() in ("none", ""):
            return None
        if not INTEGER.match(value):
            raise ParseError(f"{key}: not an integer: {value!r}", line)
        return int(value)
    if key in TEXT_KEYS:
        return value
    raise ParseError(f"unknown key {key!r}", line)


def validate(config):
    """Raise ValidationError naming the first violated invariant."""
    try:
        OscillatorParams(config.m_x, config.m_y, config.omega_x_bare, config.omega_y_bare,
                         config.k, config.r, config.precision_bits)
    except DomainError as exc:
        raise ValidationError(str(exc)) from None
    if config.precision_bits < 64:
        raise ValidationError("precision_bits must be at least 64")
    if config.temperature_K is not None and mpf(config.temperature_K) < 0:
        raise ValidationError("temperature_K must be nonnegative")
    if min(config.D, config.L, config.N) < 0:
        raise ValidationError("D, L and N must be nonnegative")
    if config.D < 3:
        raise ValidationError("D must be at least 3 for the qubit channel analysis")
    if config.N < 1:
        raise ValidationError("N must be at least 1")
    if config.N_prime is not None and config.N_prime <= config.N:
        raise ValidationError("N_prime must exceed N")
    if config.steps < 1:
        raise ValidationError("steps must be at least 1")
    with mp.workprec(config.precision_bits):
        if mpf(config.t_start) > mpf(config.t_end):
            raise ValidationError("t_start must not exceed t_end")
        if mpf(config.t_start) < 0:
            raise ValidationError("times must be nonnegative")
    if config.output not in OUTPUT_FORMATS:
        raise ValidationError(f"output must be one of {', '.join(OUTPUT_FORMATS)}")
    return config


def parse_config(text, overrides=None):
    """Parse a key = value document into a validated RunConfig.

    ``overrides`` (key -> text) are applied on top, as command-line flags are.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if key in values:
            raise ParseError(f"duplicate key {key!r}", lineno)
        values[key] = _coerce(key, value, lineno)
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = _coerce(key, str(value))
    if "r" in values and "temperature_K" in values:
        raise ValidationError("r and temperature_K are mutually exclusive")
    return validate(RunConfig(**values))


# --- pipeline ----------------------------------------------------------------


@dataclass
class Pipeline:
    config: RunConfig
    params: OscillatorParams
    frame: object
    r: object
    norms: object = None
    table: object = None
    sums: object = None
    budget: object = None

    @property
    def eps(self):
        return self.budget.best


def mehler_tail_tol(precision_bits):
    return mpf(2) ** (-(precision_bits // 2))


def build_pipeline(config, sums=True, budget=True):
    params = config.oscillator_params()
    frame = derive_frame(params)
    pipe = Pipeline(config, params, frame, params.r)
    if not (sums or budget):
        return pipe
    spec = config.spec
    prec = config.precision_bits
    with mp.workprec(prec):
        tol = mehler_tail_tol(prec)
        m_top, _ = mehler_cutoff(params.r, tol, intensity_cap(frame))
        kmax = spec.N_prime or spec.N
        refine = build_integral_table(frame, spec.D, spec.L, kmax, prec, config.cache_dir)
        pipe.table = refine
        if sums:
            table = refine
            if m_top > spec.L:
                table = build_integral_table(frame, spec.D, m_top, spec.N, prec, config.cache_dir)
            pipe.sums = build_grouped_sums(spec, table, params.r, frame, tail_tol=tol)
        if budget:
            pipe.norms = build_norm_table(max(spec.D, spec.L), prec)
            pipe.budget = error_budget(frame, pipe.norms, spec, params.r, refine,
                                       allow_uncoupled=True)
    return pipe


# --- commands ----------------------------------------------------------------

FRAME_FIELDS = ("omega_x", "omega_y", "theta", "cos_theta", "sin_theta", "omega_u",
                "omega_v", "u1", "u2", "v1", "v2", "m", "mu")


def cmd_derive(config, out):
    pipe = build_pipeline(config, sums=False, budget=False)
    with mp.workprec(config.precision_bits):
        rows = [("m_x", pipe.params.m_x), ("m_y", pipe.params.m_y), ("k", pipe.params.k),
                ("r", pipe.r)]
        rows += [(name, getattr(pipe.frame, name)) for name in FRAME_FIELDS]
        for name, value in rows:
            out.write(f"{name:<10} = {format_fixed(value, 10)}\n")
    return EXIT_OK


def cmd_amplitudes(config, out, t=None, err=None):
    err = err or sys.stderr
    pipe = build_pipeline(config)
    with mp.workprec(config.precision_bits):
        t = mpf(config.t_start if t is None else t)
        tensor = amplitudes_at(t, pipe.sums, pipe.frame)
        out.write(tensor.to_csv())
        err.write(f"epsilon = {mp.nstr(pipe.eps, 20)}\n")
    return EXIT_OK


def _choi_labels():
    """Distinct Choi entries (upper triangle) used as plotted amplitudes."""
    idx = choi_entry_indices()
    return [idx[r][c] for r in range(4) for c in range(r, 4)]


SWEEP_DIGITS = 20


def _sweep_row(pipe, t):
    eps = pipe.eps
    tensor = amplitudes_at(t, pipe.sums, pipe.frame)
    choi = build_choi(tensor)
    spec_data = spectral(choi)
    f_exact, f_lb = fidelity_no_recovery(tensor, eps)
    out = apply_truncated_channel(tensor, mp.matrix([[mpf(0.5), 0], [0, mpf(0.5)]]))
    row = {"t": t}
    for lab in _choi_labels():
        row["abs_A" + "".join(map(str, lab))] = abs(tensor[lab])
    for i, lam in enumerate(spec_data.eigenvalues, start=1):
        row[f"lambda{i}"] = lam
    row["leakage_lb"] = leakage_lower_bound(tensor, eps)
    row["f_I_exact"] = f_exact
    row["f_I_lb"] = f_lb
    row["f_BK_lb"] = bk_recovery_fidelity(spec_data, eps)
    row["trace"] = mp.re(mp.fsum(out[i, i] for i in range(out.rows)))
    return row


def _sweep_chunk(pipe, times):
    with mp.workprec(pipe.config.precision_bits):
        return [_sweep_row(pipe, t) for t in times]


def sweep_rows(pipe, jobs=1):
    """One dict per time step with magnitudes, spectrum and figures of merit.

    With jobs > 1 the time steps are split across worker processes sharing
    the read-only grouped sums; rows come back in time order.
    """
    times = pipe.config.times()
    if jobs <= 1:
        return _sweep_chunk(pipe, times)
    chunks = [times[i::jobs] for i in range(jobs)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(_sweep_chunk, [pipe] * jobs, chunks))
    rows = [None] * len(times)
    for i, part in enumerate(parts):
        rows[i::jobs] = part
    return rows


def sweep_csv(rows):
    header = list(rows[0])
    lines = [",".join(header)]
    for row in rows:
        cells = [mp.nstr(row["t"], 20)] + [format_fixed(row[k], SWEEP_DIGITS) for k in header[1:]]
        lines.append(",".join(cells))
    return "\r\n".join(lines) + "\r\n"


def sweep_svgs(rows):
    t = [float(r["t"]) for r in rows]
    amp_keys = [k for k in rows[0] if k.startswith("abs_A")]
    keep = [k for k in amp_keys if max(float(r[k]) for r in rows) > 1e-6]
    amps = {k[4:]: [float(r[k]) for r in rows] for k in keep}
    fid = {k: [float(r[k]) for r in rows] for k in ("leakage_lb", "f_I_lb", "f_BK_lb")}
    return (
        _svg.line_chart(t, amps, "Truncated amplitude magnitudes", "t (s)", "|A|"),
        _svg.line_chart(t, fid, "Leakage and fidelity lower bounds", "t (s)", "value"),
    )


def cmd_sweep(config, out, out_path=None, jobs=1):
    if config.output == "csv+svg" and out_path is None:
        raise ValidationError("output = csv+svg needs --out to place the SVG files")
    pipe = build_pipeline(config)
    with mp.workprec(config.precision_bits):
        rows = sweep_rows(pipe, jobs)
        out.write(sweep_csv(rows))
    if config.output == "csv+svg":
        stem = os.path.splitext(out_path)[0]
        amp_svg, fid_svg = sweep_svgs(rows)
        with open(stem + "_amplitudes.svg", "w") as fh:
            fh.write(amp_svg)
        with open(stem + "_fidelity.svg", "w") as fh:
            fh.write(fid_svg)
    return EXIT_OK


def _certified(pipe):
    """Sound N -> N' difference bound (None without N_prime or at r > 0)."""
    spec = pipe.config.spec
    if spec.N_prime is None or pipe.r != 0:
        return None
    with mp.workprec(pipe.config.precision_bits):
        sums_n = build_grouped_sums(spec, pipe.table, 0, pipe.frame)
        sums_np = build_grouped_sums(TruncationSpec(spec.D, spec.L, spec.N_prime), pipe.table, 0, pipe.frame)
        return certified_refined_bound(pipe.budget.constants, sums_n, sums_np, 0, pipe.frame)


def cmd_bounds(config, out):
    pipe = build_pipeline(config, sums=False)
    b = pipe.budget
    c = b.constants
    with mp.workprec(config.precision_bits):
        rows = [("c1", c.c1), ("c2", c.c2), ("C", c.C), ("A", c.A), ("A_tilde", c.A_tilde),
                ("B", c.B), ("B_tilde", c.B_tilde), ("n_D", c.n_D), ("n_L", c.n_L),
                ("theorem1_bound", b.epsilon), ("remark1_dominant", b.dominant_term),
                ("remark1_numeric_cap", b.numeric_cap),
                ("theorem1_over_dominant", b.epsilon / b.dominant_term),
                ("remark3_bound", b.epsilon_refined),
                ("certified_refined_bound", _certified(pipe))]
        for name, value in rows:
            text = "none" if value is None else mp.nstr(value, 15)
            out.write(f"{name:<24} = {text}\n")
    return EXIT_OK


def cmd_verify(config, out):
    from .verify import run_suite

    report = run_suite(config)
    out.write(json.dumps(report, indent=2) + "\n")
    return EXIT_OK if report["passed"] else EXIT_VERIFY


# --- entry point -------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="oscillator_channel", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("derive", "amplitudes", "sweep", "bounds", "verify"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--out", help="write the primary output here instead of stdout")
        for f in fields(RunConfig):
            p.add_argument(f"--{f.name}", dest=f"opt_{f.name}", metavar="VALUE")
        if name == "amplitudes":
            p.add_argument("--t", help="time in seconds (default t_start)")
        if name == "sweep":
            p.add_argument("--jobs", type=int, default=1, help="worker processes over time steps")
    return parser


def load_config(args):
    text = ""
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    overrides = {f.name: getattr(args, f"opt_{f.name}") for f in fields(RunConfig)}
    return parse_config(text, overrides)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args)
    except (ParseError, ValidationError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        if args.command == "derive":
            return cmd_derive(config, out)
        if args.command == "amplitudes":
            if args.t is not None and not NUMERAL.match(args.t):
                raise ValidationError(f"--t: not a decimal numeral: {args.t!r}")
            return cmd_amplitudes(config, out, args.t)
        if args.command == "sweep":
            return cmd_sweep(config, out, args.out, max(1, args.jobs))
        if args.command == "bounds":
            return cmd_bounds(config, out)
        return cmd_verify(config, out)
    except ValidationError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except (OscillatorChannelError, ArithmeticError, ValueError) as exc:
        sys.stderr.write(f"computation failed: {exc}\n")
        return EXIT_COMPUTE
    finally:
        if out is not sys.stdout:
            out.close()
