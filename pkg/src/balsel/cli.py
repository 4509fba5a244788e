"""Command-line interface and text file formats.

Commands
--------
gramians     write W_c / W_o of a model in the matrix text format
select       QR sensor/actuator selection with diagnostics and bounds
bruteforce   exhaustive subset enumeration histogram (CSV)
bench-random QR objective vs. random-ensemble sweep over ranks (CSV)
gl-demo      Ginzburg-Landau placement + closed-loop + gain-map CSVs
scaling      pivoting runtime sweeps over state dimension and rank

Matrix text format: a header line ``matrix <rows> <cols> <real|complex>``
followed by whitespace-separated row-major entries, complex entries as
``re,im``; ``#`` starts a comment.  A model file is a line
``model <continuous|discrete>`` followed by the A, B, C matrix blocks.
Indices printed by commands are 1-based; exit codes are 0 (ok),
2 (domain error), 3 (parse error), 4 (resource cap).
"""

import argparse
import os
import sys
import time

import numpy as np

from . import balancing, evaluation, gramian, matkernel, models, selection, statespace
from .errors import (
    BalselError,
    EnumerationCapError,
    FormatError,
)

__all__ = [
    "main",
    "write_matrix",
    "read_matrix",
    "write_model",
    "read_model",
    "read_keyvalue_config",
]

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_PARSE = 3
EXIT_CAP = 4


# ---------------------------------------------------------------- formats


def _fmt(x):
    return f"{x:.17g}"


def _fmt_entry(z, field):
    if field == "real":
        return _fmt(z.real)
    return f"{_fmt(z.real)},{_fmt(z.imag)}"


def write_matrix(fh, a, name=None):
    a = matkernel.as_complex(a)
    field = "real" if not np.any(a.imag) else "complex"
    if name:
        fh.write(f"# {name}\n")
    fh.write(f"matrix {a.shape[0]} {a.shape[1]} {field}\n")
    for row in a:
        fh.write(" ".join(_fmt_entry(z, field) for z in row) + "\n")


def _tokenize(text):
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        yield from line.split()


def _parse_entry(tok, field):
    try:
        if field == "complex":
            re_s, im_s = tok.split(",")
            return complex(float(re_s), float(im_s))
        return complex(float(tok), 0.0)
    except ValueError as exc:
        raise FormatError(f"bad matrix entry {tok!r}") from exc


def _read_matrix_tokens(tokens):
    try:
        head = next(tokens)
    except StopIteration as exc:
        raise FormatError("expected a matrix block") from exc
    if head != "matrix":
        raise FormatError(f"expected 'matrix' header, found {head!r}")
    try:
        rows = int(next(tokens))
        cols = int(next(tokens))
        field = next(tokens)
    except (StopIteration, ValueError) as exc:
        raise FormatError("malformed matrix header") from exc
    if field not in ("real", "complex"):
        raise FormatError(f"unknown field tag {field!r}")
    data = np.empty(rows * cols, dtype=np.complex128)
    for i in range(rows * cols):
        try:
            data[i] = _parse_entry(next(tokens), field)
        except StopIteration as exc:
            raise FormatError("matrix block ended early") from exc
    return data.reshape(rows, cols)


def read_matrix(text):
    """Parse one matrix block from text in the matrix text format."""
    return _read_matrix_tokens(_tokenize(text))


def write_model(fh, m):
    fh.write(f"model {m.time_domain}\n")
    write_matrix(fh, m.a, "A")
    write_matrix(fh, m.b, "B")
    write_matrix(fh, m.c, "C")


def read_model(text):
    """Parse a model file: 'model <domain>' plus A, B, C matrix blocks."""
    tokens = _tokenize(text)
    try:
        head = next(tokens)
    except StopIteration as exc:
        raise FormatError("empty model file") from exc
    if head != "model":
        raise FormatError(f"expected 'model' header, found {head!r}")
    try:
        domain = next(tokens)
    except StopIteration as exc:
        raise FormatError("missing time-domain tag") from exc
    if domain not in (statespace.CONTINUOUS, statespace.DISCRETE):
        raise FormatError(f"unknown time domain {domain!r}")
    a = _read_matrix_tokens(tokens)
    b = _read_matrix_tokens(tokens)
    c = _read_matrix_tokens(tokens)
    try:
        return statespace.StateSpaceModel(a, b, c, time_domain=domain)
    except BalselError as exc:
        raise FormatError(str(exc)) from exc


def read_keyvalue_config(text):
    """Parse a flat key=value config file ('#' comments allowed)."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"line {lineno}: expected key=value")
        key, val = line.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def _parse_complex_cfg(s):
    try:
        return complex(s.replace(" ", ""))
    except ValueError as exc:
        raise FormatError(f"bad complex number {s!r}") from exc


def gl_params_from_config(cfg):
    kwargs = {}
    if "n" in cfg:
        kwargs["n"] = int(cfg["n"])
    if "nu" in cfg:
        kwargs["nu"] = _parse_complex_cfg(cfg["nu"])
    if "beta_diff" in cfg:
        kwargs["beta_diff"] = _parse_complex_cfg(cfg["beta_diff"])
    if "kernel_width" in cfg:
        kwargs["kernel_width"] = float(cfg["kernel_width"])
    if "mu_profile" in cfg:
        parts = [float(v) for v in cfg["mu_profile"].split(",")]
        if len(parts) != 3:
            raise FormatError("mu_profile needs three coefficients")
        kwargs["mu_profile"] = tuple(parts)
    try:
        return models.GinzburgLandauParams(**kwargs)
    except (ValueError, BalselError) as exc:
        raise FormatError(str(exc)) from exc


# ---------------------------------------------------------------- helpers


def _load_model(args):
    if bool(args.model) == bool(args.generate):
        raise FormatError("provide exactly one model source (--model or --generate)")
    if args.model:
        try:
            with open(args.model) as fh:
                return read_model(fh.read())
        except OSError as exc:
            raise FormatError(f"cannot read {args.model}: {exc}") from exc
    parts = args.generate.split(",")
    if len(parts) not in (4, 5):
        raise FormatError("--generate expects n,p,q,seed[,discrete]")
    try:
        n, p, q, seed = (int(v) for v in parts[:4])
    except ValueError as exc:
        raise FormatError("--generate expects integer n,p,q,seed") from exc
    domain = statespace.CONTINUOUS
    if len(parts) == 5:
        if parts[4] not in (statespace.DISCRETE, statespace.CONTINUOUS):
            raise FormatError(f"unknown time domain {parts[4]!r}")
        domain = parts[4]
    return models.random_stable_system(n, p, q, seed, time_domain=domain)


def _freq_grid(args):
    if args.freq_grid:
        parts = args.freq_grid.split(",")
        if len(parts) != 3:
            raise FormatError("--freq-grid expects lo,hi,count")
        try:
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise FormatError("bad --freq-grid values") from exc
        return statespace.log_grid(lo, hi, count)
    return statespace.default_grid()


def _cap(args):
    cap = int(os.environ.get("BALSEL_CAP", evaluation.DEFAULT_CAP))
    if args.cap is not None:
        cap = args.cap
    return cap


def _ones_based(indices):
    return ",".join(str(int(i) + 1) for i in indices)


def _select_on_model(m, r, no_collocate):
    grams = gramian.compute_gramians(m)
    bal = balancing.balance(grams, r)
    sel = selection.select_subsets(m.c, m.b, bal.psi_r, bal.phi_r, no_collocate=no_collocate)
    return grams, bal, sel


# ---------------------------------------------------------------- commands


def cmd_gramians(args):
    m = _load_model(args)
    if not statespace.is_stable(m):
        print("error: model is unstable; gramians undefined", file=sys.stderr)
        return EXIT_DOMAIN
    grams = gramian.compute_gramians(m)
    outdir = args.out or "."
    os.makedirs(outdir, exist_ok=True)
    for name, mat in (("Wc.txt", grams.w_c), ("Wo.txt", grams.w_o)):
        with open(os.path.join(outdir, name), "w") as fh:
            write_matrix(fh, mat, name.split(".")[0])
    print(f"wrote {outdir}/Wc.txt and {outdir}/Wo.txt")
    print(f"residual_c {_fmt(grams.residual_c)}")
    print(f"residual_o {_fmt(grams.residual_o)}")
    return EXIT_OK


def cmd_select(args):
    m = _load_model(args)
    if not statespace.is_stable(m):
        print("error: model is unstable", file=sys.stderr)
        return EXIT_DOMAIN
    r = args.rank or args.budget
    if not r:
        raise FormatError("--rank (or --budget) is required")
    grams, bal, sel = _select_on_model(m, r, args.no_collocate)
    gram_sensor = m.c @ grams.w_c @ m.c.conj().T
    gram_actuator = m.b.conj().T @ grams.w_o @ m.b
    report = evaluation.objective_report(sel, gram_sensor, gram_actuator)

    print(f"gamma {_ones_based(sel.gamma)}")
    print(f"beta {_ones_based(sel.beta)}")
    print("r_diag_sensors " + " ".join(_fmt(v) for v in sel.r_diag_sensors))
    print("r_diag_actuators " + " ".join(_fmt(v) for v in sel.r_diag_actuators))
    print(f"logdet_sensor {_fmt(report.logdet_sensor)}")
    print(f"logdet_actuator {_fmt(report.logdet_actuator)}")
    print(f"trace_sensor {_fmt(report.trace_sensor)}")
    if args.metric == "h2":
        print(f"h2_norm {_fmt(statespace.h2_norm_gramian(m, grams))}")
        print(f"h2_norm_frequency {_fmt(statespace.h2_norm_frequency(m, _freq_grid(args)))}")
    err_explicit = selection.sensor_state_error_bound(m.c, bal.psi_r, bal.hankel)
    err_sqrt_p = selection.sensor_state_error_bound(m.c, bal.psi_r, bal.hankel, form="sqrt_p")
    low_s = selection.sensor_logdet_lower_bound(m.c, bal.psi_r, bal.hankel, sel.gamma)
    low_a = selection.actuator_logdet_lower_bound(m.b, bal.phi_r, bal.hankel, sel.beta)
    print(f"interp_error_bound {_fmt(err_explicit)}")
    print(f"interp_error_bound_sqrt_p {_fmt(err_sqrt_p)}")
    print(f"logdet_lower_bound_sensor {_fmt(low_s)}")
    print(f"logdet_lower_bound_actuator {_fmt(low_a)}")

    if args.out:
        with open(args.out, "w") as fh:
            fh.write("side,pivot_rank,index,abs_r_diag\n")
            for k, (j, d) in enumerate(zip(sel.gamma, sel.r_diag_sensors), 1):
                fh.write(f"sensor,{k},{int(j) + 1},{_fmt(d)}\n")
            for k, (j, d) in enumerate(zip(sel.beta, sel.r_diag_actuators), 1):
                fh.write(f"actuator,{k},{int(j) + 1},{_fmt(d)}\n")
    return EXIT_OK


def cmd_bruteforce(args):
    m = _load_model(args)
    if not statespace.is_stable(m):
        print("error: model is unstable", file=sys.stderr)
        return EXIT_DOMAIN
    budget = args.budget or args.rank
    if not budget:
        raise FormatError("--budget (or --rank) is required")
    grams, bal, sel = _select_on_model(m, budget, args.no_collocate)
    gram_sensor = m.c @ grams.w_c @ m.c.conj().T
    best, values = evaluation.brute_force(
        gram_sensor, budget, cap=_cap(args), metric=args.metric
    )
    if args.metric == "trace":
        qr_value = evaluation.trace_objective(sel.gamma, gram_sensor)
    else:
        qr_value = evaluation.logdet_objective(sel.gamma, gram_sensor)
    pct = evaluation.percentile_strictly_below(values, qr_value)
    out = args.out or "bruteforce.csv"
    with open(out, "w") as fh:
        fh.write("value\n")
        for v in values:
            fh.write(_fmt(v) + "\n")
        fh.write(
            f"# best={_fmt(values.max())} qr={_fmt(qr_value)} percentile={_fmt(pct)}\n"
        )
    print(f"subsets {values.size}")
    print(f"best {_fmt(values.max())}")
    print(f"qr_value {_fmt(qr_value)}")
    print(f"percentile {_fmt(pct)}")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_bench_random(args):
    m = _load_model(args)
    if not statespace.is_stable(m):
        print("error: model is unstable", file=sys.stderr)
        return EXIT_DOMAIN
    ranks = _parse_rank_list(args)
    seeds = [int(s) for s in (args.seeds or "0").split(",")]
    out = args.out or "bench_random.csv"
    with open(out, "w") as fh:
        fh.write("seed,r,qr_value,sample_id,sample_value\n")
        for seed in seeds:
            rows = evaluation.rank_sweep(m, ranks, count=args.ensemble_count, seed=seed)
            for row in rows:
                for sid, sval in enumerate(row["samples"]):
                    fh.write(
                        f"{seed},{row['r']},{_fmt(row['qr_value'])},{sid},{_fmt(sval)}\n"
                    )
    print(f"wrote {out}")
    return EXIT_OK


def _parse_rank_list(args):
    if args.rank:
        return [args.rank]
    spec = args.ranks or "1-10"
    if "-" in spec:
        lo, hi = spec.split("-", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(v) for v in spec.split(",")]


def cmd_gl_demo(args):
    if args.gl_params:
        try:
            with open(args.gl_params) as fh:
                params = gl_params_from_config(read_keyvalue_config(fh.read()))
        except OSError as exc:
            raise FormatError(f"cannot read {args.gl_params}: {exc}") from exc
    else:
        params = models.GinzburgLandauParams()
    outdir = args.out or "."
    os.makedirs(outdir, exist_ok=True)
    max_r = args.rank or 5
    xi = params.grid

    placement_path = os.path.join(outdir, "placement.csv")
    pipe = None
    with open(placement_path, "w") as fh:
        fh.write("r,pair,sensor_index,sensor_xi,actuator_index,actuator_xi,h2,stable\n")
        for r in range(1, max_r + 1):
            try:
                pipe = models.gl_pipeline(params, r=r, no_collocate=args.no_collocate)
            except BalselError as exc:
                print(f"r={r}: synthesis failed: {exc}", file=sys.stderr)
                continue
            sel = pipe["selection"]
            gs = np.sort(sel.gamma)
            bs = np.sort(sel.beta)
            for k in range(r):
                fh.write(
                    f"{r},{k + 1},{int(gs[k]) + 1},{_fmt(xi[gs[k]])},"
                    f"{int(bs[k]) + 1},{_fmt(xi[bs[k]])},"
                    f"{_fmt(pipe['h2'])},{int(pipe['stable'])}\n"
                )
            print(
                f"r={r}: h2={_fmt(pipe['h2'])} stable={pipe['stable']} "
                f"sensors xi={np.round(xi[gs], 3).tolist()} "
                f"actuators xi={np.round(xi[bs], 3).tolist()}"
            )

    if pipe is not None:
        if args.freq_grid:
            grid = _freq_grid(args)
        else:
            grid = statespace.FrequencyGrid(np.array([0.1, 10.0, 1000.0]), "log")
        gains, gs, bs = models.lqg_gain_grid(
            pipe["controller"], pipe["selection"].gamma, pipe["selection"].beta, grid, xi
        )
        gain_path = os.path.join(outdir, "lqg_gain.csv")
        with open(gain_path, "w") as fh:
            fh.write("omega,actuator_row,sensor_col,gain_db\n")
            for i, omega in enumerate(grid.points):
                for j in range(gains.shape[1]):
                    for k in range(gains.shape[2]):
                        fh.write(f"{_fmt(omega)},{j + 1},{k + 1},{_fmt(gains[i, j, k])}\n")
        print(f"wrote {placement_path} and {gain_path}")
    return EXIT_OK


def _time_pivoting(n, r, repeats, rng):
    modes = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        matkernel.pivoted_qr(modes.conj().T, max_pivots=r)
        best = min(best, time.perf_counter() - t0)
    return best


def cmd_scaling(args):
    rng = np.random.default_rng(args.seed_value)
    r_fixed = args.rank or 10
    out = args.out or "scaling.csv"
    repeats = 5
    rows = []
    for n in (1000, 2000, 4000, 8000):
        rows.append(("n", n, r_fixed, _time_pivoting(n, r_fixed, repeats, rng)))
    n_fixed = 4000
    for r in (5, 10, 20, 40):
        rows.append(("r", n_fixed, r, _time_pivoting(n_fixed, r, repeats, rng)))
    with open(out, "w") as fh:
        fh.write("sweep,n,r,seconds\n")
        for sweep, n, r, sec in rows:
            fh.write(f"{sweep},{n},{r},{_fmt(sec)}\n")
    for sweep in ("n", "r"):
        sel_rows = [row for row in rows if row[0] == sweep]
        xs = np.log([row[1] if sweep == "n" else row[2] for row in sel_rows])
        ys = np.log([row[3] for row in sel_rows])
        slope = np.polyfit(xs, ys, 1)[0]
        print(f"{sweep}-sweep fitted exponent {slope:.3f}")
    print(f"wrote {out}")
    return EXIT_OK


# ---------------------------------------------------------------- driver


def _add_model_args(p):
    p.add_argument("--model", help="model file (matrix text format)")
    p.add_argument(
        "--generate",
        help="random stable model spec n,p,q,seed[,discrete]",
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="balsel",
        description="Balanced-truncation sensor/actuator selection toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gramians", help="write controllability/observability gramians")
    _add_model_args(p)
    p.add_argument("--out", help="output directory")

    p = sub.add_parser("select", help="QR sensor/actuator selection")
    _add_model_args(p)
    p.add_argument("--rank", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--no-collocate", action="store_true")
    p.add_argument("--metric", choices=("logdet", "trace", "h2"), default="logdet")
    p.add_argument("--freq-grid", help="frequency grid lo,hi,count")
    p.add_argument("--out", help="CSV output path")

    p = sub.add_parser("bruteforce", help="exhaustive subset enumeration")
    _add_model_args(p)
    p.add_argument("--rank", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--no-collocate", action="store_true")
    p.add_argument("--metric", choices=("logdet", "trace"), default="logdet")
    p.add_argument("--cap", type=int)
    p.add_argument("--out", help="CSV output path")

    p = sub.add_parser("bench-random", help="QR vs random ensembles across ranks")
    _add_model_args(p)
    p.add_argument("--rank", type=int)
    p.add_argument("--ranks", help="rank range lo-hi or comma list")
    p.add_argument("--seeds", help="comma-separated ensemble seeds")
    p.add_argument("--ensemble-count", type=int, default=200)
    p.add_argument("--out", help="CSV output path")

    p = sub.add_parser("gl-demo", help="Ginzburg-Landau placement demo")
    p.add_argument("--gl-params", help="key=value parameter file")
    p.add_argument("--rank", type=int, help="largest budget (default 5)")
    p.add_argument("--no-collocate", action="store_true")
    p.add_argument("--freq-grid", help="gain-map frequency grid lo,hi,count")
    p.add_argument("--out", help="output directory")

    p = sub.add_parser("scaling", help="pivoting runtime scaling sweeps")
    p.add_argument("--rank", type=int, help="fixed rank for the n sweep")
    p.add_argument("--seed-value", type=int, default=0)
    p.add_argument("--out", help="CSV output path")

    return parser


_COMMANDS = {
    "gramians": cmd_gramians,
    "select": cmd_select,
    "bruteforce": cmd_bruteforce,
    "bench-random": cmd_bench_random,
    "gl-demo": cmd_gl_demo,
    "scaling": cmd_scaling,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except FormatError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except EnumerationCapError as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except BalselError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
