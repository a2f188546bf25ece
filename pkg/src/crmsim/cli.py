"""Command-line front end: experiment orchestration and figure-data emission.

Every command writes one artifact file in the requested format (csv, json or
svg); the exact configuration and seed are embedded in the artifact, and
re-running an embedded configuration reproduces the file byte for byte. CSV is
the canonical data format; SVG renders minimal log-log line plots with no
plotting dependency.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
from xml.sax.saxutils import escape

import numpy as np

from . import __version__
from .arrival_kernels import ArrivalKernel, MellinStripError
from .constructions import sample_exchangeable, sample_iid, sample_rosinski_ggp, sample_sequential
from .distributions import RngStream
from .error_analysis import (
    asymptotic_error,
    error_mgf,
    fit_loglog_slope,
    likelihood_bound,
    mc_residual_masses,
    mc_truncation_error,
    mixture_prior_demo,
)
from .size_measures import SizeMeasure

_PROCESS_NAMES = ("ggp", "stable", "gamma-process", "sbp", "beta-process", "transformed-bp")


# -- argument plumbing ---------------------------------------------------------


def parse_kernel_spec(spec):
    """'deterministic' | 'exponential' | 'gamma:K' | 'inverse-gamma:K' | 'pareto:C'."""
    name, _, arg = spec.partition(":")
    name = name.strip().lower().replace("_", "-")
    if name == "deterministic":
        return ArrivalKernel.deterministic()
    if name == "exponential":
        return ArrivalKernel.exponential()
    if name == "gamma":
        return ArrivalKernel.gamma(float(arg or 1.0))
    if name in ("inverse-gamma", "igamma"):
        return ArrivalKernel.inverse_gamma(float(arg or 1.0))
    if name == "pareto":
        return ArrivalKernel.pareto(float(arg or 1.0))
    raise ValueError("unknown kernel spec %r" % spec)


def build_process(name, alpha, sigma, tau, c):
    name = name.lower().replace("_", "-")
    if name == "ggp":
        return SizeMeasure.ggp(alpha, sigma, tau)
    if name == "stable":
        return SizeMeasure.stable(alpha, sigma)
    if name == "gamma-process":
        return SizeMeasure.gamma_process(alpha, tau)
    if name == "sbp":
        return SizeMeasure.sbp(alpha, sigma, c)
    if name == "beta-process":
        return SizeMeasure.beta_process(alpha)
    if name == "transformed-bp":
        return SizeMeasure.transformed_bp(alpha)
    raise ValueError("unknown process %r" % name)


def parse_reps(spec):
    """'AxB' -> (arrival sequences, jump resamples per sequence)."""
    a, _, b = str(spec).lower().partition("x")
    if not b:
        return int(a), 1
    return int(a), int(b)


def parse_grid(spec):
    return [int(v) for v in str(spec).split(",") if v.strip()]


def parse_floats(spec):
    return [float(v) for v in str(spec).split(",") if v.strip()]


def parse_sigma_grid(spec):
    lo, hi, count = str(spec).split(":")
    return np.linspace(float(lo), float(hi), int(count))


def env_seed():
    raw = os.environ.get("CRM_SEED")
    return int(raw) if raw else 0


# -- output writers --------------------------------------------------------------


def _config_json(config):
    return json.dumps(config, sort_keys=True)


def write_csv(path, command, config, header, rows, comments=()):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("# crmsim %s v%s\n" % (command, __version__))
        fh.write("# config: %s\n" % _config_json(config))
        for line in comments:
            fh.write("# %s\n" % line)
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row])


def write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def _svg_ticks(lo, hi):
    first = math.ceil(lo - 1e-9)
    return [d for d in range(first, math.floor(hi + 1e-9) + 1)]


_SVG_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"]


def write_svg(path, command, config, series, title, xlabel, ylabel):
    """Minimal log-log line plot: axes, decade ticks, one polyline per series."""
    width, height = 720, 520
    ml, mr, mt, mb = 70, 160, 40, 50
    pw, ph = width - ml - mr, height - mt - mb
    xs = np.concatenate([np.asarray(s[1], dtype=float) for s in series])
    ys = np.concatenate([np.asarray(s[2], dtype=float) for s in series])
    keep = (xs > 0) & (ys > 0) & np.isfinite(xs) & np.isfinite(ys)
    lx0, lx1 = np.log10(xs[keep].min()), np.log10(xs[keep].max())
    ly0, ly1 = np.log10(ys[keep].min()), np.log10(ys[keep].max())
    if lx1 - lx0 < 1e-9:
        lx0, lx1 = lx0 - 0.5, lx1 + 0.5
    if ly1 - ly0 < 1e-9:
        ly0, ly1 = ly0 - 0.5, ly1 + 0.5

    def px(v):
        return ml + (math.log10(v) - lx0) / (lx1 - lx0) * pw

    def py(v):
        return mt + ph - (math.log10(v) - ly0) / (ly1 - ly0) * ph

    out = io.StringIO()
    out.write('<?xml version="1.0" encoding="UTF-8"?>\n')
    out.write(
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="%d" height="%d">\n'
        % (width, height)
    )
    out.write("<desc>crmsim %s config: %s</desc>\n" % (command, escape(_config_json(config))))
    out.write('<rect width="%d" height="%d" fill="white"/>\n' % (width, height))
    out.write(
        '<text x="%d" y="22" font-family="sans-serif" font-size="15">%s</text>\n'
        % (ml, escape(title))
    )
    # frame
    out.write(
        '<rect x="%d" y="%d" width="%d" height="%d" fill="none" stroke="black"/>\n'
        % (ml, mt, pw, ph)
    )
    for d in _svg_ticks(lx0, lx1):
        x = ml + (d - lx0) / (lx1 - lx0) * pw
        out.write('<line x1="%.1f" y1="%d" x2="%.1f" y2="%d" stroke="#ccc"/>\n' % (x, mt, x, mt + ph))
        out.write(
            '<text x="%.1f" y="%d" font-family="sans-serif" font-size="11" text-anchor="middle">1e%d</text>\n'
            % (x, mt + ph + 16, d)
        )
    for d in _svg_ticks(ly0, ly1):
        y = mt + ph - (d - ly0) / (ly1 - ly0) * ph
        out.write('<line x1="%d" y1="%.1f" x2="%d" y2="%.1f" stroke="#ccc"/>\n' % (ml, y, ml + pw, y))
        out.write(
            '<text x="%d" y="%.1f" font-family="sans-serif" font-size="11" text-anchor="end">1e%d</text>\n'
            % (ml - 6, y + 4, d)
        )
    out.write(
        '<text x="%d" y="%d" font-family="sans-serif" font-size="12" text-anchor="middle">%s</text>\n'
        % (ml + pw // 2, height - 12, escape(xlabel))
    )
    out.write(
        '<text x="16" y="%d" font-family="sans-serif" font-size="12" transform="rotate(-90 16 %d)">%s</text>\n'
        % (mt + ph // 2, mt + ph // 2, escape(ylabel))
    )
    for i, (label, sx, sy) in enumerate(series):
        color = _SVG_COLORS[i % len(_SVG_COLORS)]
        pts = [
            "%.2f,%.2f" % (px(x), py(y))
            for x, y in zip(sx, sy)
            if x > 0 and y > 0 and np.isfinite(x) and np.isfinite(y)
        ]
        if pts:
            out.write(
                '<polyline points="%s" fill="none" stroke="%s" stroke-width="1.5"/>\n'
                % (" ".join(pts), color)
            )
        ly = mt + 16 + 18 * i
        out.write(
            '<line x1="%d" y1="%d" x2="%d" y2="%d" stroke="%s" stroke-width="3"/>\n'
            % (ml + pw + 10, ly - 4, ml + pw + 34, ly - 4, color)
        )
        out.write(
            '<text x="%d" y="%d" font-family="sans-serif" font-size="11">%s</text>\n'
            % (ml + pw + 40, ly, escape(str(label)))
        )
    out.write("</svg>\n")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(out.getvalue())


# -- command implementations ------------------------------------------------------


def _effective(args, config_file, key, builtin):
    cli_val = getattr(args, key.replace("-", "_"), None)
    if cli_val is not None:
        return cli_val
    if key in config_file:
        return config_file[key]
    if key.replace("-", "_") in config_file:
        return config_file[key.replace("-", "_")]
    return builtin


def _load_config_file(args):
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            return json.load(fh)
    return {}


def _common_process(args, cfg):
    name = _effective(args, cfg, "process", "ggp")
    alpha = float(_effective(args, cfg, "alpha", 1.0))
    sigma = float(_effective(args, cfg, "sigma", 0.5))
    tau = float(_effective(args, cfg, "tau", 0.0))
    c = float(_effective(args, cfg, "c", 1.0))
    return build_process(name, alpha, sigma, tau, c)


def cmd_sample(args):
    cfg = _load_config_file(args)
    process = _common_process(args, cfg)
    kernel = parse_kernel_spec(_effective(args, cfg, "kernel", "exponential"))
    kind = _effective(args, cfg, "kind", "sequential")
    n = int(_effective(args, cfg, "n", 100))
    seed = int(_effective(args, cfg, "seed", env_seed()))
    fmt = _effective(args, cfg, "format", "csv")
    use_asym = bool(_effective(args, cfg, "use-asymptotic", False))
    rng = RngStream(seed)
    if kind == "sequential":
        crm = sample_sequential(process, kernel, n, rng)
    elif kind == "exchangeable":
        crm = sample_exchangeable(process, kernel, n, rng)
    elif kind == "iid":
        crm = sample_iid(process, kernel, n, rng, use_asymptotic=use_asym)
    elif kind == "rosinski":
        crm = sample_rosinski_ggp(process.alpha, process.sigma, process.tau, n, rng)
    else:
        raise ValueError("unknown construction kind %r" % kind)
    config = {
        "command": "sample",
        "process": process.to_dict(),
        "kernel": kernel.to_dict() if kernel is not None else None,
        "kind": kind,
        "n": n,
        "seed": seed,
        "use_asymptotic": use_asym,
        "t_next": crm.t_next,
    }
    if fmt == "json":
        payload = {"command": "sample", "config": config, "atoms": crm.to_dict()["atoms"]}
        write_json(args.out, payload)
    elif fmt == "svg":
        idx = np.arange(1, n + 1)
        write_svg(
            args.out, "sample", config, [("w", idx, np.sort(crm.w)[::-1])],
            "sorted atom sizes (%s)" % kind, "rank", "w",
        )
    else:
        rows = [
            (i + 1, float(crm.w[i]), float(crm.theta[i]),
             None if crm.t is None else float(crm.t[i]))
            for i in range(n)
        ]
        write_csv(args.out, "sample", config, ["index", "w", "theta", "t"], rows)
    return 0


def _report_rows(report):
    rows = []
    for i, n in enumerate(report.n_grid):
        a = report.asym[i]
        rows.append(
            (int(n), float(report.mc_mean[i]), float(report.mc_std[i]),
             None if not np.isfinite(a) else float(a))
        )
    return rows


def cmd_error_decay(args):
    cfg = _load_config_file(args)
    process = _common_process(args, cfg)
    kernel = parse_kernel_spec(_effective(args, cfg, "kernel", "gamma:1"))
    n_grid = parse_grid(_effective(args, cfg, "n-grid", "32,64,128,256,512"))
    n_hat = int(_effective(args, cfg, "n-hat", 10 * max(n_grid)))
    reps = parse_reps(_effective(args, cfg, "reps", "10x100"))
    seed = int(_effective(args, cfg, "seed", env_seed()))
    threads = int(_effective(args, cfg, "threads", 1))
    fmt = _effective(args, cfg, "format", "csv")
    rng = RngStream(seed)
    report = mc_truncation_error(
        process, kernel, n_grid, n_hat, reps[0], reps[1], rng, threads=threads
    )
    config = {
        "command": "error-decay",
        "process": process.to_dict(),
        "kernel": kernel.to_dict(),
        "n_grid": list(map(int, n_grid)),
        "n_hat": n_hat,
        "reps": "%dx%d" % reps,
        "seed": seed,
    }
    slope_full = fit_loglog_slope(report.n_grid, report.mc_mean, upper_half=False)
    summary = {
        "slope": report.slope_fit,
        "slope_full_grid": slope_full,
        "infinite_variance": report.infinite_variance,
    }
    if fmt == "json":
        payload = {"command": "error-decay", "config": config, "summary": summary,
                   "table": report.to_dict()}
        write_json(args.out, payload)
    elif fmt == "svg":
        series = [("mc mean", report.n_grid, report.mc_mean)]
        if np.isfinite(report.asym).all():
            series.append(("asymptotic", report.n_grid, report.asym))
        write_svg(args.out, "error-decay", config, series,
                  "truncation error decay", "n", "E[R_n]")
    else:
        write_csv(
            args.out, "error-decay", config, ["n", "mc_mean", "mc_std", "asym"],
            _report_rows(report),
            comments=["summary: %s" % _config_json(summary)],
        )
    if report.infinite_variance:
        print("warning: infinite-variance regime; std estimates will not stabilize",
              file=sys.stderr)
    return 0


def cmd_c1_table(args):
    cfg = _load_config_file(args)
    kernel_specs = [s.strip() for s in _effective(args, cfg, "kernels",
                    "deterministic,gamma:1,gamma:2,gamma:8").split(",")]
    sig_grid = parse_sigma_grid(_effective(args, cfg, "sigma-grid", "0.05:0.95:19"))
    fmt = _effective(args, cfg, "format", "csv")
    kernels = [parse_kernel_spec(s) for s in kernel_specs]
    table = []
    for s in sig_grid:
        row = [float(s)]
        for k in kernels:
            try:
                row.append(float(k.c1(float(s))))
            except (MellinStripError, ValueError):
                row.append(None)
        table.append(tuple(row))
    config = {"command": "c1-table", "kernels": kernel_specs,
              "sigma_grid": [float(s) for s in sig_grid]}
    header = ["sigma"] + kernel_specs
    if fmt == "json":
        payload = {
            "command": "c1-table", "config": config,
            "table": {"header": header, "rows": [list(r) for r in table]},
        }
        write_json(args.out, payload)
    elif fmt == "svg":
        series = []
        for j, spec in enumerate(kernel_specs):
            xs = [r[0] for r in table if r[j + 1] is not None]
            ys = [r[j + 1] for r in table if r[j + 1] is not None]
            series.append((spec, xs, ys))
        write_svg(args.out, "c1-table", config, series,
                  "asymptotic constant C1(sigma)", "sigma", "C1")
    else:
        write_csv(args.out, "c1-table", config, header, table)
    return 0


def cmd_compare_kernels(args):
    cfg = _load_config_file(args)
    process_name = _effective(args, cfg, "process", "stable")
    alpha = float(_effective(args, cfg, "alpha", 2.0))
    tau = float(_effective(args, cfg, "tau", 0.0))
    kappa = float(_effective(args, cfg, "kappa", 2.0))
    sigmas = parse_floats(_effective(args, cfg, "sigmas", "0.4,0.7"))
    n_grid = parse_grid(_effective(args, cfg, "n-grid", "64,128,256,512"))
    n_hat = int(_effective(args, cfg, "n-hat", 10 * max(n_grid)))
    reps = parse_reps(_effective(args, cfg, "reps", "10x50"))
    seed = int(_effective(args, cfg, "seed", env_seed()))
    threads = int(_effective(args, cfg, "threads", 1))
    fmt = _effective(args, cfg, "format", "csv")
    kernels = [ArrivalKernel.gamma(kappa), ArrivalKernel.inverse_gamma(kappa)]
    config = {
        "command": "compare-kernels", "process": process_name, "alpha": alpha, "tau": tau,
        "kappa": kappa, "sigmas": sigmas, "n_grid": n_grid, "n_hat": n_hat,
        "reps": "%dx%d" % reps, "seed": seed,
    }
    rows = []
    c1_rows = []
    failures = []
    series = []
    for si, sig in enumerate(sigmas):
        process = build_process(process_name, alpha, sig, tau, 1.0)
        for ki, kern in enumerate(kernels):
            try:
                c1_val = float(kern.c1(sig))
            except (MellinStripError, ValueError):
                c1_val = None
            c1_rows.append((float(sig), kern.label(), c1_val))
            try:
                rep = mc_truncation_error(
                    process, kern, n_grid, n_hat, reps[0], reps[1],
                    RngStream(seed, stream_id=100 * si + ki), threads=threads,
                )
            except Exception as exc:  # keep completed artifacts, report at exit
                failures.append("%s sigma=%g: %s" % (kern.label(), sig, exc))
                continue
            for i, n in enumerate(rep.n_grid):
                a = rep.asym[i]
                rows.append(
                    (float(sig), kern.label(), int(n), float(rep.mc_mean[i]),
                     float(rep.mc_std[i]), None if not np.isfinite(a) else float(a))
                )
            series.append(
                ("%s s=%g" % (kern.label(), sig), rep.n_grid, rep.mc_mean)
            )
    if fmt == "json":
        payload = {
            "command": "compare-kernels", "config": config,
            "c1": [{"sigma": r[0], "kernel": r[1], "c1": r[2]} for r in c1_rows],
            "table": {
                "header": ["sigma", "kernel", "n", "mc_mean", "mc_std", "asym"],
                "rows": [list(r) for r in rows],
            },
            "failures": failures,
        }
        write_json(args.out, payload)
    elif fmt == "svg":
        write_svg(args.out, "compare-kernels", config, series,
                  "gamma vs inverse-gamma arrival error", "n", "E[R_n]")
    else:
        write_csv(
            args.out, "compare-kernels", config,
            ["sigma", "kernel", "n", "mc_mean", "mc_std", "asym"], rows,
            comments=["c1: %s" % json.dumps(c1_rows)] + (
                ["failures: %s" % json.dumps(failures)] if failures else []),
        )
    if failures:
        print("\n".join(failures), file=sys.stderr)
        return 1
    return 0


def cmd_mgf_check(args):
    cfg = _load_config_file(args)
    process = _common_process(args, cfg)
    kernel = parse_kernel_spec(_effective(args, cfg, "kernel", "gamma:1"))
    lams = parse_floats(_effective(args, cfg, "lambdas", "0.1,1,10"))
    n = int(_effective(args, cfg, "n", 50))
    draws = int(_effective(args, cfg, "draws", 2000))
    n_hat = int(_effective(args, cfg, "n-hat", 20000))
    seed = int(_effective(args, cfg, "seed", env_seed()))
    fmt = _effective(args, cfg, "format", "csv")
    rng = RngStream(seed)
    strict, from_next = mc_residual_masses(process, kernel, n, n_hat, draws, rng)
    rows = []
    for lam in lams:
        quad_val = float(error_mgf(process, kernel, lam, n))
        quad_atom = float(error_mgf(process, kernel, lam, n, include_boundary_atom=True))
        vals = np.exp(-lam * strict)
        rows.append(
            (float(lam), quad_val, quad_atom, float(vals.mean()),
             float(vals.std(ddof=1) / math.sqrt(draws)))
        )
    config = {
        "command": "mgf-check", "process": process.to_dict(), "kernel": kernel.to_dict(),
        "lambdas": lams, "n": n, "draws": draws, "n_hat": n_hat, "seed": seed,
    }
    header = ["lambda", "mgf_quad", "mgf_quad_with_atom", "mgf_mc", "mc_se"]
    if fmt == "json":
        write_json(args.out, {"command": "mgf-check", "config": config,
                              "table": {"header": header, "rows": [list(r) for r in rows]}})
    elif fmt == "svg":
        write_svg(args.out, "mgf-check", config,
                  [("quadrature", [r[0] for r in rows], [r[1] for r in rows]),
                   ("monte carlo", [r[0] for r in rows], [r[3] for r in rows])],
                  "residual-mass Laplace transform", "lambda", "E[exp(-lam R)]")
    else:
        write_csv(args.out, "mgf-check", config, header, rows)
    return 0


def cmd_bound_check(args):
    cfg = _load_config_file(args)
    process = _common_process(args, cfg)
    kernel = parse_kernel_spec(_effective(args, cfg, "kernel", "exponential"))
    m = int(_effective(args, cfg, "m", 5))
    n_grid = parse_grid(_effective(args, cfg, "n-grid", "25,50,100,200"))
    fmt = _effective(args, cfg, "format", "csv")
    pi_name = _effective(args, cfg, "pi", "exp")
    if pi_name != "exp":
        raise ValueError("only the built-in pi(w)=exp(-w) map is available")
    pi = lambda w: math.exp(-w)
    rows = []
    for n in n_grid:
        rows.append(
            (int(n), float(likelihood_bound(process, kernel, m, n, pi)),
             float(likelihood_bound(process, kernel, m, n, pi, statement_form=True)))
        )
    config = {
        "command": "bound-check", "process": process.to_dict(), "kernel": kernel.to_dict(),
        "m": m, "n_grid": n_grid, "pi": pi_name,
    }
    header = ["n", "bound", "bound_statement_form"]
    if fmt == "json":
        write_json(args.out, {"command": "bound-check", "config": config,
                              "table": {"header": header, "rows": [list(r) for r in rows]}})
    elif fmt == "svg":
        write_svg(args.out, "bound-check", config,
                  [("bound", [r[0] for r in rows], [r[1] for r in rows])],
                  "marginal-likelihood error bound", "n", "bound")
    else:
        write_csv(args.out, "bound-check", config, header, rows)
    return 0


def cmd_mixture_demo(args):
    cfg = _load_config_file(args)
    alpha = float(_effective(args, cfg, "alpha", 1.0))
    sigma = float(_effective(args, cfg, "sigma", 0.5))
    tau = float(_effective(args, cfg, "tau", 1.0))
    kappa = float(_effective(args, cfg, "kappa", 2.0))
    n = int(_effective(args, cfg, "n", 100))
    m = int(_effective(args, cfg, "m", 50))
    seed = int(_effective(args, cfg, "seed", env_seed()))
    fmt = _effective(args, cfg, "format", "json")
    rng = RngStream(seed)
    demo = mixture_prior_demo(alpha, sigma, tau, kappa, n, m, rng)
    config = {"command": "mixture-demo", "alpha": alpha, "sigma": sigma, "tau": tau,
              "kappa": kappa, "n": n, "m": m, "seed": seed}
    if fmt == "csv":
        counts = np.bincount(demo.assignments, minlength=n)
        rows = [
            (k + 1, float(demo.weights[k]), float(demo.thetas[k]), int(counts[k]))
            for k in range(n)
        ]
        write_csv(args.out, "mixture-demo", config, ["component", "w", "theta", "count"],
                  rows, comments=["joint_log_density: %r" % demo.joint_log_density])
    else:
        write_json(args.out, {
            "command": "mixture-demo", "config": config,
            "weights": demo.weights.tolist(),
            "thetas": demo.thetas.tolist(),
            "assignments": demo.assignments.tolist(),
            "observations": demo.observations.tolist(),
            "joint_log_density": demo.joint_log_density,
        })
    return 0


# -- parser ------------------------------------------------------------------------


def _add_common(p, with_kernel=True):
    p.add_argument("--config", help="JSON config file; explicit flags override it")
    p.add_argument("--process", choices=_PROCESS_NAMES)
    p.add_argument("--alpha", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--c", type=float)
    if with_kernel:
        p.add_argument("--kernel", help="deterministic|exponential|gamma:K|inverse-gamma:K|pareto:C")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True, help="output artifact path")
    p.add_argument("--format", choices=("csv", "json", "svg"))


def build_parser():
    parser = argparse.ArgumentParser(
        prog="crmsim",
        description="simulate completely random measures and quantify truncation error",
    )
    parser.add_argument("--version", action="version", version="crmsim %s" % __version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw one truncated measure")
    _add_common(p)
    p.add_argument("--kind", choices=("sequential", "exchangeable", "iid", "rosinski"))
    p.add_argument("--n", type=int)
    p.add_argument("--use-asymptotic", action="store_true", default=None)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("error-decay", help="Monte Carlo truncation-error decay table")
    _add_common(p)
    p.add_argument("--n-grid")
    p.add_argument("--n-hat", type=int)
    p.add_argument("--reps", help="AxB: A arrival sequences x B jump resamples")
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_error_decay)

    p = sub.add_parser("c1-table", help="asymptotic constants over a sigma grid")
    p.add_argument("--config")
    p.add_argument("--kernels", help="comma-separated kernel specs")
    p.add_argument("--sigma-grid", help="lo:hi:count")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "json", "svg"))
    p.set_defaults(func=cmd_c1_table)

    p = sub.add_parser("compare-kernels", help="gamma vs inverse-gamma error curves")
    p.add_argument("--config")
    p.add_argument("--process", choices=_PROCESS_NAMES)
    p.add_argument("--alpha", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--sigmas", help="comma-separated sigma values")
    p.add_argument("--n-grid")
    p.add_argument("--n-hat", type=int)
    p.add_argument("--reps")
    p.add_argument("--threads", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "json", "svg"))
    p.set_defaults(func=cmd_compare_kernels)

    p = sub.add_parser("mgf-check", help="quadrature vs Monte Carlo Laplace transform")
    _add_common(p)
    p.add_argument("--lambdas")
    p.add_argument("--n", type=int)
    p.add_argument("--draws", type=int)
    p.add_argument("--n-hat", type=int)
    p.set_defaults(func=cmd_mgf_check)

    p = sub.add_parser("bound-check", help="marginal-likelihood truncation bound over n")
    _add_common(p)
    p.add_argument("--m", type=int)
    p.add_argument("--n-grid")
    p.add_argument("--pi", choices=("exp",))
    p.set_defaults(func=cmd_bound_check)

    p = sub.add_parser("mixture-demo", help="finite normalized-mixture prior draw")
    p.add_argument("--config")
    p.add_argument("--alpha", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "json", "svg"))
    p.set_defaults(func=cmd_mixture_demo)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, MellinStripError, OSError) as exc:
        print("crmsim: error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
