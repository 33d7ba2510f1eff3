"""Command line driver: one JSON config in, CSV and JSON artifacts out.

Every subcommand takes --config (a path, or the name of a built-in
fixture), computes in memory, and only then writes files, so a failed
stage leaves no partial output.  Stage failures surface as tagged
errors ("[scan] ...", "[reduce] ...") with exit code 3; malformed
configs exit with 2.  All floats are written with full round-trip
precision and JSON keys are sorted, so identical inputs produce
byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from contextlib import contextmanager

__all__ = [
    "CSV_HEADER",
    "StageError",
    "emit_csv",
    "main",
    "run_theorem_a",
    "run_theorem_b",
]

CSV_HEADER = "n,method,corr_re,corr_im,scaled_re,residual_thmB"

SCHEMA_VERSION = 1


class StageError(RuntimeError):
    """A pipeline stage failed; carries the stage name for diagnostics."""

    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(f"[{stage}] {message}")


@contextmanager
def _stage(name: str):
    try:
        yield
    except StageError:
        raise
    except Exception as e:
        raise StageError(name, str(e)) from e


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _pair(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _finite_or_none(x):
    x = float(x)
    return x if math.isfinite(x) else None


def _write_json(path: str, doc: dict):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def emit_csv(series, path: str, coefficients=None):
    """Write a correlation series in the fixed six-column schema.

    The scaled column is 2·sqrt(pi·omega·n)·corr_re with omega taken
    from the series metadata.  The residual column is |corr - law| with
    the supplied half-power law coefficients {j: c_j}, or empty when no
    law is given.  17 significant digits per float, '\\n' line endings.
    """
    omega = series.metadata.get("omega")
    if omega is None:
        raise ValueError("series metadata must carry omega")
    lines = [CSV_HEADER]
    for n, z in zip(series.n_values, series.values):
        scaled = 2.0 * math.sqrt(math.pi * float(omega) * n) * z.real
        if coefficients and n > 0:
            law = sum(c * n ** (-0.5 * j) for j, c in coefficients.items())
            res = _fmt(abs(z - law))
        else:
            res = ""
        lines.append(
            f"{n},{series.method},{_fmt(z.real)},{_fmt(z.imag)},{_fmt(scaled)},{res}"
        )
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _loglog_slope(ns, values):
    """Least-squares slope of log|value| against log n, ignoring zeros."""
    import numpy as np

    pts = [(n, v) for n, v in zip(ns, values) if n > 0 and v > 0]
    if len(pts) < 2:
        return float("-inf")
    xs = np.log([p[0] for p in pts])
    ys = np.log([p[1] for p in pts])
    return float(np.polyfit(xs, ys, 1)[0])


def _scan_block(report):
    if report is None:
        return None
    return {
        "kappa": report.kappa,
        "xi_max": report.xi_max,
        "grid_points": report.grid_points,
        "max_radius": report.max_radius,
        "argmax_xi": report.argmax_xi,
        "threshold": report.threshold,
        "passed": report.passed,
    }


def _expansion_doc(config, engine, cdict, k) -> dict:
    gibbs = engine.gibbs
    nu_r = config.r.nu_integral(gibbs)
    nu_s = config.s.nu_integral(gibbs)
    closed = nu_r * nu_s.conjugate() / (2.0 * math.sqrt(math.pi * engine.omega))
    return {
        "schema_version": SCHEMA_VERSION,
        "fixture": config.name,
        "k": k,
        "omega": engine.omega,
        "kappa": engine.kappa,
        "coefficients": {str(j): _pair(c) for j, c in cdict.items()},
        "c1_closed_form": _pair(closed),
    }


def run_theorem_b(config, out_dir=None, k=None) -> dict:
    """Scan, correlate, expand, and report on one experiment config.

    Writes correlations.csv, expansion.json, and report.json into the
    output directory and returns the report.  Every stage runs before
    the first write, so a strict-policy scan failure produces no
    correlation output at all.
    """
    from .correlations import CorrelationEngine, ScanFailedError, krickeberg_check

    out_dir = config.output_dir if out_dir is None else out_dir
    k = config.expansion_order if k is None else int(k)
    if config.f.past:
        raise StageError(
            "setup",
            "the skew function is two-sided; use the reduction pipeline",
        )
    gibbs = config.gibbs()
    try:
        engine = CorrelationEngine(
            gibbs, config.f, config.r, config.s, config.quad,
            kappa=config.kappa_override(),
        )
    except ScanFailedError as e:
        raise StageError("scan", str(e)) from e
    except Exception as e:
        raise StageError("setup", str(e)) from e
    with _stage("correlate"):
        series = engine.series(config.n_list)
    with _stage("expand"):
        coeffs = engine.expansion(k)
    cdict = {2 * j + 1: coeffs[j] for j in range(len(coeffs))}
    law = {j: cdict[j] for j in (1, 3) if j in cdict}
    with _stage("report"):
        krick = krickeberg_check(series, gibbs, config.r, config.s)
        residuals = [
            abs(z - sum(c * n ** (-0.5 * j) for j, c in law.items()))
            for n, z in zip(series.n_values, series.values)
            if n > 0
        ]
        resid_slope = _loglog_slope([n for n in series.n_values if n > 0], residuals)
    report = {
        "schema_version": SCHEMA_VERSION,
        "fixture": config.name,
        "k": k,
        "n_list": list(config.n_list),
        "omega": engine.omega,
        "kappa": engine.kappa,
        "scan": _scan_block(engine.scan),
        "coefficients": {str(j): _pair(c) for j, c in cdict.items()},
        "krickeberg": {
            "limit": _pair(krick.limit),
            "scaled": [_pair(z) for z in krick.scaled],
            "slope": _finite_or_none(krick.slope),
            "passed": krick.passed,
        },
        "residual_thmB_slope": _finite_or_none(resid_slope),
        "quadrature_nodes": [int(m) for m in series.metadata["nodes"]],
    }
    with _stage("write"):
        os.makedirs(out_dir, exist_ok=True)
        emit_csv(series, os.path.join(out_dir, "correlations.csv"), coefficients=law)
        _write_json(
            os.path.join(out_dir, "expansion.json"),
            _expansion_doc(config, engine, cdict, k),
        )
        _write_json(os.path.join(out_dir, "report.json"), report)
    return report


def _reduce_config(config):
    """Split the cocycle and push the conjugated observables to one-sided
    form.

    Returns (reduced config, reduction block).  The fiber conjugation
    s(x, t - h(x)) intertwines the two skew products, and composing both
    observables with the reduced dynamics P more times removes the past
    dependence h drags in; by invariance of the measure neither step
    changes any correlation value.
    """
    import numpy as np
    from dataclasses import replace
    from .cohomology import AnchorChoice, conjugate_observable, reduce_cocycle
    from .observables import WindowFunction

    spec = config.spec
    f = config.f
    if f.past == 0:
        block = {
            "trivial": True,
            "cohomology_residual": 0.0,
            "h": {"past": 0, "future": 0, "values": [0.0] * spec.alphabet_size},
            "f_tilde": {
                "depth": f.future,
                "values": [float(v.real) for v in np.asarray(f.values)],
            },
            "advance": 0,
        }
        return config, block
    with _stage("reduce"):
        anchor = AnchorChoice(spec)
        ftilde, h = reduce_cocycle(f, anchor)
        fw = WindowFunction.from_cylinder(ftilde)
        diff = f - fw - h + h.shift_observe(1)
        residual = float(np.abs(np.asarray(diff.values)).max())
        if residual > 1e-12:
            raise RuntimeError(f"cohomology identity fails by {residual:.3g}")
    with _stage("conjugate"):
        rt = conjugate_observable(config.r, h)
        st = conjugate_observable(config.s, h)
        advance = max(rt.past_depth, st.past_depth)
        if advance:
            rt = rt.compose_skew(fw, advance)
            st = st.compose_skew(fw, advance)
        if not (rt.is_future_only and st.is_future_only):
            raise StageError("conjugate", "observables kept a past dependence")
    block = {
        "trivial": False,
        "cohomology_residual": residual,
        "h": {
            "past": int(h.past),
            "future": int(h.future),
            "values": [float(v.real) for v in np.asarray(h.values)],
        },
        "f_tilde": {
            "depth": int(ftilde.depth),
            "values": [float(v.real) for v in np.asarray(ftilde.values)],
        },
        "advance": int(advance),
    }
    return replace(config, f=fw, r=rt, s=st), block


def _drift_of(gibbs, f):
    from .twisted import drift_green_kubo

    if f.past:
        f = f.shift_observe(f.past)
    return drift_green_kubo(gibbs, f.to_cylinder())


def run_theorem_a(config, out_dir=None, k=None) -> dict:
    """Reduce the cocycle, conjugate the observables, then run the
    one-sided pipeline on the reduced data.

    A future-only config passes through untouched (h = 0), so its
    outputs coincide with the plain pipeline's.  Writes the same three
    artifacts plus reduction.json, and returns {"report", "reduction"}.
    """
    from .oracle import oracle_correlation

    out_dir = config.output_dir if out_dir is None else out_dir
    gibbs = config.gibbs()
    reduced, block = _reduce_config(config)
    with _stage("verify"):
        omega_f = _drift_of(gibbs, config.f)
        omega_ftilde = _drift_of(gibbs, reduced.f)
        block["omega_f"] = omega_f
        block["omega_f_tilde"] = omega_ftilde
        block["omega_abs_diff"] = abs(omega_f - omega_ftilde)
        if block["trivial"]:
            block["conjugation"] = None
        else:
            ftilde = reduced.f.to_cylinder()
            worst = 0.0
            ns = [1, 2, 3, 4]
            for n in ns:
                left = oracle_correlation(
                    gibbs, config.f, config.r, config.s, n, config.budget
                )
                right = oracle_correlation(
                    gibbs, ftilde, reduced.r, reduced.s, n, config.budget
                )
                worst = max(worst, abs(left - right))
            block["conjugation"] = {"n_values": ns, "max_abs_error": worst}
    report = run_theorem_b(reduced, out_dir=out_dir, k=k)
    reduction = {
        "schema_version": SCHEMA_VERSION,
        "fixture": config.name,
        **block,
    }
    with _stage("write"):
        _write_json(os.path.join(out_dir, "reduction.json"), reduction)
    return {"report": report, "reduction": reduction}


# ---------------------------------------------------------------------------
# subcommands


def _load_config(args):
    from .config import FIXTURES, fixture_config, load_config, parse_config

    if args.config in FIXTURES:
        cfg = parse_config(fixture_config(args.config))
    else:
        cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    return cfg


def _out_dir(args, cfg) -> str:
    out = args.out if args.out is not None else cfg.output_dir
    os.makedirs(out, exist_ok=True)
    return out


def _family(cfg, gibbs):
    from .twisted import TwistedFamily

    f = cfg.f
    if f.past:
        f = f.shift_observe(f.past)
    return TwistedFamily(gibbs, f.to_cylinder())


def _engine(cfg):
    from .correlations import CorrelationEngine, ScanFailedError

    try:
        return CorrelationEngine(
            cfg.gibbs(), cfg.f, cfg.r, cfg.s, cfg.quad, kappa=cfg.kappa_override()
        )
    except ScanFailedError as e:
        raise StageError("scan", str(e)) from e


def cmd_gibbs(args):
    cfg = _load_config(args)
    out = _out_dir(args, cfg)
    gibbs = cfg.gibbs()
    depth = max(gibbs.depth, 1)
    words = cfg.spec.words(depth)
    masses = gibbs.measure_vector(depth)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "fixture": cfg.name,
        "depth": depth,
        "words": ["".join(map(str, w)) for w in words],
        "masses": [float(m) for m in masses],
        "mass_sum": float(sum(masses)),
    }
    _write_json(os.path.join(out, "gibbs.json"), doc)
    print(f"gibbs: {len(words)} cylinders at depth {depth}, "
          f"mass sum {doc['mass_sum']:.12f}")


def cmd_spectrum(args):
    cfg = _load_config(args)
    out = _out_dir(args, cfg)
    gibbs = cfg.gibbs()
    if args.grid_points:
        _spectrum_grid(cfg, gibbs, out, args.grid_points)
        return
    with _stage("spectrum"):
        family = _family(cfg, gibbs)
        data = family.leading(args.xi)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "fixture": cfg.name,
        "xi": float(args.xi),
        "lam": _pair(data.lam),
        "modulus": abs(data.lam),
        "subleading_radius": float(data.subleading_radius),
        "right": [_pair(v) for v in data.right],
        "left": [_pair(v) for v in data.left],
        "aliased_past": int(cfg.f.past),
    }
    _write_json(os.path.join(out, "spectrum.json"), doc)
    print(f"spectrum: lam({args.xi}) = {data.lam:.12g}, "
          f"subleading radius {data.subleading_radius:.6g}")


def _spectrum_grid(cfg, gibbs, out, points):
    """Eigenvalue curve samples on a log grid [kappa/32, kappa], as CSV."""
    import numpy as np

    if points < 2:
        raise StageError("spectrum", "grid needs at least 2 points")
    with _stage("spectrum"):
        from .twisted import select_kappa

        family = _family(cfg, gibbs)
        omega = _drift_of(gibbs, cfg.f)
        kappa = cfg.kappa_override()
        if kappa is None:
            kappa = select_kappa(family, omega)
        xis = np.geomspace(kappa / 32.0, kappa, points)
        lams = [family.leading(x).lam for x in xis]
    lines = ["xi,lam_re,lam_im"]
    for x, lam in zip(xis, lams):
        lines.append(f"{_fmt(float(x))},{_fmt(lam.real)},{_fmt(lam.imag)}")
    with open(os.path.join(out, "spectrum.csv"), "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    doc = {
        "schema_version": SCHEMA_VERSION,
        "fixture": cfg.name,
        "omega": float(omega),
        "kappa": float(kappa),
        "grid": {
            "min": float(xis[0]),
            "max": float(xis[-1]),
            "points": int(points),
            "spacing": "log",
        },
    }
    _write_json(os.path.join(out, "spectrum.json"), doc)
    print(f"spectrum: {points} curve samples on [{xis[0]:.6g}, {xis[-1]:.6g}], "
          f"omega = {omega:.12g}")


def cmd_scan(args):
    cfg = _load_config(args)
    out = _out_dir(args, cfg)
    gibbs = cfg.gibbs()
    with _stage("scan"):
        from .twisted import aperiodicity_scan, select_kappa

        family = _family(cfg, gibbs)
        kappa = cfg.kappa_override()
        if kappa is None:
            omega = _drift_of(gibbs, cfg.f)
            kappa = select_kappa(family, omega)
        f = cfg.f.shift_observe(cfg.f.past) if cfg.f.past else cfg.f
        report = aperiodicity_scan(
            gibbs,
            f.to_cylinder(),
            kappa,
            xi_max=cfg.quad.xi_max,
            grid_points=cfg.quad.scan_points,
            threshold=cfg.quad.scan_threshold,
        )
        import numpy as np

        # same grid the verdict came from, so the profile reproduces it
        xis = np.linspace(report.kappa, report.xi_max, report.grid_points)
        radii = family.spectral_radius_profile(xis)
    doc = {"schema_version": SCHEMA_VERSION, "fixture": cfg.name}
    doc.update(_scan_block(report))
    _write_json(os.path.join(out, "scan.json"), doc)
    lines = ["xi,radius"]
    for x, rad in zip(xis, radii):
        lines.append(f"{_fmt(float(x))},{_fmt(float(rad))}")
    with open(os.path.join(out, "scan.csv"), "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    verdict = "PASSED" if report.passed else "FAILED"
    print(f"scan {verdict}: max radius {report.max_radius:.9g} "
          f"at xi = {report.argmax_xi:.6g} (threshold {report.threshold:.9g})")


def cmd_expand(args):
    cfg = _load_config(args)
    out = _out_dir(args, cfg)
    k = cfg.expansion_order if args.k is None else args.k
    engine = _engine(cfg)
    with _stage("expand"):
        coeffs = engine.expansion(k)
    cdict = {2 * j + 1: coeffs[j] for j in range(len(coeffs))}
    _write_json(
        os.path.join(out, "expansion.json"), _expansion_doc(cfg, engine, cdict, k)
    )
    shown = ", ".join(f"c{j} = {c:.9g}" for j, c in cdict.items())
    print(f"expand: {shown}")


def _parse_n_list(text: str):
    try:
        ns = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise StageError("config", f"bad n-list {text!r}") from None
    if not ns or any(b <= a for a, b in zip(ns, ns[1:])) or ns[0] < 0:
        raise StageError(
            "config", "n-list must be nonempty, nonnegative, strictly increasing"
        )
    return ns


def cmd_correlate(args):
    from .correlations import CorrelationSeries
    from .oracle import mc_correlation, oracle_correlation

    cfg = _load_config(args)
    out = _out_dir(args, cfg)
    ns = list(cfg.n_list) if args.n_list is None else _parse_n_list(args.n_list)
    law = None
    if args.method == "spectral":
        engine = _engine(cfg)
        with _stage("correlate"):
            series = engine.series(ns)
        with _stage("expand"):
            coeffs = engine.expansion(2)
        law = {1: coeffs[0], 3: coeffs[1]}
    else:
        gibbs = cfg.gibbs()
        omega = _drift_of(gibbs, cfg.f)
        with _stage("correlate"):
            if args.method == "oracle":
                vals = [
                    oracle_correlation(gibbs, cfg.f, cfg.r, cfg.s, n, cfg.budget)
                    for n in ns
                ]
                series = CorrelationSeries(ns, vals, "oracle", {"omega": omega})
            else:
                pairs = [
                    mc_correlation(gibbs, cfg.f, cfg.r, cfg.s, n, cfg.budget)
                    for n in ns
                ]
                series = CorrelationSeries(
                    ns,
                    [p[0] for p in pairs],
                    "monte_carlo",
                    {"omega": omega, "stderr": tuple(p[1] for p in pairs)},
                )
    path = os.path.join(out, "correlations.csv")
    with _stage("write"):
        emit_csv(series, path, coefficients=law)
    print(f"correlate: wrote {len(ns)} rows ({args.method}) to {path}")


def cmd_oracle(args):
    from .oracle import mc_correlation, oracle_correlation

    cfg = _load_config(args)
    out = _out_dir(args, cfg)
    gibbs = cfg.gibbs()
    with _stage("oracle"):
        value = oracle_correlation(gibbs, cfg.f, cfg.r, cfg.s, args.n, cfg.budget)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "fixture": cfg.name,
        "n": args.n,
        "value": _pair(value),
        "mc": None,
        "budget": {
            "max_words": cfg.budget.max_words,
            "rng_seed": cfg.budget.rng_seed,
            "mc_samples": cfg.budget.mc_samples,
        },
    }
    print(f"oracle: corr({args.n}) = {value:.15g}")
    if args.mc:
        with _stage("oracle"):
            est, err = mc_correlation(gibbs, cfg.f, cfg.r, cfg.s, args.n, cfg.budget)
        doc["mc"] = {"estimate": _pair(est), "stderr": float(err)}
        print(f"oracle: monte carlo {est:.10g} (stderr {err:.3g})")
    _write_json(os.path.join(out, "oracle.json"), doc)


def cmd_reduce(args):
    cfg = _load_config(args)
    out = _out_dir(args, cfg)
    gibbs = cfg.gibbs()
    reduced, block = _reduce_config(cfg)
    block["omega_f"] = _drift_of(gibbs, cfg.f)
    block["omega_f_tilde"] = _drift_of(gibbs, reduced.f)
    block["omega_abs_diff"] = abs(block["omega_f"] - block["omega_f_tilde"])
    block["conjugation"] = None
    doc = {"schema_version": SCHEMA_VERSION, "fixture": cfg.name, **block}
    _write_json(os.path.join(out, "reduction.json"), doc)
    print(f"reduce: residual {block['cohomology_residual']:.3g}, "
          f"past depth {cfg.f.past} -> 0")


def cmd_verify_reduction(args):
    from .oracle import oracle_correlation

    cfg = _load_config(args)
    out = _out_dir(args, cfg)
    gibbs = cfg.gibbs()
    reduced, block = _reduce_config(cfg)
    checks = []

    def add(name, value, tol):
        checks.append(
            {"name": name, "value": value, "tolerance": tol, "passed": value <= tol}
        )

    add("cohomology_identity", block["cohomology_residual"], 1e-12)
    with _stage("verify"):
        omega_f = _drift_of(gibbs, cfg.f)
        omega_ftilde = _drift_of(gibbs, reduced.f)
        add("drift_match", abs(omega_f - omega_ftilde), 1e-8)
        worst = 0.0
        ftilde = reduced.f.to_cylinder()
        for n in (1, 2, 3, 4):
            left = oracle_correlation(gibbs, cfg.f, cfg.r, cfg.s, n, cfg.budget)
            right = oracle_correlation(
                gibbs, ftilde, reduced.r, reduced.s, n, cfg.budget
            )
            worst = max(worst, abs(left - right))
        add("conjugation_invariance", worst, 1e-8)
    passed = all(c["passed"] for c in checks)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "fixture": cfg.name,
        "checks": checks,
        "passed": passed,
    }
    _write_json(os.path.join(out, "verify_reduction.json"), doc)
    for c in checks:
        mark = "ok" if c["passed"] else "FAIL"
        print(f"verify-reduction: {c['name']} = {c['value']:.3g} "
              f"(tol {c['tolerance']:.1g}) {mark}")
    return 0 if passed else 1


def cmd_thm_b(args):
    cfg = _load_config(args)
    out = _out_dir(args, cfg)
    report = run_theorem_b(cfg, out_dir=out, k=args.k)
    krick = report["krickeberg"]
    print(f"thm-b: limit {krick['limit'][0]:.9g}, "
          f"krickeberg slope {krick['slope']}, "
          f"residual slope {report['residual_thmB_slope']}")
    print(f"thm-b: artifacts in {out}")


def cmd_thm_a(args):
    cfg = _load_config(args)
    out = _out_dir(args, cfg)
    result = run_theorem_a(cfg, out_dir=out, k=args.k)
    red = result["reduction"]
    print(f"thm-a: reduction residual {red['cohomology_residual']:.3g}, "
          f"drift gap {red['omega_abs_diff']:.3g}")
    krick = result["report"]["krickeberg"]
    print(f"thm-a: limit {krick['limit'][0]:.9g}, "
          f"krickeberg slope {krick['slope']}")
    print(f"thm-a: artifacts in {out}")


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="skewmix",
        description="Transfer-operator correlation toolkit for skew products",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        required=True,
        help="path to an experiment JSON, or a fixture name (R1, R2, R1-two-sided)",
    )
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--threads", type=int, default=None,
                        help="cap the BLAS thread pools (advisory; the "
                             "pipelines are effectively single-threaded)")
    common.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    sub = ap.add_subparsers(dest="command", required=True)

    def cmd(name, handler, helptext):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.set_defaults(handler=handler)
        return p

    cmd("gibbs", cmd_gibbs, "cylinder masses of the invariant measure")
    p = cmd("spectrum", cmd_spectrum, "leading twisted eigendata at one frequency")
    p.add_argument("--xi", type=float, default=0.0)
    p.add_argument(
        "--grid-points",
        type=int,
        default=0,
        help="sample the eigenvalue curve on a log grid [kappa/32, kappa] "
        "and write spectrum.csv instead (ignores --xi)",
    )
    cmd("scan", cmd_scan, "sweep the spectral radius over [kappa, xi_max]")
    p = cmd("expand", cmd_expand, "half-power decay coefficients")
    p.add_argument("--k", type=int, default=None)
    p = cmd("correlate", cmd_correlate, "correlation series to CSV")
    p.add_argument("--n-list", default=None, help="comma-separated n values")
    p.add_argument("--method", choices=("spectral", "oracle", "mc"),
                   default="spectral")
    p = cmd("oracle", cmd_oracle, "exact finite-word correlation value")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mc", action="store_true",
                   help="also run the Monte Carlo estimator")
    cmd("reduce", cmd_reduce, "split a two-sided cocycle into one-sided form")
    cmd("verify-reduction", cmd_verify_reduction,
        "check the reduction identities against the oracle")
    p = cmd("thm-b", cmd_thm_b, "full decay pipeline on a one-sided config")
    p.add_argument("--k", type=int, default=None)
    p = cmd("thm-a", cmd_thm_a, "reduction pipeline, then the decay pipeline")
    p.add_argument("--k", type=int, default=None)
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    threads = getattr(args, "threads", None)
    if threads is not None:
        if threads < 1:
            print("error [config] --threads must be positive", file=sys.stderr)
            return 2
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(threads)
    from .config import ConfigError

    try:
        rc = args.handler(args)
    except ConfigError as e:
        print(f"error [config] {e}", file=sys.stderr)
        return 2
    except StageError as e:
        print(f"error {e}", file=sys.stderr)
        return 3
    return 0 if rc is None else int(rc)


if __name__ == "__main__":
    sys.exit(main())
