"""Experiment configuration: JSON schema, round-tripping, reference fixtures.

A single JSON document pins down everything a run needs: the subshift,
the potential, the skew function, both observables, the n-grid, and the
numerical policies.  Parsing is strict (unknown keys are rejected, the
n-grid must be nonempty and strictly increasing) and serialization emits
full-precision floats, so parse -> serialize -> parse is the identity.

Complex scalars travel as either a plain number or a two-element
[re, im] list.  Fibers may be given as "gaussian" or "hermite"
shorthands or in the raw "gausspoly" form p(t)·exp(a t² + b t + c);
serialization always writes the raw form.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .correlations import QuadratureSpec
from .gibbs import GibbsMeasure
from .observables import GaussPoly, SkewObservable, WindowFunction
from .oracle import OracleBudget
from .sft import CylinderFunction, SubshiftSpec

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "FIXTURES",
    "SCHEMA_VERSION",
    "config_to_json",
    "fixture_config",
    "load_config",
    "parse_config",
    "serialize_config",
]

SCHEMA_VERSION = 1

_TOP_KEYS = {
    "schema_version",
    "name",
    "subshift",
    "potential",
    "f",
    "r",
    "s",
    "n_list",
    "quadrature",
    "kappa",
    "oracle",
    "output",
    "seed",
    "expansion_order",
}

_QUAD_KEYS = {
    "xi_max",
    "abs_tol",
    "max_refine",
    "coarse_width",
    "scan_policy",
    "scan_points",
    "scan_threshold",
    "peak_threshold",
    "max_peaks",
}


class ConfigError(ValueError):
    """A configuration document failed schema validation."""


def _fail(path: str, msg: str):
    raise ConfigError(f"{path}: {msg}")


def _expect_keys(d: dict, allowed: set, path: str):
    if not isinstance(d, dict):
        _fail(path, "expected an object")
    extra = set(d) - allowed
    if extra:
        _fail(path, f"unknown keys {sorted(extra)}")


def _real_in(x, path: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        _fail(path, "expected a real number")
    return float(x)


def _complex_in(x, path: str) -> complex:
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if isinstance(x, list) and len(x) == 2:
        return complex(_real_in(x[0], path), _real_in(x[1], path))
    _fail(path, "expected a number or an [re, im] pair")


def _num_out(z) -> float | list:
    z = complex(z)
    if z.imag == 0.0:
        return float(z.real)
    return [float(z.real), float(z.imag)]


def _window_in(spec: SubshiftSpec, d, path: str, real: bool) -> WindowFunction:
    _expect_keys(d, {"past", "future", "values"}, path)
    for key in ("past", "future", "values"):
        if key not in d:
            _fail(path, f"missing key '{key}'")
    vals = d["values"]
    if not isinstance(vals, list):
        _fail(f"{path}.values", "expected a list")
    if real:
        values = [_real_in(v, f"{path}.values[{i}]") for i, v in enumerate(vals)]
    else:
        values = [_complex_in(v, f"{path}.values[{i}]") for i, v in enumerate(vals)]
    try:
        return WindowFunction(spec, int(d["past"]), int(d["future"]), values)
    except (ValueError, TypeError) as e:
        _fail(path, str(e))


def _window_out(w: WindowFunction, real: bool) -> dict:
    vals = [float(v.real) if real else _num_out(v) for v in np.asarray(w.values)]
    return {"past": int(w.past), "future": int(w.future), "values": vals}


def _fiber_in(d, path: str) -> GaussPoly:
    if not isinstance(d, dict) or "kind" not in d:
        _fail(path, "expected an object with a 'kind'")
    kind = d["kind"]
    try:
        if kind == "gaussian":
            _expect_keys(d, {"kind", "mean", "sigma", "scale"}, path)
            return GaussPoly.gaussian(
                mean=_real_in(d.get("mean", 0.0), f"{path}.mean"),
                sigma=_real_in(d.get("sigma", 1.0), f"{path}.sigma"),
                scale=_complex_in(d.get("scale", 1.0), f"{path}.scale"),
            )
        if kind == "hermite":
            _expect_keys(d, {"kind", "index", "scale"}, path)
            return GaussPoly.hermite(
                int(d.get("index", 0)),
                scale=_complex_in(d.get("scale", 1.0), f"{path}.scale"),
            )
        if kind == "gausspoly":
            _expect_keys(d, {"kind", "poly", "a", "b", "c"}, path)
            poly = [
                _complex_in(v, f"{path}.poly[{i}]")
                for i, v in enumerate(d.get("poly", [1.0]))
            ]
            return GaussPoly(
                np.array(poly, dtype=np.complex128),
                _complex_in(d.get("a", -0.5), f"{path}.a"),
                _complex_in(d.get("b", 0.0), f"{path}.b"),
                _complex_in(d.get("c", 0.0), f"{path}.c"),
            )
    except ConfigError:
        raise
    except (ValueError, TypeError) as e:
        _fail(path, str(e))
    _fail(path, f"unknown fiber kind {kind!r}")


def _fiber_out(g: GaussPoly) -> dict:
    return {
        "kind": "gausspoly",
        "poly": [_num_out(v) for v in g.poly],
        "a": _num_out(g.a),
        "b": _num_out(g.b),
        "c": _num_out(g.c),
    }


def _observable_in(spec: SubshiftSpec, d, path: str) -> SkewObservable:
    _expect_keys(d, {"terms"}, path)
    terms = d.get("terms")
    if not isinstance(terms, list):
        _fail(path, "expected a 'terms' list")
    out = []
    for i, t in enumerate(terms):
        tp = f"{path}.terms[{i}]"
        _expect_keys(t, {"window", "fiber"}, tp)
        if "window" not in t or "fiber" not in t:
            _fail(tp, "each term needs 'window' and 'fiber'")
        out.append(
            (
                _window_in(spec, t["window"], f"{tp}.window", real=False),
                _fiber_in(t["fiber"], f"{tp}.fiber"),
            )
        )
    return SkewObservable(spec, out)


def _observable_out(s: SkewObservable) -> dict:
    return {
        "terms": [
            {"window": _window_out(c, real=False), "fiber": _fiber_out(g)}
            for c, g in s.terms
        ]
    }


@dataclass
class ExperimentConfig:
    """Parsed form of one experiment document."""

    spec: SubshiftSpec
    potential: CylinderFunction
    f: WindowFunction
    r: SkewObservable
    s: SkewObservable
    n_list: tuple
    quad: QuadratureSpec
    kappa_policy: str
    kappa_value: float | None
    budget: OracleBudget
    output_dir: str
    seed: int
    expansion_order: int
    name: str | None = None

    def gibbs(self) -> GibbsMeasure:
        return GibbsMeasure(self.potential)

    def kappa_override(self) -> float | None:
        return self.kappa_value if self.kappa_policy == "fixed" else None

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return replace(
            self, seed=int(seed), budget=replace(self.budget, rng_seed=int(seed))
        )


def parse_config(doc: dict) -> ExperimentConfig:
    _expect_keys(doc, _TOP_KEYS, "config")
    for key in ("schema_version", "subshift", "potential", "f", "r", "s", "n_list"):
        if key not in doc:
            _fail("config", f"missing key '{key}'")
    if doc["schema_version"] != SCHEMA_VERSION:
        _fail("config.schema_version", f"expected {SCHEMA_VERSION}")

    sub = doc["subshift"]
    _expect_keys(sub, {"alphabet_size", "transition", "theta"}, "config.subshift")
    try:
        spec = SubshiftSpec(
            int(sub["alphabet_size"]),
            sub["transition"],
            _real_in(sub["theta"], "config.subshift.theta"),
        )
    except ConfigError:
        raise
    except (ValueError, TypeError, KeyError) as e:
        _fail("config.subshift", str(e))

    pot = doc["potential"]
    _expect_keys(pot, {"depth", "values"}, "config.potential")
    try:
        potential = CylinderFunction(
            spec,
            int(pot["depth"]),
            [
                _real_in(v, f"config.potential.values[{i}]")
                for i, v in enumerate(pot["values"])
            ],
        )
    except ConfigError:
        raise
    except (ValueError, TypeError, KeyError) as e:
        _fail("config.potential", str(e))

    f = _window_in(spec, doc["f"], "config.f", real=True)
    r = _observable_in(spec, doc["r"], "config.r")
    s = _observable_in(spec, doc["s"], "config.s")

    ns = doc["n_list"]
    if not isinstance(ns, list) or not ns:
        _fail("config.n_list", "expected a nonempty list")
    n_list = []
    for i, n in enumerate(ns):
        if isinstance(n, bool) or not isinstance(n, int) or n < 0:
            _fail(f"config.n_list[{i}]", "expected a nonnegative integer")
        n_list.append(n)
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        _fail("config.n_list", "must be strictly increasing")

    qd = doc.get("quadrature", {})
    _expect_keys(qd, _QUAD_KEYS, "config.quadrature")
    try:
        quad = QuadratureSpec(**qd)
    except (ValueError, TypeError) as e:
        _fail("config.quadrature", str(e))

    kp = doc.get("kappa", {"policy": "auto"})
    _expect_keys(kp, {"policy", "value"}, "config.kappa")
    policy = kp.get("policy", "auto")
    if policy not in ("auto", "fixed"):
        _fail("config.kappa.policy", "must be 'auto' or 'fixed'")
    value = None
    if policy == "fixed":
        if "value" not in kp:
            _fail("config.kappa", "fixed policy needs a 'value'")
        value = _real_in(kp["value"], "config.kappa.value")
        if not 0 < value < quad.xi_max:
            _fail("config.kappa.value", "must lie in (0, xi_max)")
    elif "value" in kp:
        _fail("config.kappa", "'value' only makes sense with the fixed policy")

    seed = doc.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        _fail("config.seed", "expected a nonnegative integer")

    ob = doc.get("oracle", {})
    _expect_keys(ob, {"max_words", "rng_seed", "mc_samples"}, "config.oracle")
    defaults = OracleBudget()
    try:
        budget = OracleBudget(
            max_words=int(ob.get("max_words", defaults.max_words)),
            rng_seed=int(ob.get("rng_seed", seed)),
            mc_samples=int(ob.get("mc_samples", defaults.mc_samples)),
        )
    except (ValueError, TypeError) as e:
        _fail("config.oracle", str(e))

    out = doc.get("output", {})
    _expect_keys(out, {"dir"}, "config.output")
    output_dir = out.get("dir", ".")
    if not isinstance(output_dir, str) or not output_dir:
        _fail("config.output.dir", "expected a nonempty string")

    k = doc.get("expansion_order", 2)
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        _fail("config.expansion_order", "expected a positive integer")

    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        _fail("config.name", "expected a string")

    return ExperimentConfig(
        spec=spec,
        potential=potential,
        f=f,
        r=r,
        s=s,
        n_list=tuple(n_list),
        quad=quad,
        kappa_policy=policy,
        kappa_value=value,
        budget=budget,
        output_dir=output_dir,
        seed=seed,
        expansion_order=k,
        name=name,
    )


def serialize_config(cfg: ExperimentConfig) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "subshift": {
            "alphabet_size": int(cfg.spec.alphabet_size),
            "transition": [[int(v) for v in row] for row in cfg.spec.transition],
            "theta": float(cfg.spec.theta),
        },
        "potential": {
            "depth": int(cfg.potential.depth),
            "values": [float(v.real) for v in np.asarray(cfg.potential.values)],
        },
        "f": _window_out(cfg.f, real=True),
        "r": _observable_out(cfg.r),
        "s": _observable_out(cfg.s),
        "n_list": [int(n) for n in cfg.n_list],
        "quadrature": {
            "xi_max": cfg.quad.xi_max,
            "abs_tol": cfg.quad.abs_tol,
            "max_refine": cfg.quad.max_refine,
            "coarse_width": cfg.quad.coarse_width,
            "scan_policy": cfg.quad.scan_policy,
            "scan_points": cfg.quad.scan_points,
            "scan_threshold": cfg.quad.scan_threshold,
            "peak_threshold": cfg.quad.peak_threshold,
            "max_peaks": cfg.quad.max_peaks,
        },
        "kappa": (
            {"policy": "fixed", "value": cfg.kappa_value}
            if cfg.kappa_policy == "fixed"
            else {"policy": "auto"}
        ),
        "oracle": {
            "max_words": cfg.budget.max_words,
            "rng_seed": cfg.budget.rng_seed,
            "mc_samples": cfg.budget.mc_samples,
        },
        "output": {"dir": cfg.output_dir},
        "seed": cfg.seed,
        "expansion_order": cfg.expansion_order,
    }
    if cfg.name is not None:
        doc["name"] = cfg.name
    return doc


def config_to_json(cfg: ExperimentConfig) -> str:
    return json.dumps(serialize_config(cfg), indent=2, sort_keys=True) + "\n"


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: not valid JSON ({e})") from e
    return parse_config(doc)


# ---------------------------------------------------------------------------
# reference fixtures

_SQRT2 = math.sqrt(2.0)


def _gauss_term(**kw) -> dict:
    return {
        "window": {"past": 0, "future": 0, "values": [1.0]},
        "fiber": {"kind": "gaussian", **kw},
    }


def _r1_config() -> dict:
    g = (1.0, -1.0)
    spec = SubshiftSpec(2, [[1, 1], [1, 1]], 0.5)
    fvals = [g[w[0]] + _SQRT2 * g[w[1]] for w in spec.words(2)]
    log2 = math.log(2.0)
    return {
        "schema_version": SCHEMA_VERSION,
        "name": "R1",
        "subshift": {"alphabet_size": 2, "transition": [[1, 1], [1, 1]], "theta": 0.5},
        "potential": {"depth": 1, "values": [-log2, -log2]},
        "f": {"past": 0, "future": 2, "values": fvals},
        "r": {"terms": [_gauss_term()]},
        "s": {"terms": [_gauss_term()]},
        "n_list": [100, 316, 1000, 3162, 10000],
        # the skew function is lattice-valued, so the aperiodicity sweep
        # cannot pass; keep going and report the radii instead of aborting
        "quadrature": {"scan_policy": "warn"},
        "seed": 0,
    }


def _r2_config() -> dict:
    spec = SubshiftSpec(2, [[1, 1], [1, 0]], 0.5)
    parry = GibbsMeasure(CylinderFunction(spec, 1, [0.0, 0.0]))
    base = [0.8, -1.1, 0.5 * _SQRT2, -0.9, 0.6 * math.sqrt(3.0)]
    mean = parry.integrate(CylinderFunction(spec, 3, base)).real
    return {
        "schema_version": SCHEMA_VERSION,
        "name": "R2",
        "subshift": {"alphabet_size": 2, "transition": [[1, 1], [1, 0]], "theta": 0.5},
        "potential": {"depth": 1, "values": [0.0, 0.0]},
        "f": {"past": 0, "future": 3, "values": [v - mean for v in base]},
        "r": {
            "terms": [
                _gauss_term(),
                {
                    "window": {"past": 0, "future": 1, "values": [1.0, 0.5]},
                    "fiber": {"kind": "hermite", "index": 2, "scale": 0.3},
                },
            ]
        },
        "s": {"terms": [_gauss_term(mean=0.2, sigma=1.1)]},
        "n_list": [32, 52, 84, 137, 224, 365, 596, 972, 1585],
        "seed": 0,
    }


def _r1_two_sided_config() -> dict:
    doc = _r1_config()
    doc["name"] = "R1-two-sided"
    # same cocycle values, re-indexed one step into the past: f depends on
    # the coordinates at -1 and 0 instead of 0 and 1
    doc["f"] = {"past": 1, "future": 1, "values": doc["f"]["values"]}
    return doc


FIXTURES = {
    "R1": _r1_config,
    "R2": _r2_config,
    "R1-two-sided": _r1_two_sided_config,
}


def fixture_config(name: str) -> dict:
    try:
        builder = FIXTURES[name]
    except KeyError:
        raise ConfigError(
            f"unknown fixture {name!r}; choices: {', '.join(sorted(FIXTURES))}"
        ) from None
    return builder()
