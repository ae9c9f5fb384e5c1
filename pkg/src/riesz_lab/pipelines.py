"""Command pipelines shared by the CLI and bundle verification.

Every pipeline has ``run(config, files) -> Result`` and
``certify(config, polys, files) -> certificates``; ``files`` maps bundle
file names to their text so that verification uses the bundled inputs.
The certificates written to a bundle always come from ``certify``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import jsonschema
import numpy as np

from . import constructions as C
from .analysis import explore_uncertainty, weight_envelope_check
from .certificates import Certificate, at_least, at_most
from .core_fourier import Arc, TrigPoly, eval_grid_size, idft, next_pow2
from .errors import ConfigError, NoWitness
from .kernels import (box_kernel, box_kernel_c0, box_kernel_tail_fraction, decay_constant,
                      dirichlet_type, fejer, fejer_pointwise_bound, rudin_shapiro_poly,
                      smooth_bump)
from .riesz import MAX_DEPTH, RieszSpec, classical_partials
from .sequences import (NecregSchedule, WeightSeq, necreg_weights, parse_weight_spec,
                        seq1_amplitudes)

WEIGHT_PATTERN = r"^(power:-?[0-9.eE+-]+|csv:.+|necreg:.+)$"

SCHEMAS = {
    "bad-range": {
        "type": "object",
        "required": ["command", "lambda", "depth"],
        "additionalProperties": False,
        "properties": {
            "command": {"const": "bad-range"},
            "lambda": {"type": "string", "pattern": WEIGHT_PATTERN},
            "depth": {"type": "integer", "minimum": 1, "maximum": MAX_DEPTH},
            "safety": {"type": "number", "minimum": 1},
            "grid_factor": {"type": "integer", "minimum": 2},
            "compare_classical": {"type": "boolean"},
        },
    },
    "hadamard": {
        "type": "object",
        "required": ["command", "n", "c"],
        "additionalProperties": False,
        "properties": {
            "command": {"const": "hadamard"},
            "n": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
            "c": {"type": "array", "items": {"type": "number"}, "minItems": 1},
            "lambda": {"type": ["string", "null"], "pattern": WEIGHT_PATTERN},
        },
    },
    "small-support": {
        "type": "object",
        "required": ["command", "weights", "eps", "N", "a"],
        "additionalProperties": False,
        "properties": {
            "command": {"const": "small-support"},
            "weights": {"type": "string", "pattern": WEIGHT_PATTERN},
            "eps": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
            "N": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1,
                  "maxItems": MAX_DEPTH},
            "a": {"type": "array", "items": {"type": "number"}, "minItems": 1, "maxItems": MAX_DEPTH},
            "select": {"type": "boolean"},
            "budget": {"type": "number", "exclusiveMinimum": 0},
        },
    },
    "psi": {
        "type": "object",
        "required": ["command", "N", "delta"],
        "additionalProperties": False,
        "properties": {
            "command": {"const": "psi"},
            "N": {"type": "integer", "minimum": 1},
            "delta": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
            "M": {"type": "integer", "minimum": 1, "maximum": 8},
        },
    },
    "necreg": {
        "type": "object",
        "required": ["command", "schedule", "n_max"],
        "additionalProperties": False,
        "properties": {
            "command": {"const": "necreg"},
            "schedule": {
                "type": "object", "required": ["N", "eps"], "additionalProperties": False,
                "properties": {"N": {"type": "array", "items": {"type": "integer"}},
                               "eps": {"type": "array", "items": {"type": "number"}}},
            },
            "n_max": {"type": "integer", "minimum": 1},
            "trials": {"type": "integer", "minimum": 0},
            "seed": {"type": "integer", "minimum": 0},
        },
    },
    "uncertainty": {
        "type": "object",
        "required": ["command", "N", "gamma", "delta", "trials"],
        "additionalProperties": False,
        "properties": {
            "command": {"const": "uncertainty"},
            "N": {"type": "integer", "minimum": 1},
            "gamma": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
            "delta": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
            "trials": {"type": "integer", "minimum": 1},
            "seed": {"type": "integer", "minimum": 0},
        },
    },
    "kernels": {
        "type": "object",
        "required": ["command", "kind", "N"],
        "additionalProperties": False,
        "properties": {
            "command": {"const": "kernels"},
            "kind": {"enum": ["dirichlet", "fejer", "box", "rudin-shapiro", "smooth-bump"]},
            "N": {"type": "integer", "minimum": 1},
            "K_cut": {"type": ["integer", "null"], "minimum": 1},
            "arc_start": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
            "arc_length": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
            "M": {"type": "integer", "minimum": 1, "maximum": 8},
        },
    },
}

DEFAULTS = {
    "bad-range": {"safety": 1.01, "grid_factor": 8, "compare_classical": True},
    "hadamard": {"lambda": None},
    "small-support": {"select": False, "budget": 1.0},
    "psi": {"M": 2},
    "necreg": {"trials": 1000, "seed": 0},
    "uncertainty": {"seed": 0},
    "kernels": {"K_cut": None, "arc_start": 0.0, "arc_length": 0.125, "M": 4},
}


def validate(config: dict) -> dict:
    cmd = config.get("command")
    if cmd not in SCHEMAS:
        raise ConfigError(f"unknown command {cmd!r}")
    full = {**DEFAULTS[cmd], **config}
    try:
        jsonschema.validate(full, SCHEMAS[cmd])
    except jsonschema.ValidationError as e:
        raise ConfigError(f"{cmd}: {e.message}") from None
    return full


@dataclass
class Result:
    polys: list[TrigPoly]
    certs: list[Certificate]
    files: dict[str, str] = field(default_factory=dict)
    summary: dict = field(default_factory=dict)


def _weights(spec: str | None, files: dict[str, str]) -> tuple[WeightSeq | None, dict[str, str]]:
    """Resolve a weight spec, preferring copies stored in ``files``."""
    if spec is None:
        return None, {}
    kind, _, rest = spec.partition(":")
    if kind == "power":
        return parse_weight_spec(spec), {}
    if kind == "csv":
        text = files.get("weights.csv") or Path(rest).read_text(encoding="utf-8")
        return WeightSeq.from_csv(text), {"weights.csv": text}
    path, _, nm = rest.partition(":")
    text = files.get("schedule.json") or Path(path).read_text(encoding="utf-8")
    sched = NecregSchedule.from_json(text)
    return necreg_weights(sched, int(nm) if nm else 4 * sched.N[-1]), {"schedule.json": text}


# bad-range

def _bad_range_opts(cfg) -> C.BadRangeOptions:
    return C.BadRangeOptions(safety=cfg["safety"], grid_factor=cfg["grid_factor"])


def run_bad_range(cfg, files) -> Result:
    lam, copies = _weights(cfg["lambda"], files)
    art = C.build_bad_range(lam, cfg["depth"], _bad_range_opts(cfg), cfg["compare_classical"])
    summary = {"a": art.plan.a.tolist(), "N": list(art.spec.N),
               "divergence_label": art.diagnostics.label,
               "weighted": art.details["weighted"], "weighted_bounds": art.details["weighted_bounds"],
               "classical_ratio": art.details.get("classical_ratio")}
    return Result(art.partials, art.certificates, {**copies, "report.json": _dumps(summary)}, summary)


def certify_bad_range(cfg, polys, files):
    lam, _ = _weights(cfg["lambda"], files)
    plan = seq1_amplitudes(lam, len(polys))
    classical = None
    if cfg["compare_classical"]:
        N = tuple(4**j for j in range(1, len(polys) + 1))
        classical = classical_partials(RieszSpec("classical", tuple(plan.a), N))[1:]
    return C.certify_bad_range(polys, lam, plan.a, _bad_range_opts(cfg), classical)[0]


# hadamard

def run_hadamard(cfg, files) -> Result:
    lam, copies = _weights(cfg["lambda"], files)
    art = C.build_hadamard(cfg["n"], cfg["c"], lam)
    return Result(art.partials, art.certificates, copies, {"sups": art.details["sups"]})


def certify_hadamard(cfg, polys, files):
    lam, _ = _weights(cfg["lambda"], files)
    return C.certify_hadamard(polys, cfg["n"], cfg["c"], lam)[0]


# small-support

def run_small_support(cfg, files) -> Result:
    w, copies = _weights(cfg["weights"], files)
    art = C.build_small_support(w, cfg["eps"], cfg["N"], cfg["a"], cfg["select"], cfg["budget"])
    summary = {"selected": list(art.selected), "W": art.W.tolist(), **art.details}
    return Result(art.partials, art.certificates, {**copies, "report.json": _dumps(summary)}, summary)


def certify_small_support(cfg, polys, files):
    w, _ = _weights(cfg["weights"], files)
    W_all = C.window_sups(w, cfg["N"], cfg["eps"])
    idx = C.select_subsequence(W_all, cfg["budget"]) if cfg["select"] else list(range(len(cfg["N"])))
    N = [cfg["N"][i] for i in idx]
    return C.certify_small_support(polys, N, cfg["eps"], W_all[idx], w)[0]


# psi

def run_psi(cfg, files) -> Result:
    art = C.build_psi(cfg["N"], cfg["delta"], cfg["M"])
    summary = {"N_delta": art.N_delta, **art.details}
    return Result([art.psi], art.certificates, {"report.json": _dumps(summary)}, summary)


def certify_psi(cfg, polys, files):
    psi = polys[0]
    grid = idft(psi, 2 * psi.degree)
    return C.certify_psi(grid, psi, cfg["N"], cfg["delta"], cfg["M"])[0]


# necreg

def _random_unit_polys(w: WeightSeq, degree: int, trials: int, seed: int):
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        K = int(rng.integers(1, degree + 1))
        c = rng.normal(size=2 * K + 1) + 1j * rng.normal(size=2 * K + 1)
        c *= rng.random(2 * K + 1) ** 4
        p = TrigPoly(c)
        wv = w.array(K)[np.abs(p.frequencies)]
        yield TrigPoly(c / math.sqrt(float(np.sum(np.abs(c) ** 2 * wv))))


def _necreg_parts(cfg):
    sched = NecregSchedule(tuple(cfg["schedule"]["N"]), tuple(cfg["schedule"]["eps"]))
    w = necreg_weights(sched, cfg["n_max"])
    return sched, w


def certify_necreg(cfg, polys, files):
    sched, w = _necreg_parts(cfg)
    certs = []
    at_n = [w.table[n] for n in sched.N if n <= cfg["n_max"]]
    dev = max((abs(x - e) for x, e in zip(at_n, sched.eps)), default=0.0)
    certs.append(at_most("weight_at_schedule", dev, 0.0))
    worst, fails = 0.0, 0
    for p in _random_unit_polys(w, cfg["n_max"], cfg["trials"], cfg["seed"]):
        for row in weight_envelope_check(p, w):
            worst = max(worst, row.sup / row.eps)
            fails += not row.passed
    certs.append(at_most("envelope_failures", fails, 0))
    certs.append(at_most("envelope_ratio", worst, 1.0, 1e-12))
    if "weights.csv" in files:
        same = files["weights.csv"] == w.to_csv()
        certs.append(at_least("weights_reproduced", float(same), 1.0))
    return certs


def run_necreg(cfg, files) -> Result:
    _, w = _necreg_parts(cfg)
    return Result([], [], {"weights.csv": w.to_csv()}, {"n_max": cfg["n_max"]})


# uncertainty

def _uncertainty(cfg):
    try:
        rep = explore_uncertainty(cfg["N"], cfg["gamma"], cfg["delta"], cfg["trials"], cfg["seed"])
    except NoWitness as e:
        rep = e.report
    return rep


def certify_uncertainty(cfg, polys, files):
    rep = _uncertainty(cfg)
    trace = np.array(rep.eps_trace)
    finite = trace[np.isfinite(trace)]
    rise = float(np.max(np.diff(finite))) if finite.size > 1 else 0.0
    gaps = [r["gap"] for r in rep.witnesses]
    certs = [at_most("eps_trace_nonincreasing", max(rise, 0.0), 0.0),
             at_least("witness_gap", min(gaps) if gaps else math.inf, cfg["delta"])]
    for name in ("report.json", "witnesses.csv"):
        if name in files:
            fresh = rep.to_json() + "\n" if name == "report.json" else rep.to_csv()
            certs.append(at_least(f"{name}_reproduced", float(files[name] == fresh), 1.0))
    return certs


def run_uncertainty(cfg, files) -> Result:
    rep = _uncertainty(cfg)
    return Result([], [], {"report.json": rep.to_json() + "\n", "witnesses.csv": rep.to_csv()},
                  {"eps_star": rep.eps_star, "witness_count": len(rep.witnesses)})


# kernels

def _kernel(cfg) -> TrigPoly:
    kind, N = cfg["kind"], cfg["N"]
    if kind == "dirichlet":
        return dirichlet_type(N)
    if kind == "fejer":
        return fejer(N)
    if kind == "box":
        return box_kernel(N, cfg["K_cut"])
    if kind == "rudin-shapiro":
        return rudin_shapiro_poly(N)
    return smooth_bump(Arc.from_start(cfg["arc_start"], cfg["arc_length"]), cfg["M"])


def certify_kernels(cfg, polys, files):
    p = polys[0]
    kind, N = cfg["kind"], cfg["N"]
    if kind == "dirichlet":
        ref = dirichlet_type(N)
        return [at_most("coefficients", float(np.max(np.abs(p.padded(max(p.degree, ref.degree)).coeffs
                                                            - ref.padded(max(p.degree, ref.degree)).coeffs))), 1e-12),
                at_most("value_at_one", abs(complex(np.sum(p.coeffs)) - 1.0), 1e-12),
                at_most("l2_norm", abs(p.energy() - 1.0 / N), 1e-12)]
    if kind == "fejer":
        M = eval_grid_size(p.degree)
        s = idft(p, M).samples
        t = 2 * math.pi * np.arange(1, M) / M
        excess = float(np.max(s[1:] - fejer_pointwise_bound(N, t)))
        return [at_least("nonnegative", float(np.min(s)), 0.0, 1e-12),
                at_most("mean_one", abs(p.coeff(0) - 1.0), 1e-12),
                at_most("pointwise_bound", excess, 0.0, 1e-12)]
    if kind == "box":
        K = p.degree
        return [at_least("c0", box_kernel_c0(p, N), 1.0),
                at_most("tail_fraction", box_kernel_tail_fraction(N, K), 2.0 * N / K)]
    if kind == "rudin-shapiro":
        M = eval_grid_size(p.degree)
        sup = float(np.max(np.abs(idft(p, M).samples)))
        return [at_most("sup_norm", sup, 10.0 / math.sqrt(N))]
    arc = Arc.from_start(cfg["arc_start"], cfg["arc_length"])
    M = next_pow2(2 * p.degree + 1)
    s = idft(p, M).samples
    outside = float(np.max(np.abs(s[~arc.mask(M)]))) if arc.length < 1 else 0.0
    return [at_most("mean_one", abs(p.coeff(0) - 1.0), 1e-12),
            at_most("outside_arc", outside, 1e-9),
            at_most("decay_constant", decay_constant(p, cfg["M"]), math.inf)]


def run_kernels(cfg, files) -> Result:
    p = _kernel(cfg)
    return Result([p], [], {}, {"degree": p.degree})


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


PIPELINES: dict[str, tuple[Callable, Callable]] = {
    "bad-range": (run_bad_range, certify_bad_range),
    "hadamard": (run_hadamard, certify_hadamard),
    "small-support": (run_small_support, certify_small_support),
    "psi": (run_psi, certify_psi),
    "necreg": (run_necreg, certify_necreg),
    "uncertainty": (run_uncertainty, certify_uncertainty),
    "kernels": (run_kernels, certify_kernels),
}
