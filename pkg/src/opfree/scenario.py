"""
JSON scenarios: schema validation and dispatch to the verification suites.

A scenario is ``{"schema_version": "1.0", "kind": ..., "payload": {...}}``.
``kind`` is one of ``partitions``, ``moments``, ``cumulants``, ``fock`` or
``verify``; a ``verify`` payload names its ``suite``. Unknown fields are
rejected at every level.
"""

from __future__ import annotations

import json
import time
from importlib import resources
from itertools import product

import jsonschema
import numpy as np

from . import fock, ncpart, standard_poly, symfock, wick
from .amplify import (
    SEMICIRCULAR_ORDERS,
    complex_semicircular_check,
    detect_nonsemicircular,
    verify_semicircular_amplification,
    verify_theorem1_forward,
    verify_theorem2_chain,
)
from .exceptions import OpFreeError, ScenarioError
from .matrices import DEFAULT_TOL, max_abs, trial_rng
from .mcx import MomentSource, OpWord, cumulants_to_moments, moments_to_cumulants
from .report import FAIL, PASS, Report, digest

SCENARIO_SCHEMA_VERSION = "1.0"

DEFAULT_SEED = 0
DEFAULT_TRIALS = 50

SUITES = ("prop32", "thm1-forward", "thm1-converse", "def42", "cor43",
          "thm2-chain", "al", "symfock")

_COV = {
    "type": "object",
    "properties": {
        "names": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "cov": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
    },
    "required": ["names", "cov"],
    "additionalProperties": False,
}
_POS = {"type": "integer", "minimum": 1}
_NONNEG = {"type": "integer", "minimum": 0}
_INT_LIST = {"type": "array", "items": {"type": "integer", "minimum": 0}}
_WORDS = {"type": "array", "items": _INT_LIST}
_RUN = {"trials": _NONNEG, "seed": {"type": "integer"}, "tol": {"type": "number", "minimum": 0},
        "depth": _POS}


def _obj(props, required=()):
    return {"type": "object", "properties": props, "required": list(required),
            "additionalProperties": False}


SCENARIO_SCHEMA = _obj({
    "schema_version": {"const": SCENARIO_SCHEMA_VERSION},
    "description": {"type": "string"},
    "kind": {"enum": ["partitions", "moments", "cumulants", "fock", "verify"]},
    "payload": {"type": "object"},
}, required=["kind", "payload"])

PAYLOAD_SCHEMAS = {
    "partitions": _obj({"n_max": {"type": "integer", "minimum": 1, "maximum": 12},
                        "list_n": {"type": "integer", "minimum": 1, "maximum": 8}},
                       required=["n_max"]),
    "moments": _obj({"covariance": _COV, "words": _WORDS,
                     "model": {"enum": ["free", "classical"]}, "tol": _RUN["tol"]},
                    required=["covariance", "words"]),
    "cumulants": _obj({"moment_sequence": {"type": "array", "items": {"type": "number"},
                                           "minItems": 1, "maxItems": 10},
                       "expected_cumulants": {"type": "array", "items": {"type": "number"}},
                       "tol": _RUN["tol"]},
                      required=["moment_sequence"]),
    "fock": _obj({"covariance": _COV, "model": {"enum": ["free", "bosonic", "both"]},
                  "max_length": {"type": "integer", "minimum": 0, "maximum": 10},
                  "words": _WORDS, "tol": _RUN["tol"], "depth": _POS},
                 required=["covariance"]),
}

SUITE_SCHEMAS = {
    "prop32": _obj({"suite": {"const": "prop32"}, "vectors": {
        "type": "array", "items": {"type": "array", "items": {"type": "number"}}, "minItems": 1},
        "coeff_dim": _POS, "p_values": _INT_LIST, **_RUN}, required=["suite", "vectors"]),
    "thm1-forward": _obj({"suite": {"const": "thm1-forward"}, "covariance": _COV,
                          "coeff_dim": _POS, "p_max": {"type": "integer", "minimum": 0, "maximum": 6},
                          **_RUN}, required=["suite", "covariance"]),
    "thm1-converse": _obj({"suite": {"const": "thm1-converse"}, "covariance": _COV,
                           "family": _WORDS, "control_family": _WORDS,
                           "p": {"type": "integer", "minimum": 1, "maximum": 4},
                           "matrix_size": _POS, "threshold_ratio": {"type": "number", "minimum": 0},
                           "min_detections": _NONNEG, **_RUN},
                          required=["suite", "covariance", "family"]),
    "def42": _obj({"suite": {"const": "def42"}, "c_covariance": _COV,
                   "max_length": {"type": "integer", "minimum": 0, "maximum": 8}, **_RUN},
                  required=["suite", "c_covariance"]),
    "cor43": _obj({"suite": {"const": "cor43"}, "c_covariance": _COV, "coeff_dim": _POS,
                   "p_values": _INT_LIST, "combinations": _NONNEG, **_RUN},
                  required=["suite", "c_covariance"]),
    "thm2-chain": _obj({"suite": {"const": "thm2-chain"}, "covariance": _COV,
                        "max_length": {"type": "integer", "minimum": 1, "maximum": 6},
                        "coeff_dims": {"type": "array", "items": _POS}, **_RUN},
                       required=["suite", "covariance"]),
    "al": _obj({"suite": {"const": "al"}, "n": {"type": "array", "items": {
        "type": "integer", "minimum": 1, "maximum": 3}, "minItems": 1}, **_RUN},
        required=["suite", "n"]),
    "symfock": _obj({"suite": {"const": "symfock"},
                     "n": {"type": "array", "items": {"type": "integer", "minimum": 2, "maximum": 6}},
                     "m": {"type": "array", "items": {"type": "integer", "minimum": 1, "maximum": 3}},
                     **_RUN}, required=["suite", "n", "m"]),
}


def _check(doc, schema, prefix):
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join([prefix] + [str(p) for p in exc.absolute_path] if prefix
                         else [str(p) for p in exc.absolute_path]) or "<root>"
        raise ScenarioError(f"schema violation at {where}: {exc.message}") from None


def validate(scenario):
    """Raise :class:`ScenarioError` unless ``scenario`` matches the schema."""
    _check(scenario, SCENARIO_SCHEMA, "")
    kind = scenario["kind"]
    payload = scenario["payload"]
    if kind == "verify":
        suite = payload.get("suite")
        if suite not in SUITE_SCHEMAS:
            raise ScenarioError(f"unknown verify suite {suite!r}; expected one of {SUITES}")
        _check(payload, SUITE_SCHEMAS[suite], "payload")
    else:
        _check(payload, PAYLOAD_SCHEMAS[kind], "payload")
    for key in ("covariance", "c_covariance"):
        if key in scenario["payload"]:
            try:
                wick.CovarianceSpec.from_dict(scenario["payload"][key])
            except (ValueError, OpFreeError) as exc:
                raise ScenarioError(f"invalid {key}: {exc}") from None
    return scenario


def load(path):
    """Read and validate a scenario file."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"malformed JSON in {path}: {exc}") from None
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from None
    return validate(data)


def bundled_names():
    files = resources.files("opfree").joinpath("scenarios")
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".json"))


def bundled_path(name):
    return resources.files("opfree").joinpath("scenarios", f"{name}.json")


# ---------------------------------------------------------------- runners


def _opt(payload, overrides, key, default):
    if overrides.get(key) is not None:
        return overrides[key]
    return payload.get(key, default)


def _run_partitions(payload, ov):
    n_max = payload["n_max"]
    report = Report("partitions", environment={"n_max": n_max})
    for n in range(1, n_max + 1):
        nc = ncpart.enumerate_nc(n)
        report.add("|NC(%d)| = Catalan(%d)" % (n, n),
                   PASS if len(nc) == ncpart.catalan_number(n) else FAIL,
                   float(len(nc)), None, digest(n))
        if n <= 10:
            filtered = {p for p in ncpart.enumerate_set_partitions(n) if ncpart.is_noncrossing(p)}
            report.add("NC(%d) = filtered set partitions" % n,
                       PASS if filtered == {p.base for p in nc} else FAIL,
                       float(len(filtered)), None, digest(n))
        if n % 2 == 0:
            ncpp = ncpart.enumerate_ncpp(n)
            report.add("|NCPP(%d)| = Catalan(%d)" % (n, n // 2),
                       PASS if len(ncpp) == ncpart.catalan_number(n // 2) else FAIL,
                       float(len(ncpp)), None, digest(n))
    if "list_n" in payload:
        n = payload["list_n"]
        report.environment["nc_partitions"] = [str(p) for p in ncpart.enumerate_nc(n)]
    return report


def _run_moments(payload, ov):
    spec = wick.CovarianceSpec.from_dict(payload["covariance"])
    model = payload.get("model", "free")
    tol = _opt(payload, ov, "tol", DEFAULT_TOL)
    words = payload["words"]
    depth = max([len(w) for w in words] + [1])
    report = Report("moments", environment={"model": model, "tol": tol, "depth": depth})
    if model == "free":
        ops, evaluate = fock.free_family(spec, depth), wick.free_wick_moment
    else:
        ops, evaluate = fock.bosonic_family(spec, depth), wick.classical_wick_moment
    for w in words:
        value = evaluate(w, spec)
        oracle = fock.vacuum_expectation([ops[i] for i in w]).real if w else 1.0
        report.add_bound(f"word {w}", abs(value - oracle), tol, digest(w), moment=value)
    return report


def _run_cumulants(payload, ov):
    seq = [float(x) for x in payload["moment_sequence"]]
    tol = _opt(payload, ov, "tol", DEFAULT_TOL)
    report = Report("cumulants", environment={"tol": tol, "orders": len(seq)})

    def moment(word):
        coeff = np.prod([c[0, 0] for c in word.coeffs]) if word.coeffs else 1.0
        return np.array([[seq[len(word) - 1] * coeff]])

    source = MomentSource(moment, 1)
    kappas = [moments_to_cumulants(OpWord((0,) * n), source)[0, 0].real
              for n in range(1, len(seq) + 1)]

    def cumulant(word):
        coeff = np.prod([c[0, 0] for c in word.coeffs]) if word.coeffs else 1.0
        return np.array([[kappas[len(word) - 1] * coeff]])

    back = [cumulants_to_moments(OpWord((0,) * n), cumulant)[0, 0].real
            for n in range(1, len(seq) + 1)]
    report.add_bound("roundtrip to moments", max(abs(a - b) for a, b in zip(back, seq)), tol,
                     digest(seq), cumulants=kappas)
    if "expected_cumulants" in payload:
        exp = payload["expected_cumulants"]
        if len(exp) != len(kappas):
            raise ScenarioError("expected_cumulants must match the moment sequence length")
        report.add_bound("matches expected cumulants",
                         max(abs(a - b) for a, b in zip(kappas, exp)), tol, digest(exp))
    return report


def _all_words(m, max_length):
    for length in range(max_length + 1):
        yield from product(range(m), repeat=length)


def _run_fock(payload, ov):
    spec = wick.CovarianceSpec.from_dict(payload["covariance"])
    model = payload.get("model", "both")
    tol = _opt(payload, ov, "tol", DEFAULT_TOL)
    if "words" in payload:
        words = [tuple(w) for w in payload["words"]]
    else:
        words = list(_all_words(spec.size, payload.get("max_length", 6)))
    longest = max([len(w) for w in words] + [1])
    depth = _opt(payload, ov, "depth", longest)
    report = Report("fock", environment={"model": model, "tol": tol, "depth": depth,
                                         "words": len(words)})
    models = ("free", "bosonic") if model == "both" else (model,)
    for mdl in models:
        if mdl == "free":
            ops, evaluate = fock.free_family(spec, depth), wick.free_wick_moment
        else:
            ops, evaluate = fock.bosonic_family(spec, depth), wick.classical_wick_moment
        worst = 0.0
        for w in words:
            got = fock.vacuum_expectation([ops[i] for i in w])
            worst = max(worst, abs(got - evaluate(w, spec)))
        report.add_bound(f"{mdl} Fock = {'0-Wick' if mdl == 'free' else 'Wick'}", worst, tol,
                         digest(mdl, len(words)))
    return report


def _suite_prop32(p, ov, seed, trials, tol):
    vectors = np.array(p["vectors"], dtype=float)
    p_values = tuple(p.get("p_values", SEMICIRCULAR_ORDERS))
    depth = _opt(p, ov, "depth", max(p_values) + 1)
    basis = fock.FreeFockBasis(vectors.shape[1], depth)
    family = [fock.gaussian_free(v, basis) for v in vectors]
    return verify_semicircular_amplification(
        family, p.get("coeff_dim", 3), p_values, trials, seed, tol, suite="prop32",
        cov=vectors @ vectors.T)


def _suite_thm1_forward(p, ov, seed, trials, tol):
    spec = wick.CovarianceSpec.from_dict(p["covariance"])
    p_max = p.get("p_max", 4)
    return verify_theorem1_forward(
        spec, p.get("coeff_dim", 3), p_max, trials, seed, tol, _opt(p, ov, "depth", None))


def _monomials(words, gens):
    out = []
    for w in words:
        if not w:
            raise ScenarioError("family monomials must be nonempty")
        op = gens[w[0]]
        for i in w[1:]:
            op = op @ gens[i]
        out.append(op)
    return out


def _suite_thm1_converse(p, ov, seed, trials, tol):
    spec = wick.CovarianceSpec.from_dict(p["covariance"])
    order = p.get("p", 2)
    family_words = p["family"]
    control_words = p.get("control_family", [[i] for i in range(spec.size)])
    longest = max(len(w) for w in family_words + control_words)
    depth = _opt(p, ov, "depth", (order + 1) * longest)
    gens = fock.free_family(spec, depth)
    kw = dict(p=order, trials=trials, seed=seed, matrix_size=p.get("matrix_size"),
              threshold_ratio=p.get("threshold_ratio", 0.5), tol=tol)
    target = detect_nonsemicircular(_monomials(family_words, gens), **kw)
    control = detect_nonsemicircular(_monomials(control_words, gens), **kw)
    if trials < 1:
        raise ScenarioError("thm1-converse needs at least one trial")
    # a --trials override below the payload's requirement caps it
    need = min(p.get("min_detections", trials), trials)
    hits = target.checks[0].details["detections"]
    false_hits = control.checks[0].details["detections"]
    report = Report("thm1-converse", environment=dict(target.environment, min_detections=need))
    report.add(f"non-semicircular family detected in >= {need}/{trials} trials",
               PASS if hits >= need else FAIL, float(hits), float(need),
               target.checks[0].inputs_digest, family=family_words,
               max_xi_norm=target.checks[0].value,
               min_ratio=target.checks[0].details["min_ratio"])
    report.add("semicircular control family never detected",
               PASS if false_hits == 0 else FAIL, float(false_hits), 0.0,
               control.checks[0].inputs_digest, family=control_words,
               max_xi_norm=control.checks[0].value)
    return report


def star_moment_fock(word, real_ops, imag_ops):
    """Vacuum expectation of a star word with ``c_j = real_j + i imag_j``."""
    cs = [r + 1j * i for r, i in zip(real_ops, imag_ops)]
    ops = [cs[j].adjoint() if star else cs[j] for j, star in word.letters]
    return fock.vacuum_expectation(ops)


def _suite_def42(p, ov, seed, trials, tol):
    spec = wick.CovarianceSpec.from_dict(p["c_covariance"])
    if spec.size % 2:
        raise ScenarioError("c_covariance must list real/imaginary parts in pairs")
    max_length = p.get("max_length", 6)
    depth = _opt(p, ov, "depth", max(max_length, 1))
    gens = fock.free_family(spec, depth)
    real_ops, imag_ops = gens[0::2], gens[1::2]
    report = Report("def42", environment={"tol": tol, "depth": depth, "max_length": max_length})
    worst, count = 0.0, 0
    n = spec.size // 2
    for length in range(max_length + 1):
        for letters in product(product(range(n), (False, True)), repeat=length):
            w = wick.StarWord(letters)
            worst = max(worst, abs(star_moment_fock(w, real_ops, imag_ops)
                                   - wick.circular_star_moment(w, spec)))
            count += 1
    report.add_bound("Fock star moments = star-word expansion", worst, tol,
                     digest(spec.cov, max_length), words=count)
    return report


def _suite_cor43(p, ov, seed, trials, tol):
    spec = wick.CovarianceSpec.from_dict(p["c_covariance"])
    if spec.size % 2:
        raise ScenarioError("c_covariance must list real/imaginary parts in pairs")
    p_values = tuple(p.get("p_values", (0, 2, 3)))
    depth = _opt(p, ov, "depth", max(p_values) + 1)
    gens = fock.free_family(spec, depth)
    return complex_semicircular_check(
        gens[0::2], gens[1::2], p.get("coeff_dim", 2), p_values, trials, seed, tol,
        p.get("combinations", 3))


def _suite_thm2(p, ov, seed, trials, tol):
    spec = wick.CovarianceSpec.from_dict(p["covariance"])
    return verify_theorem2_chain(
        spec, p.get("max_length", 4), tuple(p.get("coeff_dims", (1, 2, 3))), trials, seed, tol,
        _opt(p, ov, "depth", None))


def _suite_al(p, ov, seed, trials, tol):
    report = Report("al", environment={"seed": seed, "tol": tol, "trials": trials, "n": p["n"]})
    for n in p["n"]:
        sub = standard_poly.verify_al_vanishing(n, trials, seed, tol)
        report.checks.extend(sub.checks)
        w = standard_poly.find_nonvanishing_witness(n)
        value = max_abs(w.value()) if w is not None else 0.0
        report.add(f"s_{2 * n - 1} nonvanishing witness on M_{n}",
                   PASS if w is not None and value > 0.5 else FAIL, value, None,
                   digest(n), witness=list(w.labels) if w is not None else None)
    return report


def _suite_symfock(p, ov, seed, trials, tol):
    report = Report("symfock", environment={"seed": seed, "n": p["n"], "m": p["m"]})
    for n in p["n"]:
        for m in p["m"]:
            rng = trial_rng(seed, 100 * n + m)
            A = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
            sub = symfock.verify_symmetrization(n, m, A, tol=0.0)
            for c in sub.checks:
                c.name = f"n={n} m={m}: {c.name}"
                report.checks.append(c)
    return report


_SUITE_RUNNERS = {
    "prop32": _suite_prop32,
    "thm1-forward": _suite_thm1_forward,
    "thm1-converse": _suite_thm1_converse,
    "def42": _suite_def42,
    "cor43": _suite_cor43,
    "thm2-chain": _suite_thm2,
    "al": _suite_al,
    "symfock": _suite_symfock,
}


def _run_verify(payload, ov):
    seed = _opt(payload, ov, "seed", DEFAULT_SEED)
    trials = _opt(payload, ov, "trials", DEFAULT_TRIALS)
    tol = _opt(payload, ov, "tol", DEFAULT_TOL)
    report = _SUITE_RUNNERS[payload["suite"]](payload, ov, seed, trials, tol)
    report.environment.setdefault("seed", seed)
    report.environment.setdefault("tol", tol)
    return report


_RUNNERS = {
    "partitions": _run_partitions,
    "moments": _run_moments,
    "cumulants": _run_cumulants,
    "fock": _run_fock,
    "verify": _run_verify,
}


def run_scenario(scenario, overrides=None) -> Report:
    """Validate and execute a scenario dict; ``overrides`` holds CLI flags
    (``seed``, ``trials``, ``tol``, ``depth``) that win over the payload."""
    validate(scenario)
    overrides = overrides or {}
    t0 = time.perf_counter()
    try:
        report = _RUNNERS[scenario["kind"]](scenario["payload"], overrides)
    except OpFreeError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"scenario cannot be run as configured: {exc}") from exc
    report.wall_time = time.perf_counter() - t0
    report.environment["kind"] = scenario["kind"]
    return report
