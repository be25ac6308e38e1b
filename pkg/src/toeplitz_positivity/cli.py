"""Command-line front end: one JSON instance in, one report out.

Exit codes: 0 when the analysis completed (whatever the verdict), 2 for
invalid input, 3 for numerical failures such as singular blocks or
quadrature that misses its error target.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import fio, positivity, symplectic, toeplitz, validate
from .errors import InvalidInput, NumericalFailure
from .forms import (
    ComplexQuadraticSymbolExponent,
    QuadraticWeight,
    compare_weights,
    polarize,
    split_herm_plh,
)
from .serialization import (
    SCHEMA_VERSION,
    canonical_json,
    encode_matrix,
    encode_verdict,
    load_instance,
    parse_complex,
    parse_holomorphic,
    parse_matrix,
    parse_symbol_exponent,
    parse_weight,
    to_jsonable,
)

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3
KINDS = ("weight", "lagrangian", "map", "fio", "toeplitz", "validate")
DEFAULTS = {"tol": 1e-9, "seed": 42, "truncation": 40}
UNBOUNDED_NORM = 1e3


def _random_points(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    return rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))


def _weight_or_model(payload: dict, key: str, n: int | None) -> QuadraticWeight:
    if key in payload:
        return parse_weight(payload[key], key)
    if n is None:
        raise InvalidInput(f"missing field {key!r}")
    return QuadraticWeight.model(n)


# ---------------------------------------------------------------------------
# subcommands


def run_weight(payload: dict, opts: dict) -> dict:
    phi = parse_weight(payload.get("weight", payload), "weight")
    rng = np.random.default_rng(opts["seed"])
    levi = phi.levi_eigenvalues()
    strict = phi.is_strictly_psh(opts["tol"])
    herm, plh = split_herm_plh(phi)
    x = _random_points(rng, 20, phi.n)
    Psi = polarize(phi)
    out = {
        "strictly_psh": {"verdict": strict, "margin": float(levi[0]), "levi_eigenvalues": levi},
        "label": "strictly plurisubharmonic" if strict else "not strictly plurisubharmonic",
        "pluriharmonic": phi.is_pluriharmonic(opts["tol"]),
        "split": {
            "herm": herm,
            "plh": plh,
            "resum_residual": float(np.max(np.abs(herm(x) + plh(x) - phi(x)))),
        },
        "polarization": {
            "Psi": Psi,
            "identity_residual": float(np.max(np.abs(Psi(np.hstack([x, x.conj()])) - phi(x)))),
        },
    }
    if "compare_with" in payload:
        other = parse_weight(payload["compare_with"], "compare_with")
        out["comparison"] = encode_verdict(compare_weights(phi, other, opts["tol"]))
    return out


def run_lagrangian(payload: dict, opts: dict) -> dict:
    plane = positivity.CLagrangianPlane(parse_matrix(payload.get("basis"), "basis"))
    phi0 = _weight_or_model(payload, "weight", plane.n)
    return {"positivity": positivity.lagrangian_positivity(plane, phi0, opts["tol"])}


def _push_residual(M, phi2: QuadraticWeight, pushed: QuadraticWeight, rng) -> float:
    x = _random_points(rng, 20, phi2.n)
    img = M(phi2.graph_point(x))
    return float(np.max(np.abs(pushed.graph_point(img[:, : phi2.n]) - img)))


def run_map(payload: dict, opts: dict) -> dict:
    M = symplectic.ComplexCanonicalMap(parse_matrix(payload.get("M"), "M"))
    phi1 = _weight_or_model(payload, "phi1", M.n)
    phi2 = _weight_or_model(payload, "phi2", M.n)
    rng = np.random.default_rng(opts["seed"])
    verdict = positivity.map_positivity(M, phi1, phi2, opts["tol"])
    out = {"map_positivity": verdict}
    try:
        pushed = symplectic.push_weight(M, phi2)
        out["pushed_weight"] = {"weight": pushed, "graph_residual": _push_residual(M, phi2, pushed, rng)}
    except NumericalFailure as exc:
        out["pushed_weight"] = {"error": f"{type(exc).__name__}: {exc}"}
    try:
        eq = fio.prop32_equivalence(M, phi1, phi2, opts["tol"])
        out["equivalence"] = {
            "map_positive": eq.map_positive.direct.status,
            "kernel_plane_positive": eq.kernel_plane_positive.direct.status,
            "kernel_dominated": eq.kernel_dominated.status,
            "margins": [
                eq.map_positive.direct.min_eigenvalue,
                eq.kernel_plane_positive.direct.min_eigenvalue,
                eq.kernel_dominated.min_eigenvalue,
            ],
            "all_agree": eq.agree,
            "kernel_weight": eq.Psi,
        }
    except NumericalFailure as exc:
        out["equivalence"] = {"error": f"{type(exc).__name__}: {exc}"}
    return out


def _parse_phase(payload: dict, phi2: QuadraticWeight) -> fio.NondegeneratePhase:
    if "phase" in payload:
        p = payload["phase"]
        try:
            dims = int(p["n_x"]), int(p["n_y"]), int(p["N"])
        except (KeyError, TypeError, ValueError):
            raise InvalidInput("phase: fields n_x, n_y, N must be integers") from None
        return fio.NondegeneratePhase(*dims, parse_holomorphic(p, "phase"))
    if "generating" in payload:
        return fio.NondegeneratePhase.from_generating(parse_holomorphic(payload["generating"], "generating"), phi2.n)
    if "q" in payload:
        return fio.NondegeneratePhase.toeplitz(parse_symbol_exponent(payload["q"]), phi2)
    raise InvalidInput("fio payload needs one of 'phase', 'generating' or 'q'")


def run_fio(payload: dict, opts: dict) -> dict:
    if "phi2" not in payload:
        raise InvalidInput("missing field 'phi2'")
    phi2 = parse_weight(payload["phi2"], "phi2")
    phi1 = parse_weight(payload["phi1"], "phi1") if "phi1" in payload else phi2
    phase = _parse_phase(payload, phi2)
    rng = np.random.default_rng(opts["seed"])
    out: dict = {}
    M = phase.canonical_map()
    out["canonical_map"] = encode_matrix(M.M)
    img = fio.image_weight(phase, phi2)
    out["image_weight"] = {
        "weight": img,
        "critical_signature": list(fio.critical_signature(phase, phi2)),
    }
    try:
        pushed = symplectic.push_weight(M, phi2)
        out["image_weight"]["push_weight_residual"] = float(
            np.linalg.norm(pushed.A - img.A) + np.linalg.norm(pushed.L - img.L)
        )
        out["image_weight"]["graph_residual"] = _push_residual(M, phi2, img, rng)
    except NumericalFailure as exc:
        out["image_weight"]["push_weight_error"] = f"{type(exc).__name__}: {exc}"
    kernel = fio.kernel_from_phase(phase, phi2)
    recovered = fio.map_from_kernel(kernel.Psi, polarize(phi2))
    out["kernel"] = {
        "amplitude": kernel.amplitude,
        "Psi": kernel.Psi,
        "branch": kernel.branch,
        "map_recovery_residual": float(np.max(np.abs(recovered.M - M.M))),
    }
    dom = fio.kernel_domination_check(kernel.Psi, img, phi2, opts["tol"])
    out["domination"] = {
        "psd": dom.psd,
        "min_eigenvalue": dom.min_eigenvalue,
        "margin": dom.min_eigenvalue,
        "kernel_dimension": dom.kernel_dimension,
        "expected_kernel_dimension": 2 * phi2.n,
        "witness": dom.witness,
    }
    out["map_positivity"] = positivity.map_positivity(M, phi1, phi2, opts["tol"])
    return out


def _toeplitz_summary(rep: toeplitz.ToeplitzReport) -> dict:
    adm = rep.admissibility
    out = {
        "admissibility": {
            "densely_defined": adm.densely_defined,
            "densely_defined_margin": adm.densely_defined_margin,
            "convergent": adm.convergent,
            "convergence_margin": adm.convergence_margin,
            "nondegenerate": adm.nondegenerate,
            "nondegeneracy_det": adm.nondegeneracy_det,
            "nondegeneracy_marginal": adm.nondegeneracy_marginal,
        },
        "bounded": rep.bounded,
        "bounded_label": rep.bounded_label,
        "trace_class": rep.trace_class,
        "unitary_up_to_phase": rep.unitary_up_to_phase,
        "unitary_amplitude_defect": rep.unitary_amplitude_defect,
        "trace": rep.trace,
        "cayley_residual": rep.cayley_residual,
    }
    if rep.weyl is not None:
        out["weyl_symbol"] = {"c": rep.weyl.c, "F": rep.weyl.F}
    if rep.kappa is not None:
        out["canonical_map"] = encode_matrix(rep.kappa.M)
    return out


def _sweep_symbols(payload: dict, instance: dict) -> list[tuple[dict, ComplexQuadraticSymbolExponent, QuadraticWeight]]:
    sweep = instance.get("sweep")
    if sweep is None:
        q = parse_symbol_exponent(payload.get("q"))
        return [({}, q, _weight_or_model(payload, "phi0", q.n))]
    if not isinstance(sweep, dict) or set(sweep) != {"lambda"} or not isinstance(sweep["lambda"], list):
        raise InvalidInput("sweep must be an object with a single 'lambda' array")
    phi0 = _weight_or_model(payload, "phi0", int(payload.get("n", 1)))
    items = []
    for i, lam in enumerate(sweep["lambda"]):
        lam = parse_complex(lam, f"sweep.lambda[{i}]")
        items.append(({"lambda": lam}, ComplexQuadraticSymbolExponent.radial(lam, phi0.n), phi0))
    return items


def run_toeplitz(payload: dict, opts: dict, instance: dict) -> dict | list:
    results = []
    for tag, q, phi0 in _sweep_symbols(payload, instance):
        results.append({**tag, **_toeplitz_summary(toeplitz.analyze(q, phi0, opts["tol"]))})
    return results if "sweep" in instance else results[0]


def _validate_one(q: ComplexQuadraticSymbolExponent, phi0: QuadraticWeight, payload: dict, opts: dict) -> dict:
    orders = payload.get("orders", [opts["truncation"]])
    if not isinstance(orders, list) or not all(isinstance(N, int) and not isinstance(N, bool) for N in orders):
        raise InvalidInput("orders must be a list of integers")
    method = payload.get("method", "auto")
    symbolic = toeplitz.analyze(q, phi0, opts["tol"])
    spectra = []
    for N in orders:
        T = validate.truncated_matrix(q, N, method)
        rep = validate.spectral_report(T)
        spectra.append(
            {
                "N": N,
                "method": T.method,
                "quadrature_error": T.error_estimate,
                "operator_norm": rep.operator_norm,
                "trace_partial": rep.trace_partial,
                "unitary_defect": rep.unitary_defect,
                "decay_fit": rep.decay_fit,
                "leading_singular_values": rep.singular_values[:10],
            }
        )
    last = spectra[-1]
    checks = {}
    if symbolic.bounded is not None:
        if symbolic.bounded.is_positive:
            checks["norm_bounded"] = bool(all(s["operator_norm"] <= UNBOUNDED_NORM for s in spectra))
        else:
            checks["norm_exceeds_threshold"] = bool(last["operator_norm"] > UNBOUNDED_NORM)
    if symbolic.trace is not None:
        checks["trace_match"] = bool(abs(last["trace_partial"] - symbolic.trace) < 1e-7)
    if symbolic.unitary_up_to_phase and q.is_radial():
        checks["unitary_defect_small"] = bool(last["unitary_defect"] < 1e-8)
    out = {
        "symbolic": {
            "bounded": symbolic.bounded.status if symbolic.bounded else None,
            "bounded_label": symbolic.bounded_label,
            "trace_class": symbolic.trace_class,
            "trace": symbolic.trace,
            "unitary_up_to_phase": symbolic.unitary_up_to_phase,
        },
        "spectra": spectra,
        "checks": checks,
        "all_checks_pass": all(checks.values()),
        "evidence_note": f"unbounded means operator norm above {UNBOUNDED_NORM:g} at the largest order; evidence, not proof",
    }
    if payload.get("projection"):
        N = int(orders[-1])
        out["projection_idempotence_defect"] = validate.projection_idempotence(N)
    return out


def _compare_prior(result: dict, prior: dict) -> dict:
    symbolic = result["symbolic"]
    pb = prior.get("bounded")
    prior_status = pb.get("status") if isinstance(pb, dict) else None
    cmp = {"bounded_matches": prior_status == (symbolic["bounded"].value if symbolic["bounded"] else None)}
    if prior.get("trace") is not None:
        tr = complex(*prior["trace"])
        cmp["trace_matches_oracle"] = bool(abs(result["spectra"][-1]["trace_partial"] - tr) < 1e-7)
    return cmp


def run_validate(payload: dict, opts: dict, instance: dict, against: str | None) -> dict | list:
    prior = None
    if against:
        prior_doc = load_instance(against)
        prior = prior_doc.get("result", prior_doc)
    results = []
    for i, (tag, q, phi0) in enumerate(_sweep_symbols(payload, instance)):
        if q.n != 1:
            raise InvalidInput("validate runs on one-dimensional symbols only")
        res = {**tag, **_validate_one(q, phi0, payload, opts)}
        if prior is not None:
            p = prior[i] if isinstance(prior, list) else prior
            res["against_prior"] = _compare_prior(res, p)
        results.append(res)
    return results if "sweep" in instance else results[0]


# ---------------------------------------------------------------------------
# driver


def _options(instance: dict, args: argparse.Namespace) -> dict:
    opts = dict(DEFAULTS)
    given = instance.get("options", {})
    if not isinstance(given, dict):
        raise InvalidInput("options must be an object")
    for key in DEFAULTS:
        if key in given:
            opts[key] = given[key]
        if getattr(args, key, None) is not None:
            opts[key] = getattr(args, key)
    try:
        opts["tol"] = float(opts["tol"])
        opts["seed"] = int(opts["seed"])
        opts["truncation"] = int(opts["truncation"])
    except (TypeError, ValueError):
        raise InvalidInput("options tol, seed and truncation must be numeric") from None
    if not opts["tol"] > 0 or opts["seed"] < 0:
        raise InvalidInput("tol must be positive and seed non-negative")
    return opts


def run(kind: str, instance_path: str, args: argparse.Namespace) -> tuple[int, dict | None]:
    """Run one subcommand; returns ``(exit_code, report)``."""
    try:
        instance = load_instance(instance_path)
        declared = instance.get("kind", kind)
        if declared != kind:
            raise InvalidInput(f"instance declares kind {declared!r} but subcommand is {kind!r}")
        opts = _options(instance, args)
        payload = instance.get("payload", {})
        if not isinstance(payload, dict):
            raise InvalidInput("payload must be an object")
        start = time.perf_counter()
        if kind == "weight":
            result = run_weight(payload, opts)
        elif kind == "lagrangian":
            result = run_lagrangian(payload, opts)
        elif kind == "map":
            result = run_map(payload, opts)
        elif kind == "fio":
            result = run_fio(payload, opts)
        elif kind == "toeplitz":
            result = run_toeplitz(payload, opts, instance)
        else:
            result = run_validate(payload, opts, instance, getattr(args, "against", None))
        report = {"schema_version": SCHEMA_VERSION, "kind": kind, "options": opts, "result": to_jsonable(result)}
        if getattr(args, "timing", False):
            report["timing_seconds"] = time.perf_counter() - start
        return EXIT_OK, report
    except InvalidInput as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID, None
    except NumericalFailure as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL, None


def render_text(report: dict) -> str:
    lines = [f"{report['kind']} report (schema {report['schema_version']})"]

    def walk(obj, prefix: str, depth: int):
        if isinstance(obj, dict):
            for k in sorted(obj):
                v = obj[k]
                if isinstance(v, (dict, list)) and not _is_leaf_list(v):
                    lines.append(f"{'  ' * depth}{k}:")
                    walk(v, prefix + k + ".", depth + 1)
                else:
                    lines.append(f"{'  ' * depth}{k}: {_short(v)}")
        elif isinstance(obj, list):
            for i, v in enumerate(obj):
                lines.append(f"{'  ' * depth}[{i}]")
                walk(v, prefix, depth + 1)
        else:
            lines.append(f"{'  ' * depth}{_short(obj)}")

    walk(report["result"], "", 1)
    return "\n".join(lines) + "\n"


def _is_leaf_list(v) -> bool:
    """Numbers, complex pairs and matrices print inline."""
    if not isinstance(v, list):
        return False
    flat = json.dumps(v)
    return "{" not in flat


def _short(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, list):
        text = json.dumps(v)
        return text if len(text) <= 120 else text[:117] + "..."
    return "null" if v is None else str(v)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toeplitz-positivity",
        description="Positivity of complex canonical maps and Gaussian Toeplitz operator verdicts.",
    )
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        p = sub.add_parser(kind, help=f"run the {kind} analysis on an instance file")
        p.add_argument("instance", help="path to the JSON instance file")
        p.add_argument("--tol", type=float, default=None, help="verdict tolerance (default 1e-9)")
        p.add_argument("--seed", type=int, default=None, help="seed for spot-check points (default 42)")
        p.add_argument("--truncation", type=int, default=None, help="truncation order N (default 40)")
        p.add_argument("--format", choices=("json", "text"), default="text")
        p.add_argument("--output", help="also write the JSON report to this path")
        p.add_argument("--timing", action="store_true", help="include wall-clock timing (breaks byte-determinism)")
        if kind == "validate":
            p.add_argument("--against", help="prior toeplitz report to compare with")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    code, report = run(args.kind, args.instance, args)
    if report is None:
        return code
    text = canonical_json(report)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text if args.format == "json" else render_text(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
