"""Command-line entry point: ``drivenbs <command> [options]``.

Every command is a pure function of its manifest. Options may be given as
flags or in a JSON file passed with ``--manifest`` (keys are the long option
names with dashes replaced by underscores); the file wins on conflict.

Random streams derived from ``--seed``: stream 0 draws network angles,
stream 1 the Haar unitary, stream 2 samples or Monte Carlo shots.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import fock, gauss, montecarlo, source
from .errors import ConfigurationError, DrivenBSError
from .linalg import haar_unitary
from .network import GenerationNetwork, evolution_matrix, random_network
from .rng import RandomSeed
from .source import PdcSource, Scheme, SchemeParams

NETWORK_STREAM, UNITARY_STREAM, SAMPLE_STREAM = 0, 1, 2

# keys that only say where output goes; excluded from the manifest hash
_OUTPUT_KEYS = {"out", "manifest", "format"}

DEFAULTS = {
    "common": {"seed": 0, "out": "-", "format": "csv", "manifest": None},
    "range": {"n": None, "n_min": 1, "n_max": 20, "m_rule": "n2", "k_rule": "n"},
    "rates": {"lambda_rule": "opt"},
    "sample": {"m": 2, "k": 1, "theta": None, "network": None, "unitary": "haar",
               "input": None, "inject": None, "shots": 1000},
    "montecarlo": {"scheme": "DBS", "n": 2, "m": None, "k": None, "lambda_rule": "opt",
                   "shots": 10**6, "number_resolving": False},
    "gauss": {"m": 256, "n": 3, "k": 4, "draws": 500, "selection": "mixed", "unitary": "haar"},
}

COMMAND_GROUPS = {
    "rates": ("common", "range", "rates"),
    "lambda": ("common", "range"),
    "snr": ("common", "range"),
    "bounds": ("common", "range"),
    "sample": ("common", "sample"),
    "montecarlo": ("common", "montecarlo"),
    "gauss": ("common", "gauss"),
}


class UsageError(ConfigurationError):
    pass


def _warn(msg: str) -> None:
    print(f"drivenbs: warning: {msg}", file=sys.stderr)


def _build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    parser = argparse.ArgumentParser(prog="drivenbs", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=S)
    common.add_argument("--out", default=S, help="output path, '-' for stdout")
    common.add_argument("--format", choices=["csv", "json"], default=S)
    common.add_argument("--manifest", default=S, help="JSON manifest file")

    rng_opts = argparse.ArgumentParser(add_help=False)
    rng_opts.add_argument("--n", type=int, default=S, help="single photon number")
    rng_opts.add_argument("--n-min", type=int, default=S)
    rng_opts.add_argument("--n-max", type=int, default=S)
    rng_opts.add_argument("--m-rule", default=S, help="'n2' or an explicit mode count")
    rng_opts.add_argument("--k-rule", default=S, help="'n', '1' or an explicit layer count")

    rates = sub.add_parser("rates", parents=[common, rng_opts], help="success probabilities")
    rates.add_argument("--lambda-rule", default=S,
                       help="'opt', a fixed squeezing value, or 'opt@N' (optimum for n=N)")
    sub.add_parser("lambda", parents=[common, rng_opts], help="optimal squeezing")
    sub.add_parser("snr", parents=[common, rng_opts], help="heralding SNR at the optimum")
    sub.add_parser("bounds", parents=[common, rng_opts], help="SNR bounds and asymptotes")

    sample = sub.add_parser("sample", parents=[common], help="exact distribution and samples")
    sample.add_argument("--m", type=int, default=S)
    sample.add_argument("--k", type=int, default=S)
    sample.add_argument("--theta", type=float, default=S, help="uniform beam-splitter angle")
    sample.add_argument("--network", default=S, help="network JSON file")
    sample.add_argument("--unitary", choices=["haar", "identity"], default=S)
    sample.add_argument("--input", default=S, help="dash-separated input occupation (length k*m)")
    sample.add_argument("--inject", default=S, help="comma-separated layer:mode injection points")
    sample.add_argument("--shots", type=int, default=S)

    mc = sub.add_parser("montecarlo", parents=[common], help="Monte Carlo source simulation")
    mc.add_argument("--scheme", choices=[s.value for s in Scheme], default=S)
    mc.add_argument("--n", type=int, default=S)
    mc.add_argument("--m", type=int, default=S)
    mc.add_argument("--k", type=int, default=S)
    mc.add_argument("--lambda-rule", default=S, help="'opt' or a fixed squeezing value")
    mc.add_argument("--shots", type=int, default=S)
    mc.add_argument("--number-resolving", action="store_true", default=S)

    g = sub.add_parser("gauss", parents=[common], help="Gaussian element diagnostics")
    g.add_argument("--m", type=int, default=S)
    g.add_argument("--n", type=int, default=S)
    g.add_argument("--k", type=int, default=S)
    g.add_argument("--draws", type=int, default=S)
    g.add_argument("--selection", choices=list(gauss.SELECTIONS), default=S)
    g.add_argument("--unitary", choices=["haar", "identity"], default=S)
    return parser


def resolve_manifest(argv=None) -> dict:
    """Merge defaults, flags and an optional manifest file into one dict."""
    ns = vars(_build_parser().parse_args(argv))
    command = ns.pop("command")
    manifest = {"command": command}
    for group in COMMAND_GROUPS[command]:
        manifest.update(DEFAULTS[group])
    manifest.update(ns)

    path = ns.get("manifest")
    if path:
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read manifest {path}: {exc}") from None
        if doc.get("command", command) != command:
            raise UsageError(f"manifest is for '{doc['command']}', not '{command}'")
        for key, value in doc.items():
            if key == "command":
                continue
            if key not in manifest:
                raise UsageError(f"unknown manifest key {key!r} for '{command}'")
            if key in ns and ns[key] != value:
                _warn(f"manifest value {key}={value!r} overrides flag value {ns[key]!r}")
            manifest[key] = value
    return manifest


def manifest_digest(manifest: dict) -> str:
    body = {k: v for k, v in manifest.items() if k not in _OUTPUT_KEYS}
    blob = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def render_csv(header, rows, digest: str) -> str:
    buf = io.StringIO()
    buf.write(f"# manifest-sha256: {digest}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def render_table(manifest, header, rows) -> str:
    digest = manifest_digest(manifest)
    if manifest["format"] == "json":
        doc = {"manifest_sha256": digest, "manifest": manifest,
               "rows": [dict(zip(header, row)) for row in rows]}
        return _dump_json(doc)
    return render_csv(header, rows, digest)


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _dump_json(doc) -> str:
    return json.dumps(_clean(doc), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _write(path: str, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


# --- parameter rules ------------------------------------------------------

def _n_values(mf) -> list[int]:
    if mf.get("n") is not None:
        lo = hi = int(mf["n"])
    else:
        lo, hi = int(mf["n_min"]), int(mf["n_max"])
    if lo < 1 or hi < lo:
        raise UsageError(f"invalid photon-number range {lo}..{hi}")
    return list(range(lo, hi + 1))


def _rule(value, n: int, symbolic: dict[str, int], name: str) -> int:
    key = str(value)
    if key in symbolic:
        return symbolic[key]
    try:
        v = int(key)
    except ValueError:
        raise UsageError(f"{name} must be one of {sorted(symbolic)} or an integer, got {value!r}") from None
    if v < 1:
        raise UsageError(f"{name} must be positive, got {v}")
    return v


def scheme_pair(mf, n: int) -> tuple[SchemeParams, SchemeParams]:
    m = _rule(mf["m_rule"], n, {"n2": n * n}, "m-rule")
    k = _rule(mf["k_rule"], n, {"n": n, "1": 1}, "k-rule")
    return SchemeParams(n, m, 1, Scheme.SBS), SchemeParams(n, m, k, Scheme.DBS)


def _fixed_lambda(rule: str, mf, scheme_index: int) -> float | None:
    rule = str(rule)
    if rule == "opt":
        return None
    if rule.startswith("opt@"):
        try:
            anchor = int(rule[4:])
        except ValueError:
            raise UsageError(f"bad lambda rule {rule!r}") from None
        if anchor < 1:
            raise UsageError(f"bad lambda rule {rule!r}")
        return source.lambda_opt(scheme_pair(mf, anchor)[scheme_index])
    try:
        return PdcSource(float(rule)).lam
    except ValueError:
        raise UsageError(f"bad lambda rule {rule!r}") from None


# --- commands -------------------------------------------------------------

def cmd_rates(mf) -> dict[str, str]:
    rows = []
    for n in _n_values(mf):
        for params in scheme_pair(mf, n):
            lam = source.lambda_opt(params)
            rows.append((n, params.scheme.value, lam, source.success_probability(params), "optimal"))
    if str(mf["lambda_rule"]) != "opt":
        for i, label in enumerate(("SBS", "DBS")):
            lam = _fixed_lambda(mf["lambda_rule"], mf, i)
            for n in _n_values(mf):
                params = scheme_pair(mf, n)[i]
                rows.append((n, label, lam, source.success_probability(params, lam), "fixed"))
    header = ("n", "scheme", "lambda", "p_success", "curve")
    return {mf["out"]: render_table(mf, header, rows)}


def cmd_lambda(mf) -> dict[str, str]:
    rows = [(n, p.scheme.value, source.lambda_opt(p))
            for n in _n_values(mf) for p in scheme_pair(mf, n)]
    return {mf["out"]: render_table(mf, ("n", "scheme", "lambda_opt"), rows)}


def cmd_snr(mf) -> dict[str, str]:
    rows = [(n, p.scheme.value, source.snr(p))
            for n in _n_values(mf) for p in scheme_pair(mf, n)]
    return {mf["out"]: render_table(mf, ("n", "scheme", "snr"), rows)}


def cmd_bounds(mf) -> dict[str, str]:
    rows = []
    for n in _n_values(mf):
        sbs, dbs = scheme_pair(mf, n)
        p_sbs = source.success_probability(sbs)
        p_dbs = source.success_probability(dbs)
        asym_e = source.asymptotic_pmax(n, math.e)
        rows.append((n, source.min_modes_for_unit_snr(n), source.min_layers_for_unit_snr(n),
                     source.asymptotic_pmax(n, 1.0), asym_e, p_sbs, p_dbs,
                     p_dbs / p_sbs if p_sbs else math.nan, p_sbs / asym_e))
    header = ("n", "min_m", "min_k", "asymptote_b1", "asymptote_be",
              "exact_pmax_sbs", "exact_pmax_dbs", "ratio", "sbs_over_asymptote_be")
    return {mf["out"]: render_table(mf, header, rows)}


def _unitary(kind: str, m: int, seed: RandomSeed) -> np.ndarray:
    if kind == "identity":
        return np.eye(m, dtype=np.complex128)
    return haar_unitary(m, seed.substream(UNITARY_STREAM))


def _sample_network(mf, seed: RandomSeed) -> GenerationNetwork:
    if mf["network"]:
        return GenerationNetwork.load(mf["network"])
    if mf["theta"] is not None:
        return GenerationNetwork.uniform(int(mf["m"]), int(mf["k"]), float(mf["theta"]))
    return random_network(int(mf["m"]), int(mf["k"]), seed.substream(NETWORK_STREAM))


def _sidecar_paths(out: str) -> tuple[Path, Path]:
    p = Path(out)
    stem = p.with_suffix("") if p.suffix else p
    return Path(f"{stem}.shots.csv"), Path(f"{stem}.manifest.json")


def cmd_sample(mf) -> dict[str, str]:
    if mf["out"] in (None, "-"):
        raise UsageError("sample writes three files; give --out")
    if mf["format"] != "csv":
        raise UsageError("sample only writes csv")
    seed = RandomSeed(int(mf["seed"]))
    net = _sample_network(mf, seed)
    ev = evolution_matrix(net, _unitary(mf["unitary"], net.m, seed))
    if mf["input"] and mf["inject"]:
        raise UsageError("give either --input or --inject, not both")
    if mf["input"]:
        s_in = fock.parse_occupation(mf["input"])
    elif mf["inject"]:
        try:
            pos = [tuple(int(x) for x in item.split(":")) for item in str(mf["inject"]).split(",")]
        except ValueError:
            raise UsageError(f"bad injection list {mf['inject']!r}") from None
        s_in = fock.input_from_positions(ev, pos)
    else:
        raise UsageError("sample needs --input or --inject")
    shots = int(mf["shots"])
    if shots < 0:
        raise UsageError("shots must be >= 0")

    dist = fock.full_distribution(ev, s_in)
    draws = fock.sample_outcomes(ev, s_in, shots, seed.substream(SAMPLE_STREAM), dist=dist)
    digest = manifest_digest(mf)
    dist_rows = [(fock.format_occupation(o), float(p)) for o, p in zip(dist.outcomes, dist.probabilities)]
    shot_rows = [(i, fock.format_occupation(o)) for i, o in enumerate(draws)]
    shots_path, sidecar_path = _sidecar_paths(mf["out"])
    sidecar = {"manifest": mf, "manifest_sha256": digest, "network": net.to_dict(),
               "input": fock.format_occupation(s_in), "normalizer": dist.normalizer}
    return {
        mf["out"]: render_csv(("occupation", "probability"), dist_rows, digest),
        str(shots_path): render_csv(("shot", "occupation"), shot_rows, digest),
        str(sidecar_path): _dump_json(sidecar),
    }


def cmd_montecarlo(mf) -> dict[str, str]:
    # always JSON; --format is ignored
    shots = int(mf["shots"])
    if shots < 1:
        raise UsageError(f"shots must be >= 1, got {shots}")
    n = int(mf["n"])
    scheme = Scheme(mf["scheme"])
    m = int(mf["m"]) if mf["m"] is not None else n * n
    k = int(mf["k"]) if mf["k"] is not None else (n if scheme is Scheme.DBS else 1)
    params = SchemeParams(n, m, k, scheme)
    rule = str(mf["lambda_rule"])
    lam = source.lambda_opt(params) if rule == "opt" else PdcSource(float(rule)).lam
    seed = RandomSeed(int(mf["seed"]), SAMPLE_STREAM)
    summary = montecarlo.simulate_trials(params, lam, shots, seed,
                                         number_resolving=bool(mf["number_resolving"]))
    analytic = {
        "p_s": source.success_probability(params, lam),
        "snr": source.snr(params, lam) if not mf["number_resolving"] else math.inf,
        "p_herald": montecarlo.herald_probability(params, lam),
        "noise_fraction": source.noise_probability(params, lam),
    }
    doc = summary.to_dict()

    def z(emp, err, exact):
        if emp is None or err is None or err == 0 or not math.isfinite(exact):
            return None
        return (emp - exact) / err

    doc.update({
        "manifest_sha256": manifest_digest(mf),
        "analytic": analytic,
        "z": {"p_s": z(doc["p_s"], doc["p_s_err"], analytic["p_s"]),
              "snr": z(doc["snr"], doc["snr_err"], analytic["snr"])},
    })
    return {mf["out"]: _dump_json(doc)}


def cmd_gauss(mf) -> dict[str, str]:
    seed = RandomSeed(int(mf["seed"]))
    m, k = int(mf["m"]), int(mf["k"])
    net = random_network(m, k, seed.substream(NETWORK_STREAM))
    ev = evolution_matrix(net, _unitary(mf["unitary"], m, seed))
    reports = gauss.submatrix_element_test(ev, int(mf["n"]), int(mf["draws"]),
                                           seed.substream(SAMPLE_STREAM), mf["selection"])
    rows = [(r.component, r.statistic, r.pvalue, r.samples) for r in reports]
    return {mf["out"]: render_table(mf, ("component", "statistic", "pvalue", "samples"), rows)}


COMMANDS = {
    "rates": cmd_rates, "lambda": cmd_lambda, "snr": cmd_snr, "bounds": cmd_bounds,
    "sample": cmd_sample, "montecarlo": cmd_montecarlo, "gauss": cmd_gauss,
}


def run(argv=None) -> dict[str, str]:
    """Resolve the manifest, run the command, and return {path: contents}."""
    mf = resolve_manifest(argv)
    return COMMANDS[mf["command"]](mf)


def main(argv=None) -> int:
    try:
        outputs = run(argv)
        for path, text in outputs.items():
            _write(path, text)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0)
    except DrivenBSError as exc:
        print(f"drivenbs: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, KeyError) as exc:
        print(f"drivenbs: error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"drivenbs: numeric failure: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
