"""Config-driven experiment runner.

Configs are JSON with complex entries written as [re, im] pairs; reports are
JSON with every number serialized to 17 significant digits so repeated runs
are byte-identical apart from the timing block.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .algebra import StateOnMatrices
from .bifree import FaceFamily, biindependence_defect, face_pair, reduced_bifree
from .errors import ConfigError, InvalidInputError, UnsupportedStructureError
from .linalg import Tolerance
from .verify import (
    commutation_defect,
    moment_equivalence_report,
    nonfaithfulness_witness,
    pivot_compression_defect,
    state_kernel_probe,
    tensor_injectivity_dims,
    tensor_split_report,
)

__all__ = ["ExperimentConfig", "RunReport", "parse_config", "run", "main", "CHECK_NAMES"]

CHECK_NAMES = (
    "biindependence",
    "commutation",
    "witness",
    "vh_compression",
    "tensor_injectivity",
    "thm32_iso",
    "kernel_probe",
    "corollary",
)


@dataclass
class FaceConfig:
    left_generators: list
    right_generators: list
    density: np.ndarray | None
    product_split: tuple[int, int] | None


@dataclass
class ExperimentConfig:
    faces: list[FaceConfig]
    truncation: int
    word_len_max: int
    checks: list[str]
    tol: Tolerance
    seed: int
    ambient_density: np.ndarray | None = None
    witness_params: dict = field(default_factory=dict)
    vh_params: dict = field(default_factory=dict)
    expected: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    digest: str = ""


def _parse_matrix(obj, where, problems):
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError):
        problems.append(f"{where}: not a nested list of [re, im] pairs")
        return None
    if arr.ndim != 3 or arr.shape[2] != 2:
        problems.append(f"{where}: entries must be [re, im] pairs")
        return None
    if arr.shape[0] != arr.shape[1]:
        problems.append(f"{where}: matrix is {arr.shape[0]}x{arr.shape[1]}, not square")
        return None
    return arr[..., 0] + 1j * arr[..., 1]


def _validate_density(rho, where, problems):
    if rho is None:
        return None
    if np.linalg.norm(rho - rho.conj().T) > 1e-9:
        problems.append(f"{where}: density is not Hermitian")
        return None
    eigs = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    if eigs.min() < -1e-9:
        problems.append(f"{where}: density has negative eigenvalue {eigs.min():.6g}")
        return None
    tr = np.trace(rho).real
    if abs(tr - 1.0) > 1e-9:
        problems.append(f"{where}: trace != 1 (got {tr:.12g})")
        return None
    return rho


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a config, reporting every problem found at once."""
    problems: list[str] = []
    warnings: list[str] = []
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"not valid JSON: {exc}"]) from exc
    if not isinstance(raw, dict):
        raise ConfigError(["top level must be an object"])

    known = {
        "faces", "truncation", "word_len_max", "checks", "tolerance", "seed",
        "ambient_density", "witness", "vh_compression", "expected",
    }
    for key in raw:
        if key not in known:
            problems.append(f"unknown top-level key {key!r}")

    faces: list[FaceConfig] = []
    raw_faces = raw.get("faces")
    if not isinstance(raw_faces, list) or not raw_faces:
        problems.append("'faces' must be a non-empty list")
        raw_faces = []
    for k, rf in enumerate(raw_faces):
        if not isinstance(rf, dict):
            problems.append(f"faces[{k}]: must be an object")
            continue
        gens_l = [
            m
            for idx, g in enumerate(rf.get("left_generators", []))
            if (m := _parse_matrix(g, f"faces[{k}].left_generators[{idx}]", problems)) is not None
        ]
        gens_r = [
            m
            for idx, g in enumerate(rf.get("right_generators", []))
            if (m := _parse_matrix(g, f"faces[{k}].right_generators[{idx}]", problems)) is not None
        ]
        density = None
        if "density" in rf:
            density = _parse_matrix(rf["density"], f"faces[{k}].density", problems)
            density = _validate_density(density, f"faces[{k}].density", problems)
        split = None
        if "product_split" in rf:
            sp = rf["product_split"]
            if not (isinstance(sp, list) and len(sp) == 2 and all(isinstance(x, int) for x in sp)):
                problems.append(f"faces[{k}].product_split: must be a pair of ints")
            else:
                split = (sp[0], sp[1])
        dims = {m.shape[0] for m in gens_l + gens_r} | ({density.shape[0]} if density is not None else set())
        if len(dims) > 1:
            problems.append(f"faces[{k}]: inconsistent matrix dimensions {sorted(dims)}")
        faces.append(FaceConfig(gens_l, gens_r, density, split))

    ambient_density = None
    if "ambient_density" in raw:
        ambient_density = _parse_matrix(raw["ambient_density"], "ambient_density", problems)
        ambient_density = _validate_density(ambient_density, "ambient_density", problems)
    for k, f in enumerate(faces):
        if f.density is None and ambient_density is None:
            problems.append(f"faces[{k}]: no density given and no ambient_density to inherit")

    truncation = raw.get("truncation", 4)
    word_len_max = raw.get("word_len_max", truncation if isinstance(truncation, int) else 4)
    if not isinstance(truncation, int) or truncation < 0:
        problems.append("'truncation' must be a non-negative integer")
    if not isinstance(word_len_max, int) or word_len_max < 0:
        problems.append("'word_len_max' must be a non-negative integer")
    if isinstance(truncation, int) and isinstance(word_len_max, int) and truncation < word_len_max:
        warnings.append(
            f"truncation {truncation} below word_len_max {word_len_max}: long moments are truncated"
        )

    checks = raw.get("checks")
    if not isinstance(checks, list) or not checks:
        problems.append("'checks' must be a non-empty list")
        checks = []
    for c in checks:
        if c not in CHECK_NAMES:
            problems.append(f"unknown check {c!r}; choose from {', '.join(CHECK_NAMES)}")

    tol_raw = raw.get("tolerance", {})
    if not isinstance(tol_raw, dict):
        problems.append("'tolerance' must be an object")
        tol_raw = {}
    try:
        tol = Tolerance(
            eq_tol=float(tol_raw.get("eq_tol", 1e-9)),
            rank_tol=float(tol_raw.get("rank_tol", 1e-10)),
        )
    except (InvalidInputError, TypeError, ValueError):
        problems.append("'tolerance' values must be positive numbers")
        tol = Tolerance()

    seed = raw.get("seed", 0)
    if not isinstance(seed, int):
        problems.append("'seed' must be an integer")
        seed = 0

    witness_params = raw.get("witness", {})
    vh_params = raw.get("vh_compression", {})
    expected = raw.get("expected", {})
    for block, name in ((witness_params, "witness"), (vh_params, "vh_compression"), (expected, "expected")):
        if not isinstance(block, dict):
            problems.append(f"'{name}' must be an object")

    if problems:
        raise ConfigError(problems)
    return ExperimentConfig(
        faces=faces,
        truncation=truncation,
        word_len_max=word_len_max,
        checks=list(checks),
        tol=tol,
        seed=seed,
        ambient_density=ambient_density,
        witness_params=witness_params if isinstance(witness_params, dict) else {},
        vh_params=vh_params if isinstance(vh_params, dict) else {},
        expected=expected if isinstance(expected, dict) else {},
        warnings=warnings,
        digest=hashlib.sha256(text.encode()).hexdigest(),
    )


@dataclass
class RunReport:
    provenance: dict
    checks: list[dict]
    timing: dict
    exit_status: int

    def to_dict(self) -> dict:
        return {
            "provenance": self.provenance,
            "checks": self.checks,
            "timing": self.timing,
            "exit_status": self.exit_status,
        }

    def to_json(self) -> str:
        return _emit_json(self.to_dict()) + "\n"


def _fmt_number(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _emit_json(obj, indent: int = 0) -> str:
    """Deterministic JSON with floats at 17 significant digits."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, float, np.integer, np.floating)):
        return _fmt_number(obj)
    if isinstance(obj, complex):
        return f"[{_fmt_number(obj.real)}, {_fmt_number(obj.imag)}]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        body = ",\n".join(inner + _emit_json(v, indent + 1) for v in obj)
        return "[\n" + body + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        body = ",\n".join(
            f"{inner}{json.dumps(str(k))}: {_emit_json(v, indent + 1)}" for k, v in obj.items()
        )
        return "{\n" + body + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _word_str(word) -> str:
    return " ".join(f"{side}[{face}]#{g}" for side, face, g in word) if word else "1"


def _build_family(config: ExperimentConfig) -> FaceFamily:
    pairs = []
    for i, f in enumerate(config.faces):
        density = f.density if f.density is not None else config.ambient_density
        pairs.append(
            face_pair(f.left_generators, f.right_generators, density, index=i, tol=config.tol)
        )
    return FaceFamily(tuple(pairs))


def _shared_density(config: ExperimentConfig):
    if config.ambient_density is not None:
        return config.ambient_density
    first = config.faces[0].density
    for f in config.faces:
        if f.density is None or f.density.shape != first.shape or not np.allclose(f.density, first):
            raise InvalidInputError(
                "this check needs one state on a common ambient algebra: give "
                "'ambient_density' or identical per-face densities"
            )
    return first


def _pick_element(spec, generators, where):
    """A config element is a generator index or an inline matrix literal."""
    if isinstance(spec, int):
        if not 0 <= spec < len(generators):
            raise InvalidInputError(f"{where}: generator index {spec} out of range")
        return generators[spec]
    problems: list[str] = []
    mat = _parse_matrix(spec, where, problems)
    if problems:
        raise InvalidInputError("; ".join(problems))
    return mat


def _check_commutation(config, family):
    defects = [commutation_defect(p) for p in family.pairs]
    return {"defects": defects, "max_defect": max(defects) if defects else 0.0}


def _check_biindependence(config, family):
    gens = [(f.left_generators, f.right_generators) for f in config.faces]
    report = biindependence_defect(
        gens,
        _shared_density(config),
        config.truncation,
        config.word_len_max,
        config.tol,
        seed=config.seed,
    )
    return {
        "max_defect": report.max_defect,
        "worst_word": _word_str(report.worst_word),
        "words_compared": report.words_compared,
        "biindependent": report.biindependent,
    }


def _check_witness(config, family):
    p = config.witness_params
    face_i = p.get("face_i", 0)
    face_j = p.get("face_j", (face_i + 1) % len(family.pairs))
    pair_i = family.pairs[face_i]
    pair_j = family.pairs[face_j]
    a_l = _pick_element(p.get("a_l", 0), pair_i.left.generators, "witness.a_l")
    a_r = _pick_element(p.get("a_r", 0), pair_i.right.generators, "witness.a_r")
    b_side = p.get("b_side", "l")
    side_gens = pair_j.left.generators if b_side == "l" else pair_j.right.generators
    b = _pick_element(p.get("b", 0), side_gens, "witness.b")
    centered = False
    val = pair_j.state(b)
    if abs(val) > config.tol.eq_tol:
        b = b - val * np.eye(pair_j.ambient_dim)
        centered = True
    report = nonfaithfulness_witness(
        family, config.truncation, face_i, a_l, a_r, face_j, b, b_side, config.tol
    )
    return {
        "vacuum_norm": report.vacuum_norm,
        "witness_norm_lower": report.witness_norm_lower,
        "verdict": report.verdict,
        "witness_description": report.witness_description,
        "b_auto_centered": centered,
    }


def _check_vh_compression(config, family):
    p = config.vh_params
    face_i = p.get("face_i", 0)
    face_j = p.get("face_j", (face_i + 1) % len(family.pairs))
    defect = pivot_compression_defect(
        family, max(config.truncation, 3), face_i, face_j, tol=config.tol
    )
    return {"defect": defect, "face_i": face_i, "face_j": face_j}


def _check_tensor_injectivity(config, family):
    rows = []
    for pair in family.pairs:
        rep = tensor_injectivity_dims(pair, config.tol)
        rows.append(
            {
                "dim_kron": rep.dim_kron,
                "dim_products": rep.dim_products,
                "injective": rep.injective,
            }
        )
    return {"faces": rows, "all_injective": all(r["injective"] for r in rows)}


def _check_thm32_iso(config, family):
    report = tensor_split_report(family, config.truncation, config.word_len_max, config.tol)
    return {
        "max_moment_defect": report.max_moment_defect,
        "words_compared": report.words_compared,
        "dims": list(report.dims),
        "verdict": report.verdict,
        "worst_word": _word_str(report.worst_word),
    }


def _check_kernel_probe(config, family):
    depth = max(config.truncation, config.word_len_max + 1)
    prod = reduced_bifree(family, depth, config.tol)
    report = state_kernel_probe(prod, config.word_len_max, config.tol)
    out = {
        "min_ratio": report.min_ratio,
        "words_compared": report.words_compared,
        "span_dim": report.span_dim,
        "norm_trunc_len": report.norm_trunc_len,
        "witness_found": report.witness is not None,
    }
    if report.witness is not None:
        out["witness"] = [
            {"word": _word_str(w), "coefficient": c} for w, c in report.witness
        ]
    return out


def _check_corollary(config, family):
    report = moment_equivalence_report(
        family,
        config.truncation,
        config.word_len_max,
        ambient_density=config.ambient_density,
        tol=config.tol,
    )
    return {
        "max_moment_defect": report.max_moment_defect,
        "words_compared": report.words_compared,
        "dims": list(report.dims),
        "verdict": report.verdict,
        "worst_word": _word_str(report.worst_word),
    }


_CHECKS = {
    "biindependence": _check_biindependence,
    "commutation": _check_commutation,
    "witness": _check_witness,
    "vh_compression": _check_vh_compression,
    "tensor_injectivity": _check_tensor_injectivity,
    "thm32_iso": _check_thm32_iso,
    "kernel_probe": _check_kernel_probe,
    "corollary": _check_corollary,
}


def _expectation_met(expected: dict, result: dict) -> bool:
    for key, want in expected.items():
        if key.endswith("_below"):
            field_name = key[: -len("_below")]
            if field_name not in result or not result[field_name] <= want:
                return False
        elif key.endswith("_above"):
            field_name = key[: -len("_above")]
            if field_name not in result or not result[field_name] >= want:
                return False
        elif isinstance(want, list) and len(want) == 2 and all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in want
        ):
            if key not in result or abs(result[key] - want[0]) > want[1]:
                return False
        else:
            if key not in result or result[key] != want:
                return False
    return True


def run(config: ExperimentConfig) -> RunReport:
    """Execute the requested checks in order; failures never abort later checks."""
    family = _build_family(config)
    warnings_out = list(config.warnings)
    if not family.nontrivial:
        warnings_out.append(
            "family is trivial: fewer than two pairs, or a pair generating only scalars"
        )
    checks_out: list[dict] = []
    timing: dict[str, float] = {}
    has_expectations = False
    all_expected_ok = True
    any_error = False

    for name in config.checks:
        entry: dict = {"name": name}
        start = time.perf_counter()
        try:
            result = _CHECKS[name](config, family)
            entry["status"] = "ok"
            entry["result"] = result
        except (InvalidInputError, UnsupportedStructureError, ConfigError) as exc:
            entry["status"] = "error"
            entry["error"] = {"type": type(exc).__name__, "message": str(exc)}
            any_error = True
        timing[name] = time.perf_counter() - start
        if name in config.expected:
            has_expectations = True
            ok = entry["status"] == "ok" and _expectation_met(
                config.expected[name], entry["result"]
            )
            entry["expected_ok"] = ok
            all_expected_ok = all_expected_ok and ok
        checks_out.append(entry)

    if has_expectations:
        exit_status = 0 if all_expected_ok else 1
    else:
        exit_status = 1 if any_error else 0

    provenance = {
        "config_digest": config.digest,
        "truncation": config.truncation,
        "word_len_max": config.word_len_max,
        "eq_tol": config.tol.eq_tol,
        "rank_tol": config.tol.rank_tol,
        "seed": config.seed,
        "warnings": warnings_out,
    }
    return RunReport(provenance, checks_out, timing, exit_status)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="bifock",
        description="Run verification checks on a family of pairs of faces.",
    )
    parser.add_argument("config", help="path to a JSON experiment config")
    parser.add_argument("--truncation", type=int, help="override the truncation length")
    parser.add_argument("--word-len", type=int, help="override word_len_max")
    parser.add_argument("--tol", type=float, help="override eq_tol")
    parser.add_argument(
        "--check", action="append", default=None, help="run this check (repeatable)"
    )
    parser.add_argument("--out", help="write the JSON report here")
    parser.add_argument("--seed", type=int, help="override the sampling seed")
    args = parser.parse_args(argv)

    with open(args.config, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        config = parse_config(text)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 2

    if args.truncation is not None:
        config.truncation = args.truncation
    if args.word_len is not None:
        config.word_len_max = args.word_len
    if args.tol is not None:
        config.tol = Tolerance(eq_tol=args.tol, rank_tol=config.tol.rank_tol)
    if args.check:
        bad = [c for c in args.check if c not in CHECK_NAMES]
        if bad:
            print(f"config error: unknown checks {bad}", file=sys.stderr)
            return 2
        config.checks = list(args.check)
    if args.seed is not None:
        config.seed = args.seed

    report = run(config)
    text_out = report.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text_out)
    else:
        sys.stdout.write(text_out)
    return report.exit_status


if __name__ == "__main__":
    sys.exit(main())
