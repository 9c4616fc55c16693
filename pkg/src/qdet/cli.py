"""Command-line front end: matrix I/O, mode dispatch, JSON reports.

Every quantum-mode report embeds the classical oracle determinant, so each
run doubles as a regression test: a mismatch beyond the mode's tolerance
sets the ``disagreement`` flag and a nonzero exit code.

Exit codes: 0 success, 2 validation error, 3 verification or disagreement
failure, 4 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .antisym import verify_det_identity
from .errors import (
    MatrixParseError,
    QdetError,
    StateTooLargeError,
    ValidationError,
    VerificationError,
)
from .linalg import (
    LEVI_CIVITA_MAX_DIM,
    TWO_PI,
    DetValue,
    as_matrix,
    det_levi_civita,
    det_lu,
    haar_orthogonal,
    haar_unitary,
    operator_norm,
)
from .qde import PhaseEstimate, contraction_run, qde_run, sign_run
from .simulator import DEFAULT_QUBIT_CAP

MODES = ("qde", "sign", "contract", "verify", "oracle")

GENERATOR_USAGE = (
    "valid generator specs: haar-unitary:N | haar-orthogonal:N | "
    "diag-phase:N:k:t | scaled-identity:N:r:theta"
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_VERIFICATION = 3
EXIT_RESOURCE = 4


@dataclass
class RunConfig:
    mode: str
    matrix_path: str | None = None
    generator: str | None = None
    t: int = 3
    shots: int = 1000
    seed: int = 1
    output_path: str | None = None
    qubit_cap: int = DEFAULT_QUBIT_CAP
    verify_tolerance: float = 1e-10
    verify_n: int = 3
    verify_count: int = 50

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.mode == "sign":
            self.t = 1
        if self.mode in ("qde", "contract") and self.t < 1:
            raise ValidationError(f"mode {self.mode} needs t >= 1, got {self.t}")
        if self.shots < 1:
            raise ValidationError(f"shots must be positive, got {self.shots}")
        if self.mode != "verify" and self.matrix_path is None and self.generator is None:
            raise ValidationError(f"mode {self.mode} needs --matrix or --gen")

    def echo(self) -> dict:
        return {
            "mode": self.mode,
            "matrix": self.matrix_path,
            "gen": self.generator,
            "t": self.t,
            "shots": self.shots,
            "seed": self.seed,
            "qubit_cap": self.qubit_cap,
            "verify_tolerance": self.verify_tolerance,
            "verify_n": self.verify_n,
            "verify_count": self.verify_count,
        }


@dataclass
class RunReport:
    config: dict
    mode: str
    result: dict
    oracle_determinant: dict | None
    counters: dict | None
    disagreement: bool
    wall_time_ms: float = 0.0
    verify_failed: bool = field(default=False, repr=False)

    @property
    def exit_code(self) -> int:
        return EXIT_VERIFICATION if (self.disagreement or self.verify_failed) else EXIT_OK

    def to_json(self) -> str:
        body = {
            "config": self.config,
            "mode": self.mode,
            "result": self.result,
            "oracle_determinant": self.oracle_determinant,
            "counters": self.counters,
            "disagreement": self.disagreement,
            "wall_time_ms": self.wall_time_ms,
        }
        return dump_json(body)


def parse_matrix_file(path: str) -> np.ndarray:
    """Read the matrix JSON format {"n": int, "rows": [[[re, im], ...], ...]}."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise MatrixParseError(f"cannot read matrix file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MatrixParseError(f"malformed JSON in {path}: {exc}") from exc

    if not isinstance(doc, dict) or "n" not in doc or "rows" not in doc:
        raise MatrixParseError(f'{path}: expected an object with "n" and "rows"')
    n = doc["n"]
    rows = doc["rows"]
    if not isinstance(n, int) or n < 1:
        raise MatrixParseError(f'{path}: "n" must be a positive integer, got {n!r}')
    if not isinstance(rows, list) or len(rows) != n:
        raise MatrixParseError(f'{path}: expected {n} rows, got {len(rows) if isinstance(rows, list) else type(rows).__name__}')
    out = np.zeros((n, n), dtype=np.complex128)
    for j, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise MatrixParseError(f"{path}: row {j} has length {len(row) if isinstance(row, list) else '??'}, expected {n}")
        for i, entry in enumerate(row):
            if (
                not isinstance(entry, list)
                or len(entry) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in entry)
            ):
                raise MatrixParseError(f"{path}: row {j}, column {i}: expected a [re, im] number pair")
            out[j, i] = complex(entry[0], entry[1])
    return as_matrix(out)


def generator_spec(spec: str, seed: int) -> np.ndarray:
    """Build one of the named deterministic test matrices."""
    parts = spec.split(":")
    kind = parts[0]
    try:
        if kind == "haar-unitary" and len(parts) == 2:
            return haar_unitary(int(parts[1]), seed)
        if kind == "haar-orthogonal" and len(parts) == 2:
            return haar_orthogonal(int(parts[1]), seed)
        if kind == "diag-phase" and len(parts) == 4:
            n, k, t = int(parts[1]), int(parts[2]), int(parts[3])
            diag = np.ones(n, dtype=np.complex128)
            diag[0] = np.exp(2j * math.pi * k / (1 << t))
            return np.diag(diag)
        if kind == "scaled-identity" and len(parts) == 4:
            n = int(parts[1])
            r, theta = float(parts[2]), float(parts[3])
            return r * np.exp(1j * theta) * np.eye(n, dtype=np.complex128)
    except ValueError as exc:
        raise MatrixParseError(f"bad generator spec {spec!r}: {exc}; {GENERATOR_USAGE}") from exc
    raise MatrixParseError(f"unknown generator spec {spec!r}; {GENERATOR_USAGE}")


def load_matrix(config: RunConfig) -> np.ndarray:
    if config.matrix_path is not None:
        return parse_matrix_file(config.matrix_path)
    return generator_spec(config.generator, config.seed)


def run(config: RunConfig) -> RunReport:
    """Dispatch one configured run and assemble its self-checking report."""
    start = time.perf_counter()
    if config.mode == "qde":
        report = _run_qde(config)
    elif config.mode == "sign":
        report = _run_sign(config)
    elif config.mode == "contract":
        report = _run_contract(config)
    elif config.mode == "verify":
        report = _run_verify(config)
    else:
        report = _run_oracle(config)
    report.wall_time_ms = (time.perf_counter() - start) * 1e3
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8") as fh:
            fh.write(report.to_json() + "\n")
    return report


def _run_qde(config: RunConfig) -> RunReport:
    matrix = load_matrix(config)
    oracle = det_lu(matrix)
    result = qde_run(matrix, config.t, config.shots, config.seed, qubit_cap=config.qubit_cap)
    grid_step = TWO_PI / (1 << config.t)
    disagreement = _circular_distance(result.phase.phi_hat, oracle.phase) > grid_step + 1e-9
    return RunReport(
        config=config.echo(),
        mode="qde",
        result=_phase_payload(result.phase, exact=result.exact_distribution),
        oracle_determinant=_det_payload(oracle),
        counters=result.counters.as_dict(),
        disagreement=disagreement,
    )


def _run_sign(config: RunConfig) -> RunReport:
    matrix = load_matrix(config)
    oracle = det_lu(matrix)
    result = sign_run(matrix, config.shots, config.seed, qubit_cap=config.qubit_cap)
    oracle_sign = 1 if oracle.value.real >= 0 else -1
    return RunReport(
        config=config.echo(),
        mode="sign",
        result={
            "sign": result.sign,
            "shots": result.shots,
            "unanimous": result.unanimous,
            "majority_probability": result.majority_probability,
        },
        oracle_determinant=_det_payload(oracle),
        counters=result.counters.as_dict(),
        disagreement=result.sign != oracle_sign,
    )


def _run_contract(config: RunConfig) -> RunReport:
    matrix = load_matrix(config)
    oracle = det_lu(matrix)
    result = contraction_run(matrix, config.t, config.shots, config.seed, qubit_cap=config.qubit_cap)
    if result.no_accepted_shots:
        disagreement = False
    else:
        grid_step = TWO_PI / (1 << config.t)
        disagreement = _circular_distance(result.phase.phi_hat, oracle.phase) > grid_step + 1e-9
    payload = {
        "accepted": result.accepted,
        "attempted": result.attempted,
        "acceptance_rate": result.acceptance_rate,
        "predicted_acceptance": result.predicted_acceptance,
        "exact_acceptance": result.exact_acceptance,
        "magnitude_estimate": result.magnitude_estimate,
        "no_accepted_shots": result.no_accepted_shots,
    }
    payload.update(_phase_payload(result.phase, exact=result.exact_conditioned_distribution))
    return RunReport(
        config=config.echo(),
        mode="contract",
        result=payload,
        oracle_determinant=_det_payload(oracle),
        counters=result.counters.as_dict(),
        disagreement=disagreement,
    )


def _run_verify(config: RunConfig) -> RunReport:
    """Brute-force the determinant identity over four matrix classes."""
    n = config.verify_n
    rows = []
    max_residual = 0.0
    for class_index, matrix_class in enumerate(("unitary", "orthogonal", "contraction", "complex")):
        for i in range(config.verify_count):
            matrix = _verify_sample(matrix_class, n, config.seed, class_index, i)
            residual = verify_det_identity(matrix)
            max_residual = max(max_residual, residual)
            rows.append(
                {
                    "matrix_class": matrix_class,
                    "index": i,
                    "n": n,
                    "residual": residual,
                    "det": _complex_pair(det_levi_civita(matrix).value),
                }
            )
    passed = max_residual <= config.verify_tolerance
    return RunReport(
        config=config.echo(),
        mode="verify",
        result={
            "rows": rows,
            "max_residual": max_residual,
            "tolerance": config.verify_tolerance,
            "passed": passed,
        },
        oracle_determinant=None,
        counters=None,
        disagreement=False,
        verify_failed=not passed,
    )


def _verify_sample(matrix_class: str, n: int, seed: int, class_index: int, i: int) -> np.ndarray:
    if matrix_class == "unitary":
        return haar_unitary(n, _mix_seed(seed, class_index, i))
    if matrix_class == "orthogonal":
        return haar_orthogonal(n, _mix_seed(seed, class_index, i))
    rng = np.random.Generator(np.random.PCG64([seed & ((1 << 63) - 1), class_index, i]))
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    if matrix_class == "contraction":
        return z / (operator_norm(z) * 1.01)
    return z


def _mix_seed(seed: int, class_index: int, i: int) -> int:
    return (seed & ((1 << 32) - 1)) * 1_000_003 + class_index * 65_537 + i


def _run_oracle(config: RunConfig) -> RunReport:
    matrix = load_matrix(config)
    oracle = det_lu(matrix)
    n = matrix.shape[0]
    payload: dict = {"lu": _det_payload(oracle)}
    disagreement = False
    if n <= LEVI_CIVITA_MAX_DIM:
        other = det_levi_civita(matrix)
        payload["levi_civita"] = _det_payload(other)
        scale = max(1.0, abs(oracle.value))
        disagreement = abs(oracle.value - other.value) > 1e-9 * scale
    else:
        payload["levi_civita"] = None
    payload["agreement"] = not disagreement
    return RunReport(
        config=config.echo(),
        mode="oracle",
        result=payload,
        oracle_determinant=_det_payload(oracle),
        counters=None,
        disagreement=disagreement,
    )


def _phase_payload(phase: PhaseEstimate, exact: np.ndarray | None) -> dict:
    return {
        "k_prime": phase.k_prime,
        "t": phase.t,
        "phi_hat": phase.phi_hat,
        "shots": phase.shots,
        "histogram": {str(k): c for k, c in phase.histogram.items()},
        "frequencies": {str(k): f for k, f in phase.frequencies().items()},
        "exact_distribution": None if exact is None else [float(p) for p in exact],
    }


def _det_payload(det: DetValue) -> dict:
    return {
        "value": _complex_pair(det.value),
        "magnitude": det.magnitude,
        "phase": det.phase,
    }


def _complex_pair(value: complex) -> list[float]:
    return [float(value.real), float(value.imag)]


def _circular_distance(a: float, b: float) -> float:
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


def dump_json(obj) -> str:
    """Deterministic JSON with every float at 17 significant digits.

    The stdlib encoder offers no control over float formatting, and the
    reproducibility contract is byte-level, so the writer is explicit.
    """
    pieces: list[str] = []
    _write_json(obj, pieces, 0)
    return "".join(pieces)


def _write_json(obj, pieces: list[str], depth: int) -> None:
    pad = "  " * depth
    inner = "  " * (depth + 1)
    if obj is None:
        pieces.append("null")
    elif isinstance(obj, (bool, np.bool_)):
        pieces.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        pieces.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        pieces.append(format(float(obj), ".17g"))
    elif isinstance(obj, str):
        pieces.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            pieces.append("{}")
            return
        pieces.append("{\n")
        for idx, (key, value) in enumerate(obj.items()):
            pieces.append(f"{inner}{json.dumps(str(key))}: ")
            _write_json(value, pieces, depth + 1)
            pieces.append(",\n" if idx < len(obj) - 1 else "\n")
        pieces.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            pieces.append("[]")
            return
        pieces.append("[\n")
        for idx, value in enumerate(obj):
            pieces.append(inner)
            _write_json(value, pieces, depth + 1)
            pieces.append(",\n" if idx < len(obj) - 1 else "\n")
        pieces.append(pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdet",
        description="Determinant estimation by exact phase-estimation simulation, "
        "self-checked against classical determinant oracles.",
    )
    parser.add_argument("--mode", required=True, choices=MODES)
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--matrix", help="path to a matrix JSON file")
    source.add_argument("--gen", help=GENERATOR_USAGE)
    parser.add_argument("--t", type=int, default=3, help="phase-register qubits (default 3)")
    parser.add_argument("--shots", type=int, default=1000, help="measurement shots (default 1000)")
    parser.add_argument("--seed", type=int, default=1, help="RNG seed (default 1)")
    parser.add_argument("--out", help="also write the JSON report to this path")
    parser.add_argument("--qubit-cap", type=int, default=DEFAULT_QUBIT_CAP)
    parser.add_argument("--verify-tolerance", type=float, default=1e-10)
    parser.add_argument("--verify-n", type=int, default=3, help="matrix dimension for verify mode")
    parser.add_argument("--verify-count", type=int, default=50, help="matrices per class for verify mode")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = RunConfig(
            mode=args.mode,
            matrix_path=args.matrix,
            generator=args.gen,
            t=args.t,
            shots=args.shots,
            seed=args.seed,
            output_path=args.out,
            qubit_cap=args.qubit_cap,
            verify_tolerance=args.verify_tolerance,
            verify_n=args.verify_n,
            verify_count=args.verify_count,
        )
        report = run(config)
    except StateTooLargeError as exc:
        print(f"QDET-ERROR code=resource-cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except VerificationError as exc:
        print(f"QDET-ERROR code=verification: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION
    except (ValidationError, QdetError) as exc:
        print(f"QDET-ERROR code=validation: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    print(report.to_json())
    if report.disagreement:
        print("QDET-ERROR code=disagreement: quantum estimate disagrees with the oracle", file=sys.stderr)
    if report.verify_failed:
        print("QDET-ERROR code=verification: identity residual above tolerance", file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
