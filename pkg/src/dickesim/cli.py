"""Command-line harness: state preparation, shot sampling, exact
success-probability queries, decompositions, fidelity sweeps, and the analytic
verification suite.

Exit codes: 0 success, 2 usage error, 3 check failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass
from typing import Any

import numpy as np

from . import __version__
from .checks import run_all_checks
from .dicke import (
    BipartitionParams,
    decompose_source,
    decompose_target,
    dicke_state,
    max_success_probability,
    w_state,
)
from .gates import format_circuit
from .noise import FidelityMode, NoiseConfig, fidelity_sweep
from .protocols import (
    ProtocolStats,
    build_d4_prep_circuit,
    build_w3_circuit,
    run_protocol_stats,
)

_MODES = {
    "pre-measurement": FidelityMode.PRE_MEASUREMENT,
    "post-selected": FidelityMode.POST_SELECTED_SUCCESS,
}


@dataclass(frozen=True)
class Histogram:
    """Shot counts per measured bitstring, sorted by bitstring."""

    total_shots: int
    rows: tuple[tuple[str, int, float], ...]

    @classmethod
    def from_stats(cls, stats: ProtocolStats) -> "Histogram":
        rows = tuple(
            (bits, count, count / stats.shots)
            for bits, count in sorted(stats.counts.items())
        )
        if sum(count for _, count, _ in rows) != stats.shots:
            raise ValueError("histogram counts do not sum to the shot total")
        return cls(total_shots=stats.shots, rows=rows)


@dataclass(frozen=True)
class RunReport:
    """Reproducible record of one CLI invocation; identical command and seed
    reproduce the outputs bit for bit."""

    command: str
    seed: int
    parameters: dict[str, Any]
    outputs: Any
    tool_version: str = __version__

    def to_json(self) -> str:
        payload = {
            "command": self.command,
            "seed": self.seed,
            "parameters": self.parameters,
            "outputs": self.outputs,
            "tool_version": self.tool_version,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".dickesim-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def _emit(args: argparse.Namespace, text: str) -> None:
    """Write to --out atomically, or to stdout when no path is given."""
    if args.out:
        _atomic_write(args.out, text)
    else:
        sys.stdout.write(text)


def _statevector_csv(state) -> str:
    lines = ["index,bitstring,re,im"]
    for index, amp in enumerate(state.amplitudes):
        lines.append(
            f"{index},{state.bitstring(index)},{_fmt(amp.real)},{_fmt(amp.imag)}"
        )
    return "\n".join(lines) + "\n"


def _statevector_rows(state) -> list[dict[str, Any]]:
    return [
        {
            "index": index,
            "bitstring": state.bitstring(index),
            "re": float(f"{amp.real:.12g}"),
            "im": float(f"{amp.imag:.12g}"),
        }
        for index, amp in enumerate(state.amplitudes)
    ]


def _circuit_rows(circuit) -> list[dict[str, Any]]:
    return [
        {
            "label": g.label,
            "gate": g.mnemonic(),
            "controls": [circuit.qubit_labels[c] for c in g.controls],
            "target": circuit.qubit_labels[g.target],
            "theta": g.theta,
        }
        for g in circuit.gates
    ]


def cmd_prepare(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    states = {
        "w3": lambda: w_state(3),
        "d4": lambda: dicke_state(4, 2),
        "d5-analytic": lambda: dicke_state(5, 3),
    }
    circuits = {"w3": build_w3_circuit, "d4": build_d4_prep_circuit}
    if args.emit == "circuit":
        if args.target not in circuits:
            parser.error(
                f"no circuit form for {args.target!r} (the 5-qubit state is "
                "reached by the post-selected expansion, not a unitary circuit); "
                "use --emit statevector"
            )
        circuit = circuits[args.target]()
        if args.format == "json":
            report = RunReport(
                command="prepare",
                seed=args.seed,
                parameters={"target": args.target, "emit": "circuit"},
                outputs={
                    "qubits": list(circuit.qubit_labels),
                    "gates": _circuit_rows(circuit),
                },
            )
            _emit(args, report.to_json())
        else:
            _emit(args, format_circuit(circuit))
        return 0
    state = states[args.target]()
    if args.format == "json":
        report = RunReport(
            command="prepare",
            seed=args.seed,
            parameters={"target": args.target, "emit": "statevector"},
            outputs={"n_qubits": state.n_qubits, "amplitudes": _statevector_rows(state)},
        )
        _emit(args, report.to_json())
    else:
        _emit(args, _statevector_csv(state))
    return 0


def cmd_sample(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.shots < 1:
        parser.error("--shots must be at least 1")
    stats = run_protocol_stats(args.shots, args.seed)
    histogram = Histogram.from_stats(stats)
    if args.format == "json":
        report = RunReport(
            command="sample",
            seed=args.seed,
            parameters={"shots": args.shots},
            outputs={
                "total_shots": histogram.total_shots,
                "successes": stats.successes,
                "estimated_p_s": float(f"{stats.estimated_success_probability:.12g}"),
                "reference_p_s": float(f"{5 / 6:.12g}"),
                "rows": [
                    {"bitstring": bits, "count": count, "frequency": float(_fmt(freq))}
                    for bits, count, freq in histogram.rows
                ],
            },
        )
        _emit(args, report.to_json())
    else:
        lines = ["bitstring,count,frequency"]
        for bits, count, freq in histogram.rows:
            lines.append(f"{bits},{count},{_fmt(freq)}")
        _emit(args, "\n".join(lines) + "\n")
    summary = (
        f"shots={stats.shots} successes={stats.successes} "
        f"estimated_p_s={stats.estimated_success_probability:.6f} "
        f"(reference 5/6 = {_fmt(5 / 6)})"
    )
    # Keep stdout machine-readable when the table itself goes to stdout.
    print(summary, file=sys.stdout if args.out else sys.stderr)
    return 0


def _params_from_args(args: argparse.Namespace, parser: argparse.ArgumentParser) -> BipartitionParams:
    try:
        return BipartitionParams(
            total=args.total,
            excitations=args.excitations,
            accessible=args.accessible,
            added=args.added,
            added_excitations=args.added_excitations,
        )
    except ValueError as exc:
        parser.error(str(exc))


def cmd_pmax(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    params = _params_from_args(args, parser)
    probability = max_success_probability(params)
    text = f"{probability.numerator}/{probability.denominator} ≈ {float(probability):.6f}"
    if args.format == "json":
        report = RunReport(
            command="pmax",
            seed=args.seed,
            parameters=vars_of_params(params),
            outputs={
                "fraction": f"{probability.numerator}/{probability.denominator}",
                "decimal": float(f"{float(probability):.12g}"),
            },
        )
        _emit(args, report.to_json())
    else:
        _emit(args, text + "\n")
    return 0


def vars_of_params(params: BipartitionParams) -> dict[str, int]:
    return {
        "total": params.total,
        "excitations": params.excitations,
        "accessible": params.accessible,
        "added": params.added,
        "added_excitations": params.added_excitations,
    }


def _decomposition_rows(side: str, decomposition) -> list[dict[str, Any]]:
    return [
        {
            "side": side,
            "j": t.j,
            "a_excitations": t.a_excitations,
            "b_excitations": t.b_excitations,
            "coefficient": float(_fmt(t.coefficient)),
            "weight": f"{t.weight.numerator}/{t.weight.denominator}",
        }
        for t in decomposition.terms
    ]


def cmd_decompose(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    params = _params_from_args(args, parser)
    rows = _decomposition_rows("source", decompose_source(params))
    if params.added > 0:
        rows += _decomposition_rows("target", decompose_target(params))
    if args.format == "json":
        report = RunReport(
            command="decompose",
            seed=args.seed,
            parameters=vars_of_params(params),
            outputs={"rows": rows},
        )
        _emit(args, report.to_json())
    else:
        lines = ["side,j,a_excitations,b_excitations,coefficient,weight"]
        for row in rows:
            lines.append(
                f"{row['side']},{row['j']},{row['a_excitations']},"
                f"{row['b_excitations']},{_fmt(row['coefficient'])},{row['weight']}"
            )
        _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_sweep(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.steps < 2:
        parser.error("--steps must be at least 2")
    if args.theta_min > args.theta_max:
        parser.error("--theta-min must not exceed --theta-max")
    grid = np.linspace(args.theta_min, args.theta_max, args.steps)
    config = NoiseConfig(fidelity_mode=_MODES[args.mode])
    try:
        rows = fidelity_sweep(grid, config)
    except ValueError as exc:
        parser.error(str(exc))
    if args.format == "json":
        report = RunReport(
            command="sweep",
            seed=args.seed,
            parameters={
                "theta_min": args.theta_min,
                "theta_max": args.theta_max,
                "steps": args.steps,
                "mode": args.mode,
            },
            outputs={
                "rows": [
                    {"theta": float(_fmt(r.theta)), "fidelity": float(_fmt(r.fidelity))}
                    for r in rows
                ]
            },
        )
        _emit(args, report.to_json())
    else:
        lines = ["theta,fidelity"]
        for row in rows:
            lines.append(f"{_fmt(row.theta)},{_fmt(row.fidelity)}")
        _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_verify(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    checks = run_all_checks()
    all_passed = all(check.passed for check in checks)
    summary = {
        "checks": [check.to_dict() for check in checks],
        "all_passed": all_passed,
        "tool_version": __version__,
    }
    _emit(args, json.dumps(summary, indent=2) + "\n")
    if not all_passed:
        failed = [check.name for check in checks if not check.passed]
        print(f"FAILED checks: {', '.join(failed)}", file=sys.stderr)
        return 3
    return 0


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=_u64, default=0, help="RNG seed (unsigned)")
    sub.add_argument("--out", default=None, help="output file (default: stdout)")
    sub.add_argument(
        "--format", choices=("csv", "json"), default="csv", help="output format"
    )


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError(f"seed must fit in u64, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dickesim",
        description="Statevector simulation of Dicke-state expansion under restricted qubit access.",
    )
    parser.add_argument("--version", action="version", version=f"dickesim {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    prepare = subparsers.add_parser("prepare", help="emit a state or its circuit")
    prepare.add_argument("target", choices=("w3", "d4", "d5-analytic"))
    prepare.add_argument(
        "--emit", choices=("statevector", "circuit"), default="statevector"
    )
    _add_common_flags(prepare)
    prepare.set_defaults(handler=cmd_prepare)

    sample = subparsers.add_parser("sample", help="seeded shot sampling of the expansion")
    sample.add_argument("--shots", type=int, required=True)
    _add_common_flags(sample)
    sample.set_defaults(handler=cmd_sample)

    for name, handler, needs_expansion in (
        ("pmax", cmd_pmax, True),
        ("decompose", cmd_decompose, False),
    ):
        sub = subparsers.add_parser(
            name,
            help=(
                "exact maximum success probability"
                if name == "pmax"
                else "bipartite decomposition coefficients"
            ),
        )
        sub.add_argument("--total", type=int, required=True, help="register size")
        sub.add_argument(
            "--excitations", type=int, required=True, help="number of |1> qubits"
        )
        sub.add_argument(
            "--accessible", type=int, required=True, help="number of accessible qubits"
        )
        sub.add_argument(
            "--added", type=int, default=1 if needs_expansion else 0,
            help="qubits appended by the expansion",
        )
        sub.add_argument(
            "--added-excitations", type=int,
            default=1 if needs_expansion else 0,
            help="appended qubits that end up excited",
        )
        _add_common_flags(sub)
        sub.set_defaults(handler=handler)

    sweep = subparsers.add_parser("sweep", help="over-rotation fidelity sweep")
    sweep.add_argument("--theta-min", type=float, default=0.0)
    sweep.add_argument("--theta-max", type=float, default=0.1)
    sweep.add_argument("--steps", type=int, default=101)
    sweep.add_argument(
        "--mode", choices=tuple(_MODES), default="post-selected",
        help="compare full pre-measurement states or post-selected success branches",
    )
    _add_common_flags(sweep)
    sweep.set_defaults(handler=cmd_sweep)

    verify = subparsers.add_parser("verify", help="run the analytic check suite")
    _add_common_flags(verify)
    verify.set_defaults(handler=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args, parser)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
