"""Command-line interface: synthesize, simulate, verify, and chain schedules.

Commands
--------
prepare   synthesize a preparation stage from a plan
gate      synthesize a phase/not/transport stage from a plan
simulate  integrate a schedule file and export the trajectory
verify    cross-check a schedule file against the closed-form propagator
chain     run a multi-stage plan across a dot chain

Exit codes: 0 success, 2 invalid plan/schedule/arguments, 3 infeasible
target, 4 verification or integration failure.

Bloch convention: each stage's qubit basis is ordered (spin-down, spin-up),
i.e. (|1>, |4>) on the left dot and (|2>, |3>) on the right dot, with
z = +1 for spin-down.  The environment variable PULSEFORGE_SEED_DOCS is
reserved and has no effect on computation; no core path uses randomness.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dqd import (
    basis_state,
    check_normalized,
    left_qubit_state,
    propagator_matrix,
)
from .errors import (
    DegeneratePhaseError,
    InfeasibleAmplitudeError,
    InfeasibleTargetError,
    IntegrationError,
    InvalidAnsatzError,
    NoFeasibleTimeError,
    PlanError,
    ScheduleFormatError,
    UnsupportedComparisonError,
    VerificationError,
)
from .io import (
    PlanDocument,
    StagePlan,
    load_plan,
    parse_complex,
    read_schedule,
    write_json,
    write_schedule,
    write_trajectory_csv,
    write_trajectory_json,
)
from .propagate import TimeGrid, Trajectory, compare_analytic, fidelity_trace, integrate
from .synth import (
    ControlSchedule,
    GateSpec,
    NotGateSpec,
    PhaseGateSpec,
    PrepareSpec,
    TransportSpec,
    declared_target,
    initial_state,
    synthesize_gate,
)

TWO_PI = 2.0 * math.pi

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3
EXIT_VERIFY = 4

_INVALID_ERRORS = (
    PlanError,
    ScheduleFormatError,
    InvalidAnsatzError,
    UnsupportedComparisonError,
    ValueError,
)
_INFEASIBLE_ERRORS = (
    InfeasibleTargetError,
    InfeasibleAmplitudeError,
    NoFeasibleTimeError,
    DegeneratePhaseError,
)
_VERIFY_ERRORS = (VerificationError, IntegrationError)


def bloch_vector(a_down: complex, a_up: complex) -> tuple[float, float, float]:
    """Bloch coordinates of a qubit amplitude pair, z = +1 for spin-down."""
    cross = np.conj(a_down) * a_up
    return (
        float(2.0 * cross.real),
        float(2.0 * cross.imag),
        float(abs(a_down) ** 2 - abs(a_up) ** 2),
    )


def materialize(stage: StagePlan, chi: float | None = None, mu: float | None = None) -> GateSpec:
    """Turn a parsed plan stage into a concrete gate spec.

    ``chi``/``mu`` supply the inherited qubit for chain stages that omit
    them; stage-declared values take precedence.
    """
    if stage.gate == "prepare":
        b1, b2, b3, b4 = stage.target
        if abs(b4) > 1e-12:
            raise InfeasibleTargetError(
                "target puts weight on |4>: direct |1> -> |4> transfer is "
                "structurally forbidden (the propagator's 4,1 entry is identically zero)"
            )
        if abs(b1) > 1e-12:
            raise InfeasibleTargetError(
                "target keeps weight on |1>; preparation drives gamma to an odd "
                "multiple of pi/2 where the |1> amplitude vanishes"
            )
        return PrepareSpec(b2=b2, b3=b3)
    chi = stage.chi if stage.chi is not None else chi
    mu = stage.mu if stage.mu is not None else mu
    if chi is None or mu is None:
        raise PlanError(f"{stage.gate} stage needs chi and mu")
    if stage.gate == "phase":
        return PhaseGateSpec(chi=chi, mu=mu, phase_shift=stage.phase_shift)
    if stage.gate == "not":
        return NotGateSpec(chi=chi, mu=mu)
    return TransportSpec(chi=chi, mu=mu, a=stage.amp_a, b=stage.amp_b, lam=stage.lam)


def _parse_state(text: str) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != 4:
        raise ValueError(f"state needs 4 comma-separated amplitudes, got {len(parts)}")
    return check_normalized(np.array([parse_complex(p) for p in parts]))


def _qubit_from_target(target: np.ndarray) -> tuple[float, float]:
    """(chi, mu) of the right-dot qubit a stage's declared target encodes."""
    a_down, a_up = target[1], target[2]
    chi = math.atan2(abs(a_up), abs(a_down))
    if abs(a_down) < 1e-12 or abs(a_up) < 1e-12:
        return chi, 0.0
    return chi, float(np.angle(a_up / a_down)) % TWO_PI


def _format_amplitudes(state: np.ndarray) -> str:
    return "  ".join(f"c{k + 1}={amp.real:+.9f}{amp.imag:+.9f}j" for k, amp in enumerate(state))


def _schedule_filename(index: int, gate: str) -> str:
    return f"stage{index:02d}_{gate}.csv"


def _out_dir(args, plan: PlanDocument | None = None) -> Path:
    if args.out is not None:
        return Path(args.out)
    if plan is not None and plan.out_dir is not None:
        return Path(plan.out_dir)
    return Path(".")


@dataclass
class StageOutcome:
    """Everything the chain composer records about one executed stage."""

    index: int
    dots: tuple[int, int]
    gate: str
    spec: GateSpec
    schedule: ControlSchedule
    chi_in: float
    mu_in: float
    input_amplitudes: tuple[complex, complex]
    output_amplitudes: tuple[complex, complex]
    t_start: float
    t_end: float

    @property
    def input_bloch(self) -> tuple[float, float, float]:
        return bloch_vector(*self.input_amplitudes)

    @property
    def output_bloch(self) -> tuple[float, float, float]:
        return bloch_vector(*self.output_amplitudes)


@dataclass
class ChainResult:
    outcomes: list[StageOutcome]
    analytic_final: np.ndarray
    ode_final: np.ndarray

    @property
    def deviation(self) -> float:
        return float(np.linalg.norm(self.analytic_final - self.ode_final))

    def declared_final(self) -> np.ndarray:
        return declared_target(self.outcomes[-1].spec)

    def ode_fidelity(self) -> float:
        return float(abs(np.vdot(self.declared_final(), self.ode_final)) ** 2)

    def analytic_fidelity(self) -> float:
        return float(abs(np.vdot(self.declared_final(), self.analytic_final)) ** 2)


def _stage_error(exc: Exception, index: int, gate: str) -> Exception:
    return type(exc)(f"stage {index} ({gate}): {exc}")


def compose_chain(plan: PlanDocument, branch="min-theta", n_steps: int = 4000) -> ChainResult:
    """Run every stage of a plan sequentially along the dot chain.

    A stage's output qubit on (|2>, |3>) becomes the next stage's input on
    (|1>, |4>): the right dot of one pair is the left dot of the next.
    Complex amplitudes (including the running global phase) are carried
    exactly; the declared targets drive the per-stage gate specs.
    """
    params = plan.system
    outcomes: list[StageOutcome] = []
    chi_next: float | None = None
    mu_next: float | None = None
    psi_analytic: np.ndarray | None = None
    psi_ode: np.ndarray | None = None
    cursor = 0.0

    for k, stage in enumerate(plan.stages):
        index = k + 1
        if k == 0:
            if stage.gate == "prepare":
                chi_in, mu_in = 0.0, 0.0
            else:
                if stage.chi is None or stage.mu is None:
                    raise PlanError("first chain stage must be a prepare or declare chi and mu")
                chi_in, mu_in = stage.chi, stage.mu
            psi_analytic = basis_state(1) if stage.gate == "prepare" else left_qubit_state(chi_in, mu_in)
            psi_ode = psi_analytic.copy()
        else:
            if stage.gate == "prepare":
                raise PlanError(f"stage {index}: prepare is only valid as the first chain stage")
            chi_in, mu_in = chi_next, mu_next
            for name, declared, derived in (("chi", stage.chi, chi_in), ("mu", stage.mu, mu_in)):
                if declared is not None and abs(declared - derived) > 1e-9:
                    raise PlanError(
                        f"stage {index}: declared {name}={declared!r} disagrees with the "
                        f"qubit inherited from stage {index - 1} ({derived!r})"
                    )
            # the right dot of the previous pair is the left dot of this one
            psi_analytic = np.array([psi_analytic[1], 0.0, 0.0, psi_analytic[2]], dtype=complex)
            psi_ode = np.array([psi_ode[1], 0.0, 0.0, psi_ode[2]], dtype=complex)

        spec = materialize(stage, chi_in, mu_in)
        stage_branch = stage.branch if stage.branch is not None else branch
        try:
            schedule = synthesize_gate(spec, params, stage.ansatz, stage_branch)
        except (_INFEASIBLE_ERRORS + _VERIFY_ERRORS + (InvalidAnsatzError,)) as exc:
            raise _stage_error(exc, index, stage.gate) from exc

        angles = schedule.angles()
        gamma_t, _ = angles.gamma(schedule.T)
        u = propagator_matrix(gamma_t, angles.theta, params.delta, schedule.T)
        psi_analytic = u @ psi_analytic
        grid = TimeGrid(schedule.T, n_steps)
        try:
            psi_ode = integrate(schedule, psi_ode, grid).final_state
        except IntegrationError as exc:
            raise _stage_error(exc, index, stage.gate) from exc

        target = declared_target(spec)
        outcomes.append(
            StageOutcome(
                index=index,
                dots=(index, index + 1),
                gate=stage.gate,
                spec=spec,
                schedule=schedule,
                chi_in=chi_in,
                mu_in=mu_in,
                input_amplitudes=(
                    complex(math.cos(chi_in)),
                    complex(np.exp(1j * mu_in) * math.sin(chi_in)),
                ),
                output_amplitudes=(complex(target[1]), complex(target[2])),
                t_start=cursor,
                t_end=cursor + schedule.T,
            )
        )
        cursor += schedule.T
        chi_next, mu_next = _qubit_from_target(target)

    return ChainResult(outcomes=outcomes, analytic_final=psi_analytic, ode_final=psi_ode)


def _stage_report_dict(outcome: StageOutcome, filename: str) -> dict:
    meta = outcome.schedule.meta
    return {
        "index": outcome.index,
        "dots": list(outcome.dots),
        "gate": outcome.gate,
        "theta": meta.theta,
        "branch": meta.branch,
        "T": outcome.schedule.T,
        "t_start": outcome.t_start,
        "t_end": outcome.t_end,
        "input": {
            "chi": outcome.chi_in,
            "mu": outcome.mu_in,
            "amplitudes": [[a.real, a.imag] for a in outcome.input_amplitudes],
            "bloch": list(outcome.input_bloch),
        },
        "output": {
            "amplitudes": [[a.real, a.imag] for a in outcome.output_amplitudes],
            "bloch": list(outcome.output_bloch),
        },
        "schedule_file": filename,
    }


def _run_single_stage(args, want_prepare: bool) -> int:
    plan = load_plan(args.plan)
    if not 0 <= args.stage < len(plan.stages):
        raise PlanError(f"stage index {args.stage} out of range: plan has {len(plan.stages)} stage(s)")
    stage = plan.stages[args.stage]
    is_prepare = stage.gate == "prepare"
    if is_prepare != want_prepare:
        cmd, other = ("prepare", "gate") if is_prepare else ("gate", "prepare")
        raise PlanError(f"stage {args.stage} is a {stage.gate} stage; use the '{cmd}' command, not '{other}'")

    spec = materialize(stage)
    branch = stage.branch if stage.branch is not None else args.branch
    schedule = synthesize_gate(spec, plan.system, stage.ansatz, branch)

    out_dir = _out_dir(args, plan)
    filename = _schedule_filename(args.stage + 1, stage.gate)
    write_schedule(out_dir / filename, schedule)

    angles = schedule.angles()
    gamma_t, _ = angles.gamma(schedule.T)
    predicted = propagator_matrix(gamma_t, angles.theta, plan.system.delta, schedule.T) @ initial_state(spec)

    print(f"stage {args.stage + 1}: gate={stage.gate}")
    print(f"theta = {schedule.meta.theta!r} rad (branch {schedule.meta.branch})")
    print(f"T = {schedule.T!r} s")
    print(f"predicted final state: {_format_amplitudes(predicted)}")
    print(f"schedule -> {out_dir / filename}")
    if args.format == "json":
        report = {
            "stage": args.stage + 1,
            "gate": stage.gate,
            "theta": schedule.meta.theta,
            "branch": schedule.meta.branch,
            "T": schedule.T,
            "predicted_final": [[c.real, c.imag] for c in predicted],
            "schedule_file": filename,
        }
        write_json(out_dir / f"stage{args.stage + 1:02d}_report.json", report)
    return EXIT_OK


def cmd_prepare(args) -> int:
    return _run_single_stage(args, want_prepare=True)


def cmd_gate(args) -> int:
    return _run_single_stage(args, want_prepare=False)


def cmd_simulate(args) -> int:
    schedule = read_schedule(args.schedule)
    psi0 = _parse_state(args.psi0)
    target = _parse_state(args.target) if args.target is not None else None

    if schedule.T == 0.0:
        # degenerate zero-length schedule: a single sample, no evolution
        traj = Trajectory(times=np.array([0.0]), states=psi0.reshape(1, 4))
        tau = np.array([schedule.tau[0]])
        alpha = np.array([schedule.alpha[0]])
    else:
        grid = TimeGrid(schedule.T, args.steps)
        traj = integrate(schedule, psi0, grid)
        tau, alpha = schedule.controls_at(traj.times)
    trace = fidelity_trace(traj, target if target is not None else psi0)

    out_dir = _out_dir(args)
    name = "trajectory.json" if args.format == "json" else "trajectory.csv"
    writer = write_trajectory_json if args.format == "json" else write_trajectory_csv
    writer(out_dir / name, traj, np.asarray(tau), np.asarray(alpha, dtype=complex), trace)

    pops = traj.populations[-1]
    print(f"final populations: {pops[0]:.9f} {pops[1]:.9f} {pops[2]:.9f} {pops[3]:.9f}")
    against = "target" if target is not None else "initial state"
    print(f"final fidelity vs {against}: {trace.fidelity[-1]:.12f}")
    print(f"max norm drift: {float(np.max(np.abs(traj.norms - 1.0))):.3e}")
    print(f"trajectory -> {out_dir / name}")
    return EXIT_OK


def cmd_verify(args) -> int:
    schedule = read_schedule(args.schedule)
    angles = schedule.angles()
    if angles is None:
        raise UnsupportedComparisonError(
            "schedule lacks drive-angle metadata (theta/gamma_final headers); cannot verify"
        )
    grid = TimeGrid(schedule.T, args.steps)

    probes = [
        basis_state(1),
        basis_state(4),
        left_qubit_state(0.25 * math.pi, 0.0),
        left_qubit_state(0.25 * math.pi, 0.5 * math.pi),
    ]
    max_error = max(compare_analytic(schedule, psi0, grid) for psi0 in probes)

    gammas, _ = angles.gamma(grid.times)
    u = propagator_matrix(gammas, angles.theta, schedule.params.delta, grid.times)
    gram = np.einsum("tji,tjk->tik", np.conj(u), u)
    unitarity = float(np.max(np.abs(gram - np.eye(4))))

    ok = max_error <= args.tol
    print(f"max |numeric - analytic| over {len(probes)} probe states: {max_error:.3e}")
    print(f"max unitarity residual of the closed form: {unitarity:.3e}")
    print(f"tolerance: {args.tol:.3e} -> {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_chain(args) -> int:
    plan = load_plan(args.plan)
    result = compose_chain(plan, branch=args.branch, n_steps=args.steps)
    out_dir = _out_dir(args, plan)

    stage_dicts = []
    for outcome in result.outcomes:
        filename = _schedule_filename(outcome.index, outcome.gate)
        write_schedule(out_dir / filename, outcome.schedule)
        stage_dicts.append(_stage_report_dict(outcome, filename))

    tol_total = args.tol * len(result.outcomes)
    deviation = result.deviation
    ok = deviation <= tol_total

    report = {
        "stages": stage_dicts,
        "total_time": result.outcomes[-1].t_end,
        "composed_vs_chained_deviation": deviation,
        "deviation_tolerance": tol_total,
        "analytic_fidelity_vs_declared_target": result.analytic_fidelity(),
        "ode_fidelity_vs_declared_target": result.ode_fidelity(),
        "final_state_ode": [[c.real, c.imag] for c in result.ode_final],
        "final_state_analytic": [[c.real, c.imag] for c in result.analytic_final],
    }
    write_json(out_dir / "chain_report.json", report)

    for outcome in result.outcomes:
        bx, by, bz = outcome.output_bloch
        print(
            f"stage {outcome.index} ({outcome.gate}, dots {outcome.dots[0]}-{outcome.dots[1]}): "
            f"theta={outcome.schedule.meta.theta:+.6f} T={outcome.schedule.T:.6e} s "
            f"t_end={outcome.t_end:.6e} s bloch_out=({bx:+.6f},{by:+.6f},{bz:+.6f})"
        )
    print(f"chained ODE fidelity vs declared target: {result.ode_fidelity():.12f}")
    print(f"composed analytic vs chained ODE deviation: {deviation:.3e} "
          f"(tolerance {tol_total:.3e}) -> {'PASS' if ok else 'FAIL'}")
    print(f"report -> {out_dir / 'chain_report.json'}")
    return EXIT_OK if ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pulseforge",
        description="Synthesize and verify tunneling/spin-orbit pulse schedules "
        "for a four-level double-dot spin qubit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, plan=False, schedule=False, steps=False, tol=False, branch=False):
        if plan:
            p.add_argument("--plan", required=True, help="JSON plan document")
        if schedule:
            p.add_argument("--schedule", required=True, help="schedule file")
        p.add_argument("--out", default=None, help="output directory (default: plan io.out_dir or '.')")
        if steps:
            p.add_argument("--steps", type=int, default=4000, help="integration steps (default 4000)")
        if tol:
            p.add_argument("--tol", type=float, default=1e-7, help="verification tolerance (default 1e-7)")
        if branch:
            p.add_argument(
                "--branch",
                default="min-theta",
                help="solution branch: 'min-theta' (default) or an integer index",
            )
        p.add_argument("--format", choices=("csv", "json"), default="csv", help="export format")

    p = sub.add_parser("prepare", help="synthesize a preparation stage")
    add_common(p, plan=True, branch=True)
    p.add_argument("--stage", type=int, default=0, help="stage index in the plan (default 0)")
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("gate", help="synthesize a phase/not/transport stage")
    add_common(p, plan=True, branch=True)
    p.add_argument("--stage", type=int, default=0, help="stage index in the plan (default 0)")
    p.set_defaults(func=cmd_gate)

    p = sub.add_parser("simulate", help="integrate a schedule and export the trajectory")
    add_common(p, schedule=True, steps=True)
    p.add_argument("--psi0", default="1,0,0,0", help="initial state, 4 comma-separated amplitudes")
    p.add_argument("--target", default=None, help="optional target state for the fidelity column")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="cross-check a schedule against the closed form")
    add_common(p, schedule=True, steps=True, tol=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("chain", help="run a multi-stage plan across a dot chain")
    add_common(p, plan=True, steps=True, tol=True, branch=True)
    p.set_defaults(func=cmd_chain)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _INVALID_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except _INFEASIBLE_ERRORS as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except _VERIFY_ERRORS as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    raise SystemExit(main())
