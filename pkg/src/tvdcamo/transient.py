"""Fixed-step transient simulation of one camouflaged gate.

One clock period is simulated: a precharge half (both differential nodes
pinned to the rail through ideal switches) and an evaluation half, in which
the two conducting pull-down branches race while the cross-coupled PMOS pair
regenerates the imbalance. Output inverters are ideal comparators.
"""

import io
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .device import IsfetParams, vth_from_ph
from .errors import SimulationError, UsageError
from .gates import (
    SERIES_K_FACTOR,
    GatePhProgram,
    branch_current,
    minterm_branch_phs,
    minterm_index,
)


@dataclass(frozen=True)
class SimConfig:
    """Simulation conditions for one gate-level transient run."""

    vdd: float = 1.8  # supply rail, V
    clock_freq: float = 2e7  # Hz; one simulated period = 1/clock_freq
    c_node: float = 1e-14  # differential node capacitance, F
    dt: float = 1e-12  # integration step, s
    trip: float | None = None  # output inverter threshold, V (None -> vdd/2)
    resolve_margin: float = 0.1  # |V_OUT - V̄_OUT| needed to call a winner, V
    pmos_vth: float = 0.5  # sense-amp PMOS threshold magnitude, V

    def __post_init__(self):
        if self.vdd <= 0:
            raise UsageError(f"vdd must be positive, got {self.vdd!r}")
        if self.clock_freq <= 0:
            raise UsageError(f"clock_freq must be positive, got {self.clock_freq!r}")
        if self.c_node <= 0:
            raise UsageError(f"c_node must be positive, got {self.c_node!r}")
        if self.dt <= 0:
            raise UsageError(f"dt must be positive, got {self.dt!r}")
        if self.dt > self.period / 100:
            raise UsageError(
                f"dt {self.dt!r} too coarse for clock period {self.period!r}"
            )
        if self.trip is not None and not 0 < self.trip < self.vdd:
            raise UsageError(f"trip must lie inside (0, vdd), got {self.trip!r}")
        if not 0 < self.resolve_margin < self.vdd:
            raise UsageError(
                f"resolve_margin must lie inside (0, vdd), got {self.resolve_margin!r}"
            )
        if not 0 < self.pmos_vth < self.vdd:
            raise UsageError(
                f"pmos_vth must lie inside (0, vdd), got {self.pmos_vth!r}"
            )

    @property
    def period(self) -> float:
        return 1.0 / self.clock_freq

    @property
    def trip_voltage(self) -> float:
        return self.vdd / 2 if self.trip is None else self.trip

    @property
    def n_steps(self) -> int:
        return int(round(self.period / self.dt))


@dataclass
class GateTrace:
    """Waveforms and the resolved outcome of one simulated clock period."""

    t: np.ndarray  # sample times, s
    v_out: np.ndarray  # differential node V_OUT, V
    v_out_bar: np.ndarray  # differential node V̄_OUT, V
    out: np.ndarray  # inverter output OUT, V
    out_bar: np.ndarray  # inverter output OUT̄, V
    resolved_output: int | None  # 0/1, or None when the race never resolved
    resolve_time: float | None  # seconds from evaluation start, or None
    eval_start_index: int  # sample index where evaluation begins

    @property
    def is_resolved(self) -> bool:
        return self.resolved_output is not None

    @property
    def output_str(self) -> str:
        return "unresolved" if self.resolved_output is None else str(self.resolved_output)


def simulate(
    program: GatePhProgram,
    params: IsfetParams,
    cfg: SimConfig,
    a: int,
    b: int,
) -> GateTrace:
    """Simulate one full clock period for one input pair.

    The discharge of V_OUT maps to output 1. The winner is declared at the
    first sample where the differential exceeds ``resolve_margin`` and the
    losing node sits below the inverter trip point; if that never happens the
    trace comes back unresolved.
    """
    if cfg.vdd != params.vdd:
        raise UsageError(
            f"config vdd ({cfg.vdd!r}) differs from device vdd ({params.vdd!r})"
        )
    m = minterm_index(a, b)
    ph_out, ph_bar = minterm_branch_phs(program, m)
    vth_out = vth_from_ph(params, ph_out)
    vth_bar = vth_from_ph(params, ph_bar)

    n_total = cfg.n_steps
    n_pre = n_total // 2
    v_out = np.empty(n_total + 1, dtype=np.float64)
    v_bar = np.empty(n_total + 1, dtype=np.float64)
    k_eff = params.k_gain * SERIES_K_FACTOR

    bad = _kernels.integrate(
        v_out,
        v_bar,
        n_pre,
        n_total,
        cfg.dt,
        cfg.vdd,
        cfg.c_node,
        k_eff,
        vth_out,
        k_eff,
        vth_bar,
        params.k_gain,
        cfg.pmos_vth,
    )
    if bad >= 0:
        raise SimulationError(
            f"node voltage diverged at t={bad * cfg.dt:.3e} s; reduce dt "
            f"(currently {cfg.dt:.3e} s)"
        )

    trip = cfg.trip_voltage
    t = np.arange(n_total + 1, dtype=np.float64) * cfg.dt
    out = np.where(v_out < trip, cfg.vdd, 0.0)
    out_bar = np.where(v_bar < trip, cfg.vdd, 0.0)

    diff = v_out[n_pre:] - v_bar[n_pre:]
    loser = np.minimum(v_out[n_pre:], v_bar[n_pre:])
    cond = (np.abs(diff) >= cfg.resolve_margin) & (loser < trip)
    resolved_output = None
    resolve_time = None
    if cond.any():
        i = int(np.argmax(cond))
        resolved_output = int(diff[i] < 0)  # V_OUT lower -> it discharged -> 1
        resolve_time = i * cfg.dt

    return GateTrace(
        t=t,
        v_out=v_out,
        v_out_bar=v_bar,
        out=out,
        out_bar=out_bar,
        resolved_output=resolved_output,
        resolve_time=resolve_time,
        eval_start_index=n_pre,
    )


def simulate_all_minterms(
    program: GatePhProgram, params: IsfetParams, cfg: SimConfig
) -> list[GateTrace]:
    """Simulate the four input pairs in minterm order (00, 01, 10, 11)."""
    return [simulate(program, params, cfg, a, b) for a in (0, 1) for b in (0, 1)]


def margin_report(
    program: GatePhProgram,
    params: IsfetParams,
    cfg: SimConfig,
    probe_v_ds: float = 0.1,
) -> list[dict]:
    """Per-minterm drive imbalance and resolution timing.

    The current ratio compares the LVT-role branch against the HVT-role
    branch at full gate drive and a small probe v_ds (default 0.1 V, the
    triode region where the race is decided as the nodes approach ground).
    """
    i_lvt = branch_current(params, program.ph_low, probe_v_ds)
    i_hvt = branch_current(params, program.ph_high, probe_v_ds)
    ratio = float("inf") if i_hvt == 0.0 else i_lvt / i_hvt
    rows = []
    for a in (0, 1):
        for b in (0, 1):
            trace = simulate(program, params, cfg, a, b)
            rows.append(
                {
                    "minterm": minterm_index(a, b),
                    "a": a,
                    "b": b,
                    "current_ratio": ratio,
                    "resolve_time": trace.resolve_time,
                    "output": trace.resolved_output,
                }
            )
    return rows


def write_trace_csv(trace: GateTrace, fh) -> None:
    """Write a waveform CSV with header ``t,v_out,v_out_bar,out,out_bar``."""
    fh.write("t,v_out,v_out_bar,out,out_bar\n")
    data = np.column_stack([trace.t, trace.v_out, trace.v_out_bar, trace.out, trace.out_bar])
    np.savetxt(fh, data, fmt="%.6e", delimiter=",")


def trace_csv_text(trace: GateTrace) -> str:
    buf = io.StringIO()
    write_trace_csv(trace, buf)
    return buf.getvalue()


def write_margin_csv(rows: list[dict], fh) -> None:
    """Write a margin report as CSV."""
    fh.write("minterm,a,b,current_ratio,resolve_time,output\n")
    for r in rows:
        rt = "" if r["resolve_time"] is None else f"{r['resolve_time']:.6e}"
        out = "unresolved" if r["output"] is None else str(r["output"])
        fh.write(f"{r['minterm']},{r['a']},{r['b']},{r['current_ratio']:.6e},{rt},{out}\n")


def trace_metadata(
    program: GatePhProgram,
    params: IsfetParams,
    cfg: SimConfig,
    a: int,
    b: int,
    trace: GateTrace,
) -> dict:
    """Sidecar metadata describing how a waveform file was produced."""
    return {
        "inputs": {"a": a, "b": b},
        "program": {
            "ph_low": program.ph_low,
            "ph_high": program.ph_high,
            "lvt_on_out_side": list(program.assignment.lvt_on_out_side),
        },
        "params": {
            "k_gain": params.k_gain,
            "vth0": params.vth0,
            "ph_ref": params.ph_ref,
            "sensitivity": params.sensitivity,
            "vdd": params.vdd,
        },
        "config": {
            "vdd": cfg.vdd,
            "clock_freq": cfg.clock_freq,
            "c_node": cfg.c_node,
            "dt": cfg.dt,
            "trip": cfg.trip_voltage,
            "resolve_margin": cfg.resolve_margin,
            "pmos_vth": cfg.pmos_vth,
        },
        "resolved_output": trace.resolved_output,
        "resolve_time": trace.resolve_time,
    }
