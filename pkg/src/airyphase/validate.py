"""Analytic-versus-oracle validation suite."""

from dataclasses import dataclass, field
from typing import Callable, List, Tuple

import numpy as np

from .engine import PhaseGate, apply_phase_gate, tdw_phase_gate
from .gaussian import displace, squeeze, thermal, vacuum
from .oracle import QuadratureSpec, wigner_quadrature_result
from .special import airy_ai


def suite_states(hbar=1.0):
    return {
        "vacuum": vacuum(1, hbar),
        "thermal(n=1)": thermal(1.0, hbar),
        "squeezed(r=2)": squeeze(vacuum(1, hbar), 0, 2.0),
        "displaced(1,-1)": displace(vacuum(1, hbar), 0, 1.0, -1.0),
    }


def suite_gates():
    return {
        "cubic(2)": PhaseGate.cubic(2.0),
        "quartic(0.2)": PhaseGate.quartic(0.2),
        "qbc(2,0.2)": PhaseGate((0.0, 0.0, 2.0, 0.2)),
        "qbc(2,-0.2)": PhaseGate((0.0, 0.0, 2.0, -0.2)),
        "tdw": tdw_phase_gate(),
    }


@dataclass(frozen=True)
class CaseResult:
    name: str
    max_deviation: float
    worst_point: Tuple[float, float]
    max_imag_residual: float
    n_points: int
    tolerance: float

    @property
    def passed(self):
        return bool(self.max_deviation <= self.tolerance)


@dataclass(frozen=True)
class ValidationReport:
    cases: List[CaseResult] = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.cases)

    @property
    def worst(self):
        return max(self.cases, key=lambda c: c.max_deviation / c.tolerance)

    def to_dict(self):
        return {
            "passed": self.passed,
            "cases": [
                {
                    "name": c.name,
                    "passed": c.passed,
                    "max_deviation": c.max_deviation,
                    "tolerance": c.tolerance,
                    "worst_point": list(c.worst_point),
                    "max_imag_residual": c.max_imag_residual,
                    "n_points": c.n_points,
                }
                for c in self.cases
            ],
        }


def _compare(name, state, gate, points, tolerance, analytic, spec):
    ev = analytic(state, gate)
    worst, where, imag = -1.0, (np.nan, np.nan), 0.0
    for q, p in points:
        ref = wigner_quadrature_result(state, gate, q, p, spec)
        dev = abs(float(ev.eval(q, p)) - ref.value)
        if not np.isfinite(dev):
            dev = np.inf
        if dev > worst:
            worst, where = dev, (float(q), float(p))
        imag = max(imag, ref.imag_residual)
    return CaseResult(name, float(worst), where, float(imag), len(points), tolerance)


def vacuum_cubic_closed_form(gamma, q, p):
    """The hbar = 1 vacuum cubic-state formula in its printed form."""
    s = p + gamma * q * q
    pre = 2.0 ** (2.0 / 3.0) * np.exp((1 + 6 * gamma * p) / (6 * gamma * gamma)) / (np.sqrt(np.pi) * abs(gamma) ** (1 / 3))
    return pre * airy_ai((1 + 4 * gamma * s) / np.cbrt(2 * gamma) ** 4)


def thermal_cubic_closed_form(n_bar, gamma, q, p):
    """hbar = 1 cubic gate on a thermal state, closed form.

    The normalisation is sqrt(pi (1 + 2 n_bar)), which reduces to the vacuum
    formula at n_bar = 0 and keeps the state normalised.
    """
    nu = 1 + 2 * n_bar
    s = p + gamma * q * q
    expo = 4 * n_bar * (1 + n_bar) * q * q / nu + (nu**3 + 6 * nu * gamma * p) / (6 * gamma * gamma)
    pre = 2.0 ** (2.0 / 3.0) * np.exp(expo) / (np.sqrt(np.pi * nu) * abs(gamma) ** (1 / 3))
    return pre * airy_ai((1 + 4 * n_bar * (1 + n_bar) + 4 * gamma * s) / np.cbrt(2 * gamma) ** 4)


def run_suite(grid_n=21, extent=4.0, tolerance=1e-6, hbar=1.0,
              analytic: Callable = apply_phase_gate, spec: QuadratureSpec = None,
              progress: Callable = None) -> ValidationReport:
    """Every state x gate pair on a grid_n x grid_n grid over [-extent, extent]^2,
    plus the small-gamma cubic cut and the printed vacuum cubic formula."""
    axis = np.linspace(-extent, extent, grid_n)
    points = [(q, p) for q in axis for p in axis]
    cases = []
    for sname, state in suite_states(hbar).items():
        for gname, gate in suite_gates().items():
            case = _compare(f"{gname} on {sname}", state, gate, points, tolerance, analytic, spec)
            cases.append(case)
            if progress:
                progress(case)
    # low gamma: the log-domain path against the oracle
    cut_points = [(0.0, p) for p in np.linspace(-5.0, 5.0, 101)]
    small = _compare("cubic(0.05) cut q=0 on vacuum", vacuum(1, hbar), PhaseGate.cubic(0.05),
                     cut_points, tolerance, analytic, spec)
    cases.append(small)
    if progress:
        progress(small)
    if hbar == 1.0:
        ev = analytic(vacuum(), PhaseGate.cubic(2.0))
        ps = np.linspace(-5.0, 5.0, 101)
        ref = vacuum_cubic_closed_form(2.0, 0.0, ps)
        got = ev.eval(np.zeros_like(ps), ps)
        rel = np.abs(got - ref) / np.abs(ref)
        k = int(np.argmax(rel))
        closed = CaseResult("cubic(2) cut q=0 vs printed closed form (relative)", float(rel[k]),
                            (0.0, float(ps[k])), 0.0, len(ps), 1e-10)
        cases.append(closed)
        if progress:
            progress(closed)
    return ValidationReport(cases)
