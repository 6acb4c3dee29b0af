"""Scene configuration: parsing, validation and construction of the objects it names.

A scene is a JSON or YAML mapping::

    conventions: {hbar: 1.0}
    state:
      base: vacuum            # vacuum | thermal | tmss
      n_bar: 0.0              # thermal only
      r: 1.0                  # tmss only
      ops:                    # applied in order
        - {op: squeeze, mode: 0, r: 2.0, theta: 0.0}
        - {op: displace, mode: 0, q: 1.0, p: -1.0}
    gate: {preset: fig1-cubic}          # or {gamma: [g1, g2, g3, g4], mode: 0, repetitions: 1}
    grid: {q_range: [-5, 5], p_range: [-5, 5], n_q: 101, n_p: 101}

Unknown keys are rejected everywhere.
"""

import json
from pathlib import Path
from typing import Annotated, List, Literal, Optional, Tuple, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from . import gaussian as g
from .engine import PhaseGate
from .errors import AiryPhaseError, ConfigError
from .presets import get_preset


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class Conventions(_Strict):
    hbar: float = Field(1.0, gt=0, allow_inf_nan=False)


class SqueezeOp(_Strict):
    op: Literal["squeeze"]
    mode: int = Field(0, ge=0)
    r: float = Field(gt=0, allow_inf_nan=False)
    theta: float = Field(0.0, allow_inf_nan=False)


class DisplaceOp(_Strict):
    op: Literal["displace"]
    mode: int = Field(0, ge=0)
    q: float = Field(0.0, allow_inf_nan=False)
    p: float = Field(0.0, allow_inf_nan=False)


class FourierOp(_Strict):
    op: Literal["fourier"]
    mode: int = Field(0, ge=0)


class BeamsplitterOp(_Strict):
    op: Literal["beamsplitter"]
    i: int = Field(0, ge=0)
    j: int = Field(1, ge=0)
    theta: float = Field(allow_inf_nan=False)


StateOp = Annotated[Union[SqueezeOp, DisplaceOp, FourierOp, BeamsplitterOp], Field(discriminator="op")]


class StateSpec(_Strict):
    base: Literal["vacuum", "thermal", "tmss"] = "vacuum"
    modes: int = Field(1, ge=1)
    n_bar: float = Field(0.0, ge=0, allow_inf_nan=False)
    r: float = Field(1.0, gt=0, allow_inf_nan=False)
    ops: List[StateOp] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_base(self):
        if self.base == "tmss" and self.modes not in (1, 2):
            raise ValueError("tmss is a two-mode state")
        if self.base == "thermal" and self.modes != 1:
            raise ValueError("thermal base is single-mode; use ops on a tensor product instead")
        return self

    @property
    def n_modes(self):
        return 2 if self.base == "tmss" else self.modes

    def build(self, hbar):
        if self.base == "vacuum":
            st = g.vacuum(self.modes, hbar)
        elif self.base == "thermal":
            st = g.thermal(self.n_bar, hbar)
        else:
            st = g.tmss(self.r, hbar)
        for op in self.ops:
            if op.op == "squeeze":
                st = g.squeeze(st, op.mode, op.r, op.theta)
            elif op.op == "displace":
                st = g.displace(st, op.mode, op.q, op.p)
            elif op.op == "fourier":
                st = g.fourier(st, op.mode)
            else:
                st = g.beamsplitter(st, op.i, op.j, op.theta)
        return st


class GateSpec(_Strict):
    preset: Optional[str] = None
    gamma: Optional[Tuple[float, float, float, float]] = None
    mode: int = Field(0, ge=0)
    repetitions: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def _one_source(self):
        if self.preset is not None and self.gamma is not None:
            raise ValueError("give either a preset or gamma, not both")
        if self.preset is not None:
            get_preset(self.preset)
        return self

    def build(self):
        if self.preset is not None:
            return get_preset(self.preset).gate(self.mode, self.repetitions)
        gamma = self.gamma if self.gamma is not None else (0.0, 0.0, 0.0, 0.0)
        return PhaseGate(gamma, self.mode, self.repetitions or 1)

    def resolved(self):
        gate = self.build()
        return {"gamma": list(gate.gamma), "mode": gate.mode, "repetitions": gate.repetitions}


class GridSpec(_Strict):
    q_range: Tuple[float, float] = (-5.0, 5.0)
    p_range: Tuple[float, float] = (-5.0, 5.0)
    n_q: int = Field(101, ge=2)
    n_p: int = Field(101, ge=2)

    @field_validator("q_range", "p_range")
    @classmethod
    def _ordered(cls, v):
        if not v[1] > v[0]:
            raise ValueError("range must satisfy max > min")
        return v


class CutSpec(_Strict):
    axis: Literal["q", "p"] = "p"
    fixed: float = Field(0.0, allow_inf_nan=False)
    range: Tuple[float, float] = (-5.0, 5.0)
    n: int = Field(101, ge=2)


class NegativitySpec(_Strict):
    ring_tol: float = Field(1e-8, gt=0)
    max_doublings: int = Field(6, ge=1)
    box: Optional[Tuple[float, float, float, float]] = None


class SqueezingSpec(_Strict):
    gamma_tilde_range: Tuple[float, float] = (-5.0, 5.0)
    n: int = Field(1001, ge=2)
    threshold: Optional[float] = None


class MomentumSpec(_Strict):
    p_range: Tuple[float, float] = (-5.0, 5.0)
    n: int = Field(101, ge=2)


class BenchSpec(_Strict):
    gammas: Tuple[float, ...] = (0.05, 1.0)
    p_range: Tuple[float, float] = (-5.0, 5.0)
    n: int = Field(101, ge=2)
    repeats: int = Field(5, ge=1)


class ValidateSpec(_Strict):
    grid_n: int = Field(21, ge=2)
    extent: float = Field(4.0, gt=0)
    tolerance: float = Field(1e-6, gt=0)


class SceneConfig(_Strict):
    conventions: Conventions = Conventions()
    state: StateSpec = StateSpec()
    gate: GateSpec = GateSpec()
    grid: GridSpec = GridSpec()
    cut: CutSpec = CutSpec()
    negativity: NegativitySpec = NegativitySpec()
    squeezing: SqueezingSpec = SqueezingSpec()
    momentum: MomentumSpec = MomentumSpec()
    bench: BenchSpec = BenchSpec()
    validate_: ValidateSpec = Field(ValidateSpec(), alias="validate")

    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    @model_validator(mode="after")
    def _physical(self):
        # rebuild the objects so physical preconditions are checked at parse time
        try:
            state = self.state.build(self.conventions.hbar)
            gate = self.gate.build()
        except AiryPhaseError as exc:
            raise ValueError(str(exc)) from None
        if gate.mode >= state.n_modes:
            raise ValueError(f"gate mode {gate.mode} out of range for {state.n_modes} modes")
        return self

    def build_state(self):
        return self.state.build(self.conventions.hbar)

    def build_gate(self):
        return self.gate.build()

    def resolved(self) -> dict:
        """Fully explicit form: the preset is replaced by its coefficients."""
        data = self.model_dump(mode="json", by_alias=True)
        data["gate"] = self.gate.resolved() | {"preset": None}
        return data


def _format_errors(exc: ValidationError, source: str) -> str:
    lines = [f"invalid scene configuration ({source}):"]
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        lines.append(f"  {loc}: {err['msg']}")
    return "\n".join(lines)


def parse_config(data: dict, source: str = "<config>") -> SceneConfig:
    try:
        return SceneConfig.model_validate(data or {})
    except ValidationError as exc:
        raise ConfigError(_format_errors(exc, source)) from None


def load_config(path) -> dict:
    """Read a JSON or YAML file into a plain mapping."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        if path.suffix.lower() == ".json":
            data = json.loads(text)
        else:
            data = yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return data
