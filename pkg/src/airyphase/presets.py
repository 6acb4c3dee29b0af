"""Named gate parameter sets for the published figure panels.

All panels act on the vacuum with hbar = 1.  The ``figure`` field records the
panel each entry reproduces.
"""

from dataclasses import dataclass
from typing import Tuple

from .engine import PhaseGate
from .errors import ConfigError


@dataclass(frozen=True)
class Preset:
    gamma: Tuple[float, float, float, float]
    repetitions: int
    figure: str
    description: str

    def gate(self, mode=0, repetitions=None):
        k = self.repetitions if repetitions is None else repetitions
        return PhaseGate(self.gamma, mode, k)


PRESETS = {
    "fig1-cubic": Preset((0.0, 0.0, 2.0, 0.0), 1, "Fig. 1, upper left", "cubic gate, gamma_3 = 2"),
    "fig1-qbc": Preset(
        (0.0, 0.0, 2.0, 0.2), 1, "Fig. 1, upper right", "quartic-bounded cubic gate, gamma_3 = 2, gamma_4 = 0.2"
    ),
    "tdw": Preset(
        (15.0, -7.0, 0.0, 0.2), 1, "Fig. 1, bottom row", "tilted double well 15 q - 7 q^2/2 + 0.2 q^4/4"
    ),
    "fig2-qbc-k1": Preset((0.0, 0.0, 2.0, 0.2), 1, "Fig. 2, top left", "quartic-bounded cubic gate, k = 1"),
    "fig2-qbc-k2": Preset((0.0, 0.0, 2.0, 0.2), 2, "Fig. 2, top middle", "quartic-bounded cubic gate, k = 2"),
    "fig2-qbc-k3": Preset((0.0, 0.0, 2.0, 0.2), 3, "Fig. 2, top right", "quartic-bounded cubic gate, k = 3"),
    "fig2-cubic-k1": Preset((0.0, 0.0, 2.0, 0.0), 1, "Fig. 2, bottom left", "cubic gate, k = 1"),
    "fig2-cubic-k2": Preset((0.0, 0.0, 2.0, 0.0), 2, "Fig. 2, bottom middle", "cubic gate, k = 2"),
    "fig2-cubic-k3": Preset((0.0, 0.0, 2.0, 0.0), 3, "Fig. 2, bottom right", "cubic gate, k = 3"),
    "fig3-cubic": Preset((0.0, 0.0, 2.0, 0.0), 1, "Fig. 3, left", "bare cubic gate, gamma_3 = 2"),
    "fig3-unbounded": Preset(
        (0.0, 0.0, 2.0, -0.2), 1, "Fig. 3, right", "cubic gate softened by an inverted quartic, gamma_4 = -0.2"
    ),
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}") from None


# Parameter sets whose normalisation is checked: every distinct gate above.
def figure_gates():
    seen = {}
    for name, pre in PRESETS.items():
        key = (pre.gamma, pre.repetitions)
        seen.setdefault(key, name)
    return [(name, PRESETS[name].gate()) for name in seen.values()]
