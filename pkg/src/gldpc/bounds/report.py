"""Bound reports: the radii, optimizer witnesses and provenance, as JSON."""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .exponent import BoundConfig, alpha0, alphaR, f_alpha, f_tilde, typical_point


@dataclass
class BoundReport:
    config: dict
    c1_policy: str
    alpha0: float
    alpha0_bracket: tuple
    alphaR: float
    alphaR_rule: str
    witnesses: list = field(default_factory=list)
    finite_length: Optional[dict] = None
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=_jsonable)


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialize {type(x)}")


ALPHA_R_RULE = ("largest alpha at which the constraint gamma+delta >= alpha0 binds at the "
                "unconstrained maximizer of psi_tilde, i.e. f_tilde(alpha, alpha0) < 0")


def compute_report(cfg: BoundConfig, c1_policy: str = "given",
                   witness_alphas: Optional[list] = None) -> BoundReport:
    t0 = time.perf_counter()
    root = alpha0(cfg)
    a0 = root.alpha0
    aR = alphaR(cfg, a0)
    witnesses = []
    for a in witness_alphas or [root.bracket[0], root.bracket[1]]:
        r = f_alpha(a, cfg)
        witnesses.append({"mode": "worst-case", "alpha": a, "f": r.value,
                          "point": None if r.witness is None else asdict(r.witness)})
    for a in (0.9 * aR, aR, min(1.1 * aR, 0.999)):
        r = f_tilde(a, a0, cfg)
        witnesses.append({"mode": "random", "alpha": a, "nu": a0, "f": r.value,
                          "point": None if r.witness is None else asdict(r.witness),
                          "typical": asdict(typical_point(a, cfg))})
    return BoundReport(cfg.as_dict(), c1_policy, a0, root.bracket, aR, ALPHA_R_RULE,
                       witnesses, None, time.perf_counter() - t0)
