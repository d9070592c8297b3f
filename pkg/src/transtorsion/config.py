"""Tolerances, precision modes and run configuration.

Tolerances live in a context variable so they can be overridden for a block
of code (or a worker thread) without touching call signatures::

    with using_tolerances(tol_hyp=1e-6):
        report = full_report(h, p, n)
"""

from __future__ import annotations

import contextvars
import json
import math
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field, replace

PRECISION_MODES = ("standard", "extended", "exact")

#: significand bits used by the extended mode
EXTENDED_PREC = 128

#: relative agreement required between closed-form and oracle coefficients
COEFF_RTOL = 1e-9
#: chordal distance allowed between palindromic and dense eigenvalues
EIG_MATCH_TOL = 1e-6


@dataclass(frozen=True)
class Tolerances:
    tol_spec: float = 1e-8
    tol_hyp: float = 1e-7
    tol_rank: float = 1e-9
    tol_eig: float = 1e-12

    def validate(self):
        for name, value in asdict(self).items():
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"tolerance {name} must be positive and finite, got {value!r}")
        return self


_TOLERANCES: contextvars.ContextVar[Tolerances] = contextvars.ContextVar(
    "transtorsion_tolerances", default=Tolerances()
)


def get_tolerances() -> Tolerances:
    return _TOLERANCES.get()


def set_tolerances(tol: Tolerances | None = None, **overrides) -> Tolerances:
    """Replace the tolerances of the current context and return the new value."""
    base = tol if tol is not None else _TOLERANCES.get()
    new = replace(base, **overrides)
    _TOLERANCES.set(new)
    return new


@contextmanager
def using_tolerances(tol: Tolerances | None = None, **overrides):
    base = tol if tol is not None else _TOLERANCES.get()
    token = _TOLERANCES.set(replace(base, **overrides))
    try:
        yield _TOLERANCES.get()
    finally:
        _TOLERANCES.reset(token)


@dataclass(frozen=True)
class RunConfig:
    precision_mode: str = "standard"
    tolerances: Tolerances = field(default_factory=Tolerances)
    seed: int = 0

    def validate(self):
        if self.precision_mode not in PRECISION_MODES:
            raise ValueError(f"unknown precision mode {self.precision_mode!r}")
        self.tolerances.validate()
        return self

    def to_dict(self):
        return {
            "precision_mode": self.precision_mode,
            "tolerances": asdict(self.tolerances),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data):
        unknown = set(data) - {"precision_mode", "tolerances", "seed"}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        tol = Tolerances(**data.get("tolerances", {}))
        mode = data.get("precision_mode", "standard")
        if mode == "exact_rational":
            mode = "exact"
        return cls(precision_mode=mode, tolerances=tol, seed=int(data.get("seed", 0)))

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))
