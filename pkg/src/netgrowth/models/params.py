from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path


class InvalidParameters(ValueError):
    pass


def _check(cond, msg):
    if not cond:
        raise InvalidParameters(msg)


@dataclass(frozen=True)
class ModelIParams:
    """Random-edge rate ``r``, homophily rate ``s`` and the initial state."""

    r: float
    s: float
    N0: int
    H0: int

    def __post_init__(self):
        _check(self.r > 0, f"r must be positive, got {self.r}")
        _check(self.s > 0, f"s must be positive, got {self.s}")
        _check(int(self.N0) == self.N0 and self.N0 >= 2, f"N0 must be an integer >= 2, got {self.N0}")
        _check(int(self.H0) == self.H0 and self.H0 >= 1, f"H0 must be an integer >= 1, got {self.H0}")
        _check(self.H0 <= self.N0 * (self.N0 - 1) // 2, "H0 exceeds the number of node pairs")
        object.__setattr__(self, "N0", int(self.N0))
        object.__setattr__(self, "H0", int(self.H0))

    @property
    def p(self) -> float:
        return 0.0

    @property
    def q(self) -> float:
        return 0.0

    def as_model_ii(self) -> "ModelIIParams":
        return ModelIIParams(p=0.0, q=0.0, r=self.r, s=self.s, N0=self.N0, H0=self.H0)

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class ModelIIParams:
    """Model I plus influenced-node rate ``p`` and root-node rate ``q``."""

    p: float
    q: float
    r: float
    s: float
    N0: int
    H0: int

    def __post_init__(self):
        _check(self.p >= 0, f"p must be >= 0, got {self.p}")
        _check(self.q >= 0, f"q must be >= 0, got {self.q}")
        # Model I checks r, s, N0, H0
        ModelIParams(self.r, self.s, self.N0, self.H0)
        object.__setattr__(self, "N0", int(self.N0))
        object.__setattr__(self, "H0", int(self.H0))

    @property
    def node_rate(self) -> float:
        """Total per-node growth rate ``p + q + 2r``."""
        return self.p + self.q + 2 * self.r

    def to_dict(self):
        return asdict(self)


BASELINES = ("barabasi_albert", "dorogovtsev", "vazquez", "copying")


@dataclass(frozen=True)
class BaselineParams:
    """One of the constant-exponent reference generators.

    ``value`` is ``m`` for barabasi_albert, the integer edge rate for
    dorogovtsev, ``u`` for vazquez and the copy probability for copying.
    """

    variant: str
    value: float

    def __post_init__(self):
        _check(self.variant in BASELINES, f"unknown baseline {self.variant!r}")
        if self.variant in ("barabasi_albert", "dorogovtsev"):
            _check(int(self.value) == self.value and self.value >= 1,
                   f"{self.variant} needs an integer >= 1, got {self.value}")
            object.__setattr__(self, "value", int(self.value))
        else:
            _check(0.0 <= self.value <= 1.0, f"{self.variant} needs a probability, got {self.value}")


def load_params(path: str | Path) -> ModelIParams | ModelIIParams:
    """Read a JSON object keyed by parameter names.

    Objects with ``p`` or ``q`` give Model II parameters, otherwise Model I.
    """
    data = json.loads(Path(path).read_text())
    return params_from_dict(data)


def params_from_dict(data: dict) -> ModelIParams | ModelIIParams:
    data = {k: v for k, v in data.items() if k != "model"}
    if "p" in data or "q" in data:
        names = {f.name for f in fields(ModelIIParams)}
        cls = ModelIIParams
        data.setdefault("p", 0.0)
        data.setdefault("q", 0.0)
    else:
        names = {f.name for f in fields(ModelIParams)}
        cls = ModelIParams
    unknown = set(data) - names
    if unknown:
        raise InvalidParameters(f"unknown parameter(s): {', '.join(sorted(unknown))}")
    missing = names - set(data)
    if missing:
        raise InvalidParameters(f"missing parameter(s): {', '.join(sorted(missing))}")
    return cls(**data)
