"""Identifiers for the four discretizations and their per-mesh parameters."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bubbles import BubbleSpec, make_exponential, make_quadratic, special_beta
from .errors import ParameterError

LINEAR = "linear"
SPLS = "spls"
UPG_QUAD = "upg_quad"
UPG_EXP = "upg_exp"
KINDS = (LINEAR, SPLS, UPG_QUAD, UPG_EXP)

SPECIAL = "special"


@dataclass(frozen=True)
class Method:
    """A discretization choice; ``beta`` is a number or ``"special"`` for upg_quad."""

    kind: str
    beta: float | str | None = None

    def __post_init__(self):
        kind = self.kind.replace("-", "_")
        if kind not in KINDS:
            raise ParameterError(f"unknown method {self.kind!r}; expected one of {', '.join(KINDS)}")
        object.__setattr__(self, "kind", kind)
        if kind == UPG_QUAD:
            if self.beta is None:
                raise ParameterError("upg_quad needs beta (a positive number or 'special')")
            if self.beta != SPECIAL:
                beta = float(self.beta)
                if not beta > 0:
                    raise ParameterError(f"beta must be positive, got {self.beta!r}")
                object.__setattr__(self, "beta", beta)
        elif self.beta is not None:
            raise ParameterError(f"method {kind} takes no beta")

    @classmethod
    def linear(cls):
        return cls(LINEAR)

    @classmethod
    def spls(cls):
        return cls(SPLS)

    @classmethod
    def upg_quad(cls, beta=1.0):
        return cls(UPG_QUAD, beta)

    @classmethod
    def upg_exp(cls):
        return cls(UPG_EXP)

    @property
    def is_upg(self) -> bool:
        return self.kind in (UPG_QUAD, UPG_EXP)

    def beta_value(self, eps: float, h: float) -> float | None:
        if self.kind != UPG_QUAD:
            return None
        if self.beta == SPECIAL:
            return special_beta(eps, h)
        return self.beta

    def bubble(self, eps: float, h: float) -> BubbleSpec | None:
        if self.kind == UPG_QUAD:
            return make_quadratic(self.beta_value(eps, h), h, eps)
        if self.kind == UPG_EXP:
            return make_exponential(eps, h)
        return None

    def quasi_optimality_constant(self, eps: float, h: float) -> float:
        """Theoretical bound on error / best-approximation error in the method's norm."""
        if self.kind == LINEAR:
            return math.sqrt(1.0 + (h / (math.pi * eps)) ** 2)
        if self.kind == SPLS:
            return 1.0
        return math.sqrt(self.bubble(eps, h).one_plus_b2)

    def __str__(self):
        if self.kind == UPG_QUAD:
            return f"{self.kind}(beta={self.beta})"
        return self.kind
