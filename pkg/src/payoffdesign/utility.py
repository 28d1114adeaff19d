"""Utility functions and relative risk aversion profiles.

These are passive carriers shared by the payoff equations and by the
verification oracle; neither side's solver logic lives here. A Utility is
strictly increasing and strictly concave on (0, inf); a RiskProfile is either
a positive constant or a positive function of the wealth level, and the two
representations are linked by R(F) = -F * U''(F) / U'(F).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import EngineError


@dataclass(frozen=True)
class Utility:
    """U with analytic first and second derivatives, each vectorized over F > 0."""

    kind: str  # "crra" | "custom"
    u: Callable
    du: Callable
    d2u: Callable
    crra_R: float | None = None

    def __call__(self, wealth):
        return self.u(wealth)


@dataclass(frozen=True)
class RiskProfile:
    """Relative risk aversion, constant or as a function of wealth."""

    kind: str  # "constant" | "wealth-dependent"
    r_const: float | None = None
    r_fn: Callable | None = None
    label: str = ""

    @classmethod
    def constant(cls, value: float) -> "RiskProfile":
        if not (isinstance(value, (int, float)) and np.isfinite(value) and value > 0):
            raise EngineError("nonpositive-R", f"risk aversion must be > 0, got {value!r}")
        return cls(kind="constant", r_const=float(value), label=f"constant R={value:g}")

    @classmethod
    def wealth_dependent(cls, fn: Callable, label: str = "wealth-dependent R(F)") -> "RiskProfile":
        return cls(kind="wealth-dependent", r_fn=fn, label=label)

    def __call__(self, wealth: float) -> float:
        if self.kind == "constant":
            return self.r_const
        r = float(self.r_fn(wealth))
        if not np.isfinite(r) or r <= 0:
            raise EngineError("nonpositive-R", f"R({wealth!r}) = {r!r} must be finite and > 0")
        return r


def crra_utility(R: float) -> Utility:
    """Constant relative risk aversion utility: power form, log at R = 1."""
    if not (isinstance(R, (int, float)) and np.isfinite(R) and R > 0):
        raise EngineError("nonpositive-R", f"crra needs R > 0, got {R!r}")
    R = float(R)
    if R == 1.0:
        return Utility(
            kind="crra",
            u=np.log,
            du=lambda F: 1.0 / np.asarray(F, dtype=float),
            d2u=lambda F: -1.0 / np.asarray(F, dtype=float) ** 2,
            crra_R=1.0,
        )
    return Utility(
        kind="crra",
        u=lambda F: np.asarray(F, dtype=float) ** (1.0 - R) / (1.0 - R),
        du=lambda F: np.asarray(F, dtype=float) ** (-R),
        d2u=lambda F: -R * np.asarray(F, dtype=float) ** (-R - 1.0),
        crra_R=R,
    )


def custom_utility(u: Callable, du: Callable, d2u: Callable) -> Utility:
    return Utility(kind="custom", u=u, du=du, d2u=d2u)


def arrow_pratt_R(utility: Utility) -> RiskProfile:
    """Risk profile implied by a utility: R(F) = -F * U''(F) / U'(F).

    CRRA utilities collapse to their constant; anything else becomes a
    wealth-dependent profile that validates concavity at each evaluation.
    """
    if utility.kind == "crra":
        return RiskProfile.constant(utility.crra_R)

    def r_of(wealth: float) -> float:
        first = float(utility.du(wealth))
        second = float(utility.d2u(wealth))
        if second >= 0 or first <= 0:
            raise EngineError(
                "nonconcave-utility",
                f"need U' > 0 and U'' < 0, got U'({wealth!r}) = {first!r}, U''({wealth!r}) = {second!r}",
            )
        return -wealth * second / first

    return RiskProfile.wealth_dependent(r_of, label="arrow-pratt of custom utility")
