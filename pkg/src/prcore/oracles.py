"""Interchangeable Theta-PR deciders behind one interface."""

import logging
from typing import Any, Dict, Optional, Type

from ..errors import InvalidInput
from ..models.base import OracleKind, PhaseRetrievalOracle, VectorSystem
from ..phases import PhaseSet
from .c2 import c2_normal_form, c2_oracle
from .cover3 import DEFAULT_BUDGET, fails_3pr_cover
from .engine import EngineOptions, decide_theta_pr
from .frames import COMPLEMENT_MAX_VECTORS, has_complement_property

logger = logging.getLogger(__name__)


class EngineOracle(PhaseRetrievalOracle):
    """Exhaustive assignment search; applies to every finite phase set."""

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        super().__init__(OracleKind.ENGINE.value, config)
        self.options = EngineOptions(**self.config)

    def supports(self, system: VectorSystem, phases: PhaseSet) -> bool:
        return len(phases) ** system.m <= self.options.assignment_budget

    def does_theta_pr(self, system: VectorSystem, phases: PhaseSet) -> bool:
        return decide_theta_pr(system, phases, self.options).does_pr


class ComplementPropertyOracle(PhaseRetrievalOracle):
    """Two-element phase sets: Theta-PR is the complement property."""

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        super().__init__(OracleKind.COMPLEMENT.value, config)

    def supports(self, system: VectorSystem, phases: PhaseSet) -> bool:
        return len(phases) == 2 and system.m <= COMPLEMENT_MAX_VECTORS

    def does_theta_pr(self, system: VectorSystem, phases: PhaseSet) -> bool:
        return has_complement_property(system)


class ThreeCoverOracle(PhaseRetrievalOracle):
    """Three-element phase sets: failure is the existence of a cover certificate."""

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        super().__init__(OracleKind.COVER3.value, config)
        self.budget = int(self.config.get("budget", DEFAULT_BUDGET))

    def supports(self, system: VectorSystem, phases: PhaseSet) -> bool:
        return len(phases) == 3 and 3**system.m <= self.budget

    def does_theta_pr(self, system: VectorSystem, phases: PhaseSet) -> bool:
        return fails_3pr_cover(system, phases, self.budget) is None


class C2ClosedFormOracle(PhaseRetrievalOracle):
    """Four vectors in C^2 through the G(a, b, c) normal form."""

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        super().__init__(OracleKind.C2.value, config)

    def supports(self, system: VectorSystem, phases: PhaseSet) -> bool:
        if system.d != 2 or system.m != 4 or len(phases) not in (2, 3, 4):
            return False
        return c2_normal_form(system) is not None

    def does_theta_pr(self, system: VectorSystem, phases: PhaseSet) -> bool:
        params = c2_normal_form(system)
        if params is None:
            raise InvalidInput("system has no G(a, b, c) normal form")
        return c2_oracle(*params, phases)


ORACLES: Dict[str, Type[PhaseRetrievalOracle]] = {
    OracleKind.ENGINE.value: EngineOracle,
    OracleKind.COMPLEMENT.value: ComplementPropertyOracle,
    OracleKind.COVER3.value: ThreeCoverOracle,
    OracleKind.C2.value: C2ClosedFormOracle,
}


def get_oracle(name: str, config: Optional[Dict[str, Any]] = None) -> PhaseRetrievalOracle:
    try:
        oracle_class = ORACLES[name]
    except KeyError:
        raise InvalidInput(f"unknown oracle {name!r}; choose from {sorted(ORACLES)}") from None
    logger.debug(f"using oracle {name}")
    return oracle_class(config)
