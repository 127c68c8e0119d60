"""JSON documents for systems, phase sets and Moebius maps.

Complex numbers are [re, im] pairs throughout.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Type, TypeVar

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..errors import InvalidInput
from ..models.base import VectorSystem
from ..moebius import MoebiusMap
from ..phases import PhaseSet, roots_of_unity

logger = logging.getLogger(__name__)

Pair = Tuple[float, float]
DocumentT = TypeVar("DocumentT", bound=BaseModel)


def to_pair(z: complex) -> List[float]:
    z = complex(z)
    return [z.real, z.imag]


def from_pair(pair: Sequence[float]) -> complex:
    return complex(float(pair[0]), float(pair[1]))


class SystemDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    d: int = Field(ge=1)
    vectors: List[List[Pair]] = Field(min_length=1)

    @model_validator(mode="after")
    def _vectors_have_length_d(self) -> "SystemDocument":
        for j, vector in enumerate(self.vectors):
            if len(vector) != self.d:
                raise ValueError(f"vector {j} has {len(vector)} entries, expected d = {self.d}")
        return self


class PhaseSetDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    phases: Optional[List[Pair]] = None
    roots_of_unity: Optional[int] = Field(None, ge=1)
    angles_degrees: Optional[List[float]] = None
    angles_radians: Optional[List[float]] = None

    @model_validator(mode="after")
    def _exactly_one_form(self) -> "PhaseSetDocument":
        given = [
            name
            for name in ("phases", "roots_of_unity", "angles_degrees", "angles_radians")
            if getattr(self, name) is not None
        ]
        if len(given) != 1:
            raise ValueError(f"give exactly one of phases, roots_of_unity, angles_*; got {given}")
        return self


class MoebiusDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    matrix: List[Pair] = Field(min_length=4, max_length=4)
    circle_preserving: bool = False


def _validate(model: Type[DocumentT], data: Any) -> DocumentT:
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise InvalidInput(f"invalid {model.__name__}: {e}") from e


def parse_system(data: Any) -> VectorSystem:
    doc = _validate(SystemDocument, data)
    columns = [[from_pair(p) for p in vector] for vector in doc.vectors]
    return VectorSystem(np.array(columns, dtype=np.complex128).T)


def system_to_json(G: VectorSystem) -> Dict[str, Any]:
    return {"d": G.d, "vectors": [[to_pair(z) for z in g] for g in G.columns()]}


def parse_phase_set(data: Any) -> PhaseSet:
    doc = _validate(PhaseSetDocument, data)
    if doc.roots_of_unity is not None:
        return roots_of_unity(doc.roots_of_unity)
    if doc.angles_degrees is not None:
        return PhaseSet.from_angles(doc.angles_degrees, degrees=True)
    if doc.angles_radians is not None:
        return PhaseSet.from_angles(doc.angles_radians)
    assert doc.phases is not None
    return PhaseSet(tuple(from_pair(p) for p in doc.phases))


def phase_set_to_json(T: PhaseSet) -> Dict[str, Any]:
    return {"phases": [to_pair(t) for t in T]}


def parse_moebius(data: Any) -> MoebiusMap:
    doc = _validate(MoebiusDocument, data)
    a, b, c, d = (from_pair(p) for p in doc.matrix)
    return MoebiusMap.from_entries(a, b, c, d, circle_preserving=doc.circle_preserving)


def moebius_to_json(M: MoebiusMap) -> Dict[str, Any]:
    return {
        "matrix": [to_pair(z) for z in M.entries],
        "circle_preserving": M.circle_preserving,
    }


def parse_complex(text: str) -> complex:
    """A complex number from "[re, im]", "re,im" or a Python literal such as "1-2j"."""
    text = text.strip()
    try:
        if text.startswith("["):
            value = json.loads(text)
            if not (isinstance(value, list) and len(value) == 2):
                raise ValueError("expected [re, im]")
            z = from_pair(value)
        elif "," in text:
            re_part, im_part = text.split(",", 1)
            z = complex(float(re_part), float(im_part))
        else:
            z = complex(text.replace("i", "j"))
    except (TypeError, ValueError) as e:
        raise InvalidInput(f"cannot read a complex number from {text!r}: {e}") from e
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InvalidInput(f"complex number {text!r} is not finite")
    return z


def load_json_argument(
    text: str, presets: Optional[Callable[[str], Optional[Dict[str, Any]]]] = None
) -> Any:
    """Inline JSON, a path to a JSON file, or the name of a preset."""
    stripped = text.strip()
    if stripped.startswith(("{", "[")):
        try:
            return json.loads(stripped)
        except json.JSONDecodeError as e:
            raise InvalidInput(f"malformed inline JSON: {e}") from e
    path = Path(stripped)
    if path.is_file():
        try:
            with open(path, "r", encoding="utf-8") as f:
                return json.load(f)
        except json.JSONDecodeError as e:
            raise InvalidInput(f"malformed JSON in {path}: {e}") from e
    if presets is not None:
        preset = presets(stripped)
        if preset is not None:
            logger.debug(f"using preset {stripped!r}")
            return preset
    raise InvalidInput(f"{text!r} is neither JSON, an existing file, nor a known preset")
