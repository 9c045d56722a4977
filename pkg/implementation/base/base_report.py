import math
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

COMPARATORS = {
    '<': lambda v, t: v < t,
    '<=': lambda v, t: v <= t,
    '>': lambda v, t: v > t,
    '>=': lambda v, t: v >= t,
    'in': lambda v, t: t[0] <= v <= t[1],
}


@dataclass
class Criterion:
    """ One recorded comparison `value op threshold`; NaN values never pass. """
    label: str
    value: float
    op: str
    threshold: Any

    def holds(self):
        value = float(self.value)
        if math.isnan(value):
            return False
        return bool(COMPARATORS[self.op](value, self.threshold))

    def to_dict(self):
        return OrderedDict(label=self.label, value=_clean(self.value), op=self.op,
                           threshold=_clean(self.threshold), holds=self.holds())


@dataclass
class EstimateReport:
    """
    One verified identity or inequality. The verdict is computed from the recorded criteria
    only, so a report read back from JSON yields the same verdict.
    """
    name: str
    statement: str
    grid: Dict[str, Any] = field(default_factory=OrderedDict)
    ensemble: Dict[str, Any] = field(default_factory=OrderedDict)
    samples: List[Any] = field(default_factory=list)
    constants: Dict[str, Any] = field(default_factory=OrderedDict)
    refinement: List[Dict[str, Any]] = field(default_factory=list)
    tolerance: Dict[str, Any] = field(default_factory=OrderedDict)
    criteria: List[Criterion] = field(default_factory=list)
    cutoff: Optional[str] = None
    notes: List[str] = field(default_factory=list)

    def require(self, label, value, op, threshold):
        self.criteria.append(Criterion(label, value, op, threshold))
        return self

    @property
    def passed(self):
        return bool(self.criteria) and all(c.holds() for c in self.criteria)

    @property
    def verdict(self):
        return 'pass' if self.passed else 'fail'

    def to_dict(self):
        return OrderedDict(
            name=self.name,
            statement=self.statement,
            verdict=self.verdict,
            grid=_clean(self.grid),
            ensemble=_clean(self.ensemble),
            tolerance=_clean(self.tolerance),
            constants=_clean(self.constants),
            criteria=[c.to_dict() for c in self.criteria],
            refinement=_clean(self.refinement),
            samples=_clean(self.samples),
            cutoff=self.cutoff,
            notes=list(self.notes),
        )


def _clean(value):
    """ JSON-safe builtin types; NaN and infinities become strings so the output stays valid JSON. """
    if isinstance(value, dict):
        return OrderedDict((str(k), _clean(v)) for k, v in value.items())
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return _clean(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return OrderedDict(re=_clean(float(value.real)), im=_clean(float(value.imag)))
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if math.isnan(value) or math.isinf(value):
            return str(value)
        return value
    return value
