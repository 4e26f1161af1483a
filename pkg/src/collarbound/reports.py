"""Comparison reports and the verdict rule shared by every validator."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from enum import Enum


class Verdict(str, Enum):
    PASS = "pass"
    PASS_AT_EQUALITY = "pass-at-equality"
    FAIL = "fail"
    CONTROL = "hypothesis-violated-control"


class Claim(str, Enum):
    COLLAR_VOLUME = "collar_volume"
    CONE_VOLUME = "cone_volume"
    INRADIUS = "inradius"
    CONTRACTION = "contraction"
    FLOW_TIME = "flow_time"
    BOUNDARY_CONVEXITY = "boundary_convexity"
    HESSIAN_COMPARISON = "hessian_comparison"
    LEVEL_AREA = "level_area"
    RIGIDITY = "rigidity"


@dataclass
class ComparisonReport:
    """One validated inequality.

    ``sense`` is ``"le"`` for claims of the form measured <= bound and ``"ge"``
    for measured >= bound. The slack is split into a statistical part (3 sigma
    of Monte Carlo error) and a deterministic part (quadrature, integrator or
    resolution terms) so the two sources stay distinguishable.
    """

    claim: str
    space: str
    parameters: dict
    bound: float
    measured: float
    error: float
    stat_slack: float
    det_slack: float
    verdict: Verdict
    sense: str = "le"
    runtime: float = 0.0
    control: bool = False
    details: dict = field(default_factory=dict)

    @property
    def slack(self):
        return self.stat_slack + self.det_slack

    @property
    def margin(self):
        """Signed distance to the bound, positive on the safe side."""
        if self.sense == "le":
            return self.bound - self.measured
        return self.measured - self.bound

    @property
    def passed(self):
        return self.verdict in (Verdict.PASS, Verdict.PASS_AT_EQUALITY)

    def as_row(self):
        row = asdict(self)
        row["verdict"] = self.verdict.value
        row["margin"] = self.margin
        row["slack"] = self.slack
        return row

    def summary(self):
        params = ", ".join(f"{k}={_short(v)}" for k, v in self.parameters.items())
        rel = "<=" if self.sense == "le" else ">="
        return (f"{self.claim:<20} {self.space:<44} [{params}] measured {self.measured:.6g} "
                f"± {self.error:.2g} {rel} bound {self.bound:.6g} (slack {self.slack:.2g}): "
                f"{self.verdict.value}")


def _short(v):
    return f"{v:.6g}" if isinstance(v, float) else str(v)


def judge(measured, bound, stat_slack=0.0, det_slack=0.0, sense="le", control=False):
    """Verdict for ``measured`` against ``bound``.

    pass-at-equality when the two agree within the slack, pass when the claim
    holds with room to spare, fail otherwise. A failure on a space flagged as a
    hypothesis violation becomes a control verdict.
    """
    if sense not in ("le", "ge"):
        raise ValueError(f"sense must be 'le' or 'ge', got {sense!r}")
    slack = stat_slack + det_slack
    if not (math.isfinite(measured) and math.isfinite(bound)):
        verdict = Verdict.FAIL
    elif abs(measured - bound) <= slack:
        verdict = Verdict.PASS_AT_EQUALITY
    elif (measured < bound) == (sense == "le"):
        verdict = Verdict.PASS
    else:
        verdict = Verdict.FAIL
    if verdict is Verdict.FAIL and control:
        return Verdict.CONTROL
    return verdict


def make_report(claim, space, parameters, bound, measured, error=0.0, stat_slack=0.0,
                det_slack=0.0, sense="le", details=None, verdict=None):
    control = bool(getattr(space, "hypothesis_violated", False))
    if verdict is None:
        verdict = judge(measured, bound, stat_slack, det_slack, sense, control)
    elif verdict is Verdict.FAIL and control:
        verdict = Verdict.CONTROL
    return ComparisonReport(
        claim=Claim(claim).value,
        space=space.describe() if hasattr(space, "describe") else str(space or "measures"),
        parameters=dict(parameters),
        bound=float(bound),
        measured=float(measured),
        error=float(error),
        stat_slack=float(stat_slack),
        det_slack=float(det_slack),
        verdict=verdict,
        sense=sense,
        control=control,
        details=dict(details or {}),
    )


def count_verdicts(reports):
    counts = {v.value: 0 for v in Verdict}
    for rep in reports:
        counts[rep.verdict.value] += 1
    return counts
