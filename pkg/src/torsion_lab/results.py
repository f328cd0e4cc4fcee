"""Residual records shared by every checking routine."""
import math
from dataclasses import dataclass, field, replace

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"


@dataclass(frozen=True)
class CheckResult:
    id: str
    residual: float
    tol: float
    status: str
    skip_reason: str = ""
    context: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.status == PASS

    @property
    def skipped(self):
        return self.status == SKIPPED

    def with_context(self, **ctx):
        return replace(self, context={**self.context, **ctx})


def judge(id, residual, tol, **context):
    """A pass/fail record; pass means residual < tol."""
    residual = float(residual)
    ok = math.isfinite(residual) and residual < tol
    return CheckResult(id, residual, float(tol), PASS if ok else FAIL, "", context)


def skip(id, reason, tol, residual=math.nan, **context):
    return CheckResult(id, float(residual), float(tol), SKIPPED, reason, context)


def condition(id, residual, tol, gate=1e-10, **context):
    """Record for a structural condition that may legitimately fail to hold.

    A condition that holds is a pass; one that does not hold is reported as
    skipped, since it is a property of the point rather than an error.
    """
    if residual < gate:
        return judge(id, residual, tol, **context)
    return skip(id, f"condition does not hold (residual {residual:.3e})", tol, residual, **context)
