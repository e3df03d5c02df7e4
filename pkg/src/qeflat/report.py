"""Check reports: the shared output type of every verification operation.

A report records per-point named defects, aggregate maxima and spreads,
gate outcomes and a verdict.  Rendering is deterministic: keys sorted,
floats printed with 12 significant digits, so JSON output for a fixed
(source, seed, tolerance) triple is byte-identical across runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

VERDICT_PASS = "PASS"
VERDICT_FAIL = "FAIL"
VERDICT_NOT_APPLICABLE = "NOT-APPLICABLE"


@dataclass(frozen=True)
class GateResult:
    name: str
    value: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.value <= self.tol


@dataclass(frozen=True)
class PointRecord:
    coords: tuple[float, ...]
    defects: dict[str, float]
    label: str = ""  # e.g. "level=0.3"


@dataclass
class CheckReport:
    check: str
    source: str = ""
    seed: int = 0
    tolerances: dict[str, float] = field(default_factory=dict)
    points: list[PointRecord] = field(default_factory=list)
    gates: list[GateResult] = field(default_factory=list)
    spreads: dict[str, float] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def add_point(self, coords, defects: dict[str, float], label: str = "") -> None:
        self.points.append(PointRecord(tuple(float(c) for c in coords),
                                       {k: float(v) for k, v in defects.items()}, label))

    def add_gate(self, name: str, value: float, tol: float) -> GateResult:
        gate = GateResult(name, float(value), float(tol))
        self.gates.append(gate)
        return gate

    def add_spread(self, name: str, values) -> float:
        vals = [float(v) for v in values]
        spread = (max(vals) - min(vals)) if vals else 0.0
        self.spreads[name] = spread
        return spread

    def max_defects(self) -> dict[str, float]:
        out: dict[str, float] = {}
        for rec in self.points:
            for name, value in rec.defects.items():
                out[name] = max(out.get(name, 0.0), abs(value))
        return out

    @property
    def failing_gates(self) -> list[GateResult]:
        return [g for g in self.gates if not g.passed]

    @property
    def verdict(self) -> str:
        if self.failing_gates:
            return VERDICT_NOT_APPLICABLE
        maxima = self.max_defects()
        for name, tol in self.tolerances.items():
            if maxima.get(name, 0.0) > tol:
                return VERDICT_FAIL
            if name in self.spreads and self.spreads[name] > tol:
                return VERDICT_FAIL
        for name, spread in self.spreads.items():
            tol = self.tolerances.get(name)
            if tol is not None and spread > tol:
                return VERDICT_FAIL
        return VERDICT_PASS

    @property
    def passed(self) -> bool:
        return self.verdict == VERDICT_PASS

    def to_jsonable(self) -> dict:
        return {
            "check": self.check,
            "source": self.source,
            "seed": self.seed,
            "tol": dict(self.tolerances),
            "points": [
                {
                    "coords": list(rec.coords),
                    "defects": dict(rec.defects),
                    **({"label": rec.label} if rec.label else {}),
                }
                for rec in self.points
            ],
            "aggregate": {"max": self.max_defects(), "spread": dict(self.spreads)},
            "gates": [
                {
                    "name": g.name,
                    "value": g.value,
                    "tol": g.tol,
                    "status": "pass" if g.passed else "fail",
                }
                for g in self.gates
            ],
            "verdict": self.verdict,
            "notes": list(self.notes),
        }


# --- deterministic rendering -------------------------------------------------


def _fmt_float(x: float) -> str:
    if x != x or x in (float("inf"), float("-inf")):
        return '"%s"' % x
    return format(float(x), ".12g")


def _to_json(value, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int,)):
        return str(value)
    if isinstance(value, float):
        return _fmt_float(value)
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if value is None:
        return "null"
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [
            f'{inner}"{key}": {_to_json(value[key], indent + 1)}' for key in sorted(value)
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [f"{inner}{_to_json(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(value)!r}")


def render_json(report: CheckReport) -> str:
    return _to_json(report.to_jsonable(), 0) + "\n"


def render_table(report: CheckReport) -> str:
    lines = [f"check: {report.check}    source: {report.source}    seed: {report.seed}"]
    if report.gates:
        lines.append("gates:")
        for g in report.gates:
            status = "pass" if g.passed else "FAIL"
            lines.append(f"  {g.name:<38} {status:<5} value {g.value:<14.6g} tol {g.tol:.3g}")
    maxima = report.max_defects()
    if maxima:
        lines.append("defects (max over points):")
        for name in sorted(maxima):
            tol = report.tolerances.get(name)
            status = "" if tol is None else ("ok" if maxima[name] <= tol else "FAIL")
            tol_text = "-" if tol is None else f"{tol:.3g}"
            lines.append(f"  {name:<38} {maxima[name]:<14.6g} tol {tol_text:<10} {status}")
    if report.spreads:
        lines.append("spreads (max - min across points):")
        for name in sorted(report.spreads):
            tol = report.tolerances.get(name)
            status = "" if tol is None else ("ok" if report.spreads[name] <= tol else "FAIL")
            tol_text = "-" if tol is None else f"{tol:.3g}"
            lines.append(f"  {name:<38} {report.spreads[name]:<14.6g} tol {tol_text:<10} {status}")
    for note in report.notes:
        lines.append(f"note: {note}")
    lines.append(f"verdict: {report.verdict}")
    return "\n".join(lines) + "\n"
