"""Check records and deterministic report rendering."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

from . import __version__

FORMAT_VERSION = 1


@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: str | None = None
    info: str | None = None
    time_ms: float | None = None

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self, timings: bool = True) -> dict:
        d = {"name": self.name, "status": self.status}
        if timings:
            d["time_ms"] = round(self.time_ms or 0.0, 3)
        if self.info is not None:
            d["info"] = self.info
        if self.witness is not None:
            d["witness"] = self.witness
        return d


def timed(name: str, fn, *args, **kwargs) -> list[CheckResult]:
    """Run a check function returning CheckResult or a list of them; stamp wall time."""
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    dt = (time.perf_counter() - t0) * 1000
    results = out if isinstance(out, list) else [out]
    for r in results:
        if r.time_ms is None:
            r.time_ms = dt / len(results) if results else dt
        if name and not r.name.startswith(name):
            r.name = f"{name}/{r.name}"
    return results


@dataclass
class Report:
    model: dict
    checks: list[CheckResult] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self, timings: bool = True) -> dict:
        d = {
            "version": __version__,
            "format_version": FORMAT_VERSION,
            "model": self.model,
            "checks": [c.to_dict(timings) for c in self.checks],
            "status": self.status,
        }
        if self.notes:
            d["notes"] = list(self.notes)
        return d

    def render(self, fmt: str = "text", timings: bool = True) -> str:
        if fmt == "json":
            return json.dumps(self.to_dict(timings), indent=2, sort_keys=False) + "\n"
        lines = [f"halfloop {__version__} report (format {FORMAT_VERSION})"]
        for k, v in self.model.items():
            lines.append(f"  {k} = {v}")
        for c in self.checks:
            t = f" [{c.time_ms:.1f} ms]" if timings and c.time_ms is not None else ""
            lines.append(f"{c.status.upper():4} {c.name}{t}")
            if c.info:
                lines.append(f"     {c.info}")
            if c.witness:
                lines.append(f"     witness: {c.witness}")
        for n in self.notes:
            lines.append(f"note: {n}")
        lines.append(f"status: {self.status}")
        return "\n".join(lines) + "\n"


def report_from_dict(d: dict) -> Report:
    checks = [
        CheckResult(c["name"], c["status"] == "pass", c.get("witness"), c.get("info"), c.get("time_ms"))
        for c in d["checks"]
    ]
    return Report(d["model"], checks, list(d.get("notes", [])))
