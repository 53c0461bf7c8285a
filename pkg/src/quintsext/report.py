"""Key-value run reports with a stable line order and full-precision numbers."""

from __future__ import annotations

from gmpy2 import mpc, mpfr

from .core.numbers import format_complex, format_real


def _fmt(value) -> str:
    if isinstance(value, mpc):
        return format_complex(value)
    if isinstance(value, mpfr):
        return format_real(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


class Report:
    """Lines ``key = value`` in insertion order, then the checks, then the status."""

    def __init__(self, pipeline: str):
        self.pipeline = pipeline
        self.entries: list[tuple[str, str]] = [("pipeline", pipeline)]
        self.checks: list[tuple[str, str, bool]] = []
        self.halted: str | None = None

    def halt(self, status: str, **details):
        """Stop the report early with a status other than ok/failed."""
        self.halted = status
        for k, v in details.items():
            self.put(k, v)

    def put(self, key: str, value):
        if isinstance(value, dict):
            for k, v in value.items():
                self.put(f"{key}.{k}", v)
        elif isinstance(value, (list, tuple)):
            self.entries.append((f"{key}.count", str(len(value))))
            for i, v in enumerate(value):
                self.put(f"{key}[{i}]", v)
        else:
            self.entries.append((key, _fmt(value)))

    def check(self, name: str, residual, bound) -> bool:
        """Record a residual against its bound; NaN and None count as failures."""
        ok = residual is not None and residual == residual and residual <= bound
        shown = format_real(mpfr(residual), 6) if residual is not None else "none"
        self.checks.append((name, shown, bool(ok)))
        return bool(ok)

    def flag(self, name: str, ok: bool, detail: str = ""):
        self.checks.append((name, detail or ("holds" if ok else "violated"), bool(ok)))

    @property
    def ok(self) -> bool:
        return self.halted is None and all(c[2] for c in self.checks)

    @property
    def failed(self) -> list[str]:
        return [c[0] for c in self.checks if not c[2]]

    def render(self) -> str:
        lines = [f"{k} = {v}" for k, v in self.entries]
        for name, shown, ok in self.checks:
            lines.append(f"check.{name} = {shown} {'pass' if ok else 'FAIL'}")
        if self.halted:
            lines.append(f"status = {self.halted}")
            return "\n".join(lines) + "\n"
        lines.append(f"status = {'ok' if self.ok else 'failed'}")
        if not self.ok:
            lines.append(f"failed_checks = {','.join(self.failed)}")
        return "\n".join(lines) + "\n"
