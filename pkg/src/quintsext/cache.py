"""On-disk cache of verified matrix groups.

File layout (text, one item per line)::

    quintsext-group-cache 1
    kind valentiner
    dimension 3
    order 1080
    generators 2
    precision 256
    <re> <im>                  # dimension^2 lines per matrix, generators first
    ...
    sha256 <hex digest of everything above>

Entries are decimal strings carrying the full binary precision, so they read back
to the same binary values.  Loading re-verifies the checksum, the determinant of
every element, closure under the generators and, for the Valentiner group, the
conic permutation property; any failure raises CacheError and the caller rebuilds.
"""

from __future__ import annotations

import hashlib
import os
from pathlib import Path

from gmpy2 import mpc, mpfr

from .core.matrices import LinearSubstitution, MatrixGroup, ToleranceIndex
from .core.numbers import DEFAULT_CONFIG, ToleranceConfig, format_real

MAGIC = "quintsext-group-cache 1"
ENV_VAR = "QUINTSEXT_CACHE_DIR"


class CacheError(RuntimeError):
    """The cache file is corrupt, stale or fails re-verification."""


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "quintsext"


def cache_path(cache_dir, kind: str, config: ToleranceConfig) -> Path:
    return Path(cache_dir) / f"{kind}-{config.precision_bits}.grp"


def _body(group: MatrixGroup, kind: str, config: ToleranceConfig) -> str:
    lines = [MAGIC, f"kind {kind}", f"dimension {group.dimension}", f"order {group.order}",
             f"generators {len(group.generators)}", f"precision {config.precision_bits}"]
    with config.context():
        for g in list(group.generators) + list(group.elements):
            for row in g.entries:
                for x in row:
                    lines.append(f"{format_real(x.real)} {format_real(x.imag)}")
    return "\n".join(lines) + "\n"


def cache_group(path, group: MatrixGroup, kind: str,
                config: ToleranceConfig = DEFAULT_CONFIG) -> str:
    """Write ``group`` to ``path``; returns the checksum."""
    body = _body(group, kind, config)
    digest = hashlib.sha256(body.encode()).hexdigest()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(body + f"sha256 {digest}\n")
    os.replace(tmp, path)
    return digest


def _verify(group: MatrixGroup, kind: str, tol):
    for g in group.elements:
        if abs(g.determinant - 1) > tol:
            raise CacheError("cached element does not have determinant 1")
    index = ToleranceIndex(tol)
    for g in group.elements:
        if index.find(g) is not None:
            raise CacheError("cached elements are not distinct")
        index.add(g)
    if index.find(LinearSubstitution.identity(group.dimension)) is None:
        raise CacheError("identity missing from cached group")
    for g in group.elements:
        for h in group.generators:
            if index.find(g @ h) is None:
                raise CacheError("cached group is not closed under its generators")
    group._index = index
    if kind == "valentiner":
        from .valentiner.conics import gerbaldi_conics
        from .valentiner.group import ConicActionError, conic_action
        conics = gerbaldi_conics()
        try:
            for g in group.elements:
                conic_action(g, conics, tol)
        except ConicActionError as exc:
            raise CacheError(f"cached element fails the conic action: {exc}") from exc


def load_group(path, kind: str, config: ToleranceConfig = DEFAULT_CONFIG,
               expected_order: int | None = None) -> MatrixGroup:
    """Read and re-verify a cached group."""
    try:
        text = Path(path).read_text()
    except (OSError, UnicodeDecodeError) as exc:
        raise CacheError(f"cannot read cache: {exc}") from exc
    body, sep, tail = text.rpartition("sha256 ")
    if not sep or hashlib.sha256(body.encode()).hexdigest() != tail.strip():
        raise CacheError("checksum mismatch")
    lines = body.splitlines()
    try:
        header = dict(line.split(" ", 1) for line in lines[1:6])
        if lines[0] != MAGIC or header["kind"] != kind:
            raise CacheError("wrong cache format or kind")
        dim, order = int(header["dimension"]), int(header["order"])
        n_gen, bits = int(header["generators"]), int(header["precision"])
    except (KeyError, ValueError, IndexError) as exc:
        raise CacheError(f"malformed header: {exc}") from exc
    if bits < config.precision_bits:
        raise CacheError(f"cache holds {bits}-bit entries, {config.precision_bits} requested")
    if expected_order is not None and order != expected_order:
        raise CacheError(f"cached order {order}, expected {expected_order}")
    entries = lines[6:]
    if len(entries) != (order + n_gen) * dim * dim:
        raise CacheError("entry count does not match the header")
    with config.context():
        try:
            vals = [mpc(mpfr(a), mpfr(b)) for a, b in (e.split() for e in entries)]
        except ValueError as exc:
            raise CacheError(f"malformed entry: {exc}") from exc
        mats = [LinearSubstitution([vals[k + r * dim:k + (r + 1) * dim] for r in range(dim)])
                for k in range(0, len(vals), dim * dim)]
        group = MatrixGroup(elements=mats[n_gen:], generators=mats[:n_gen], config=config)
        _verify(group, kind, config.tol)
    return group
