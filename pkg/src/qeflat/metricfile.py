"""Metric files: the on-disk chart format (TOML).

Layout::

    dim = 3
    coords = ["t", "x", "y"]
    adapted = false            # optional; asserts coords[0] is the potential

    [domain]
    t = [-0.8, 0.8]
    x = [-1.0, 1.0]
    y = [-1.0, 1.0]

    [metric]                   # lower-triangular keys "ab", a <= b; missing = 0
    "00" = "1"
    "11" = "exp(2*t)"
    "22" = "exp(2*t)"

    [potential]                # optional
    f = "-t"
    mu = 1.0
    lambda = -3.0

Expressions use the package grammar (see the expression module).
"""

from __future__ import annotations

from pathlib import Path

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from .chart import MetricSpec, PotentialSpec, metric_from_strings
from .errors import InputError
from .expr import ExpressionError, parse, pretty


def load_metric_file(path: str | Path) -> tuple[MetricSpec, PotentialSpec | None]:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read metric file {path}: {exc}") from None
    try:
        doc = tomllib.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, tomllib.TOMLDecodeError) as exc:
        raise InputError(f"{path}: not valid TOML: {exc}") from None
    return parse_metric_document(doc, origin=str(path))


def parse_metric_document(doc: dict, origin: str = "<memory>") -> tuple[MetricSpec, PotentialSpec | None]:
    def fail(msg: str) -> InputError:
        return InputError(f"{origin}: {msg}")

    known = {"dim", "coords", "adapted", "domain", "metric", "potential"}
    for key in doc:
        if key not in known:
            raise fail(f"unknown top-level key {key!r} (expected one of {sorted(known)})")
    try:
        dim = int(doc["dim"])
    except KeyError:
        raise fail("missing required key 'dim'") from None
    except (TypeError, ValueError):
        raise fail("'dim' must be an integer") from None
    coords = doc.get("coords")
    if not isinstance(coords, list) or not all(isinstance(c, str) for c in coords):
        raise fail("'coords' must be a list of coordinate names")
    if len(coords) != dim:
        raise fail(f"'coords' has {len(coords)} names but dim = {dim}")
    adapted = doc.get("adapted", False)
    if not isinstance(adapted, bool):
        raise fail("'adapted' must be a boolean")

    domain_table = doc.get("domain")
    if not isinstance(domain_table, dict):
        raise fail("missing [domain] table with one [lo, hi] entry per coordinate")
    domain = []
    for c in coords:
        entry = domain_table.get(c)
        if (
            not isinstance(entry, list)
            or len(entry) != 2
            or not all(isinstance(v, (int, float)) for v in entry)
        ):
            raise fail(f"[domain] must give {c} = [lo, hi]")
        domain.append((float(entry[0]), float(entry[1])))
    extra = set(domain_table) - set(coords)
    if extra:
        raise fail(f"[domain] has entries for unknown coordinates {sorted(extra)}")

    metric_table = doc.get("metric")
    if not isinstance(metric_table, dict) or not metric_table:
        raise fail("missing [metric] table with component expressions")
    entries = {}
    for key, value in metric_table.items():
        if not (isinstance(key, str) and len(key) == 2 and key.isdigit()):
            raise fail(f"[metric] key {key!r} must be two digits 'ab' with a <= b")
        a, b = int(key[0]), int(key[1])
        if a > b:
            raise fail(f"[metric] key {key!r} must be lower-triangular (a <= b)")
        if b >= dim:
            raise fail(f"[metric] key {key!r} indexes outside dimension {dim}")
        if not isinstance(value, str):
            raise fail(f"[metric] component {key!r} must be an expression string")
        entries[key] = value
    try:
        chart = metric_from_strings(dim, coords, entries, domain, origin, adapted=adapted)
    except ExpressionError as exc:
        raise fail(f"bad metric expression: {exc}") from None

    potential = None
    pot_table = doc.get("potential")
    if pot_table is not None:
        if not isinstance(pot_table, dict):
            raise fail("[potential] must be a table with f, mu, lambda")
        missing = {"f", "mu", "lambda"} - set(pot_table)
        if missing:
            raise fail(f"[potential] is missing {sorted(missing)}")
        if not isinstance(pot_table["f"], str):
            raise fail("[potential] f must be an expression string")
        try:
            f_expr = parse(pot_table["f"], coords)
        except ExpressionError as exc:
            raise fail(f"bad potential expression: {exc}") from None
        try:
            mu = float(pot_table["mu"])
            lam = float(pot_table["lambda"])
        except (TypeError, ValueError):
            raise fail("[potential] mu and lambda must be numbers") from None
        potential = PotentialSpec(f_expr, mu=mu, lam=lam)
    return chart, potential


def render_metric_file(chart: MetricSpec, potential: PotentialSpec | None = None) -> str:
    """Serialize a chart (and optional potential) back into the TOML format."""
    lines = [f"dim = {chart.dim}"]
    names = ", ".join(f'"{c}"' for c in chart.coordinates)
    lines.append(f"coords = [{names}]")
    if chart.adapted:
        lines.append("adapted = true")
    lines.append("")
    lines.append("[domain]")
    for c, (lo, hi) in zip(chart.coordinates, chart.domain):
        lines.append(f"{c} = [{lo!r}, {hi!r}]")
    lines.append("")
    lines.append("[metric]")
    for (a, b) in sorted(chart.components):
        lines.append(f'"{a}{b}" = "{pretty(chart.components[(a, b)].root)}"')
    if potential is not None:
        lines.append("")
        lines.append("[potential]")
        lines.append(f'f = "{pretty(potential.f.root)}"')
        lines.append(f"mu = {potential.mu!r}")
        lines.append(f"lambda = {potential.lam!r}")
    return "\n".join(lines) + "\n"
