"""Scenario files: parse .scn configs into :class:`~spectariff.settlement.Scenario`.

A scenario file is YAML with the following shape (comments allowed)::

    title: optional free text
    interval: {t1: 0.0, t2: 1.0}
    order: 128                 # optional truncation order
    topology: one-one          # one-one | one-multi | multi-one | multi-multi
    plans:
      - name: plan1
        alpha:                 # pieces tiling [0, inf) by frequency band
          - {f_lo: 0, f_hi: 10, form: constant, c: 20}
          - {f_lo: 10, form: logshift, k: 3, s: 0, c: 20}
        beta: ...              # optional; defaults to the alpha pieces
    sources:
      - id: s1
        plan: plan1
        mean: 15.0             # curve fields where the topology allows them
        harmonics: [{n: 20, cos: 10.0}]
    subscribers:
      - id: load1
        mean: 50.0
        harmonics: [{n: 5, sin: 20.0}]
    allocation:                # multi-one only: per-source slices of the load
      - {subscriber: load1, source: s1, mean: 10.0}

Curves are declared either inline (``mean`` plus ``harmonics``) or by
pointing ``csv`` at a meter file (path relative to the scenario file); the
two styles are mutually exclusive per curve. A piece's ``f_hi`` may be
omitted: it defaults to the next piece's ``f_lo``, or to infinity on the
last piece. All schema problems raise
:class:`~spectariff.errors.ScenarioFormatError` with the offending location.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Any, Mapping

import yaml

from .curve import Harmonic, LoadCurve, TimeInterval, TrigCurve, read_meter_csv
from .errors import ScenarioFormatError
from .settlement import (
    AllocationSpec,
    Scenario,
    SourceSpec,
    SubscriberSpec,
)
from .spectrum import DEFAULT_ORDER
from .tariff import PlanPiece, PricePlan

_TOP_KEYS = {"title", "interval", "order", "topology", "plans", "sources", "subscribers", "allocation"}
_PLAN_KEYS = {"name", "alpha", "beta"}
_PIECE_KEYS = {"f_lo", "f_hi", "form", "c", "k", "s"}
_SOURCE_KEYS = {"id", "plan", "mean", "harmonics", "csv"}
_SUBSCRIBER_KEYS = {"id", "mean", "harmonics", "csv"}
_ALLOCATION_KEYS = {"subscriber", "source", "mean", "harmonics", "csv"}
_HARMONIC_KEYS = {"n", "cos", "sin"}


def _fail(where: str, message: str) -> "ScenarioFormatError":
    return ScenarioFormatError(f"{where}: {message}")


def _expect_map(value: Any, where: str) -> Mapping[str, Any]:
    if not isinstance(value, Mapping):
        raise _fail(where, f"expected a mapping, got {type(value).__name__}")
    return value


def _expect_list(value: Any, where: str) -> list:
    if not isinstance(value, list):
        raise _fail(where, f"expected a list, got {type(value).__name__}")
    return value


def _check_keys(block: Mapping[str, Any], allowed: set, where: str) -> None:
    extra = set(block) - allowed
    if extra:
        raise _fail(where, f"unknown keys {sorted(extra)}; allowed: {sorted(allowed)}")


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool):
        raise _fail(where, f"expected a number, got boolean {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        # YAML leaves 1e9 / inf as strings; accept anything float() does
        try:
            return float(value)
        except ValueError:
            pass
    raise _fail(where, f"expected a number, got {value!r}")


def _integer(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise _fail(where, f"expected an integer, got {value!r}")
    return value


def _string(value: Any, where: str) -> str:
    if not isinstance(value, str) or not value:
        raise _fail(where, f"expected a nonempty string, got {value!r}")
    return value


# ---------------------------------------------------------------------------
# curves
# ---------------------------------------------------------------------------


def _parse_harmonics(entries: Any, where: str) -> tuple[Harmonic, ...]:
    terms = []
    for i, entry in enumerate(_expect_list(entries, where)):
        spot = f"{where}[{i}]"
        block = _expect_map(entry, spot)
        _check_keys(block, _HARMONIC_KEYS, spot)
        if "n" not in block:
            raise _fail(spot, "harmonic needs an index n")
        n = _integer(block["n"], f"{spot}.n")
        cos_amp = _number(block.get("cos", 0.0), f"{spot}.cos")
        sin_amp = _number(block.get("sin", 0.0), f"{spot}.sin")
        try:
            terms.append(Harmonic(n, cos_amp, sin_amp))
        except ValueError as exc:
            raise _fail(spot, str(exc)) from exc
    return tuple(terms)


def _parse_curve(
    block: Mapping[str, Any], interval: TimeInterval, base_dir: Path, where: str
) -> LoadCurve | None:
    has_terms = "mean" in block or "harmonics" in block
    has_csv = "csv" in block
    if has_csv and has_terms:
        raise _fail(where, "declare the curve inline (mean/harmonics) or via csv, not both")
    if has_csv:
        rel = _string(block["csv"], f"{where}.csv")
        path = base_dir / rel
        try:
            sampled = read_meter_csv(path)
        except (OSError, ValueError) as exc:
            raise _fail(f"{where}.csv", str(exc)) from exc
        if sampled.interval != interval:
            raise _fail(
                f"{where}.csv",
                f"meter interval [{sampled.interval.t1}, {sampled.interval.t2}] "
                f"differs from scenario interval [{interval.t1}, {interval.t2}]",
            )
        return sampled
    if not has_terms:
        return None
    mean = _number(block.get("mean", 0.0), f"{where}.mean")
    harmonics = _parse_harmonics(block.get("harmonics", []), f"{where}.harmonics")
    try:
        return TrigCurve(interval, mean, harmonics)
    except ValueError as exc:
        raise _fail(where, str(exc)) from exc


# ---------------------------------------------------------------------------
# plans
# ---------------------------------------------------------------------------


def _parse_pieces(entries: Any, where: str) -> tuple[PlanPiece, ...]:
    raw = _expect_list(entries, where)
    if not raw:
        raise _fail(where, "needs at least one piece")
    blocks = []
    for i, entry in enumerate(raw):
        spot = f"{where}[{i}]"
        block = _expect_map(entry, spot)
        _check_keys(block, _PIECE_KEYS, spot)
        if "f_lo" not in block:
            raise _fail(spot, "piece needs f_lo")
        blocks.append((spot, block))
    pieces = []
    for i, (spot, block) in enumerate(blocks):
        f_lo = _number(block["f_lo"], f"{spot}.f_lo")
        if "f_hi" in block:
            f_hi = _number(block["f_hi"], f"{spot}.f_hi")
        elif i + 1 < len(blocks):
            f_hi = _number(blocks[i + 1][1]["f_lo"], f"{spot}.f_hi")
        else:
            f_hi = math.inf
        form = block.get("form", "constant")
        if not isinstance(form, str):
            raise _fail(f"{spot}.form", f"expected a string, got {form!r}")
        try:
            pieces.append(
                PlanPiece(
                    f_lo,
                    f_hi,
                    form,
                    c=_number(block.get("c", 0.0), f"{spot}.c"),
                    k=_number(block.get("k", 0.0), f"{spot}.k"),
                    s=_number(block.get("s", 0.0), f"{spot}.s"),
                )
            )
        except ValueError as exc:
            raise _fail(spot, str(exc)) from exc
    return tuple(pieces)


def _parse_plans(entries: Any, where: str) -> dict[str, PricePlan]:
    plans: dict[str, PricePlan] = {}
    for i, entry in enumerate(_expect_list(entries, where)):
        spot = f"{where}[{i}]"
        block = _expect_map(entry, spot)
        _check_keys(block, _PLAN_KEYS, spot)
        if "name" not in block or "alpha" not in block:
            raise _fail(spot, "plan needs a name and alpha pieces")
        name = _string(block["name"], f"{spot}.name")
        if name in plans:
            raise _fail(spot, f"duplicate plan name {name!r}")
        alpha = _parse_pieces(block["alpha"], f"{spot}.alpha")
        beta = _parse_pieces(block["beta"], f"{spot}.beta") if "beta" in block else ()
        try:
            plans[name] = PricePlan(name, alpha, beta)
        except ValueError as exc:
            raise _fail(spot, str(exc)) from exc
    return plans


# ---------------------------------------------------------------------------
# whole files
# ---------------------------------------------------------------------------


def parse_scenario(data: Any, base_dir: "Path | str" = ".") -> Scenario:
    """Build a validated :class:`Scenario` from already-loaded YAML data."""
    base_dir = Path(base_dir)
    top = _expect_map(data, "scenario")
    _check_keys(top, _TOP_KEYS, "scenario")
    for key in ("interval", "topology", "subscribers"):
        if key not in top:
            raise _fail("scenario", f"missing required key {key!r}")

    iv_block = _expect_map(top["interval"], "interval")
    _check_keys(iv_block, {"t1", "t2"}, "interval")
    if "t1" not in iv_block or "t2" not in iv_block:
        raise _fail("interval", "needs t1 and t2")
    try:
        interval = TimeInterval(
            _number(iv_block["t1"], "interval.t1"), _number(iv_block["t2"], "interval.t2")
        )
    except ValueError as exc:
        raise _fail("interval", str(exc)) from exc

    topology = _string(top["topology"], "topology")
    order = _integer(top.get("order", DEFAULT_ORDER), "order")
    title = top.get("title", "")
    if not isinstance(title, str):
        raise _fail("title", f"expected a string, got {title!r}")

    plans = _parse_plans(top.get("plans", []), "plans")

    sources: list[SourceSpec] = []
    for i, entry in enumerate(_expect_list(top.get("sources", []), "sources")):
        spot = f"sources[{i}]"
        block = _expect_map(entry, spot)
        _check_keys(block, _SOURCE_KEYS, spot)
        if "id" not in block or "plan" not in block:
            raise _fail(spot, "source needs an id and a plan")
        sid = _string(block["id"], f"{spot}.id")
        plan_name = _string(block["plan"], f"{spot}.plan")
        if plan_name not in plans:
            raise _fail(f"{spot}.plan", f"unknown plan {plan_name!r}")
        curve = _parse_curve(block, interval, base_dir, spot)
        sources.append(SourceSpec(sid, plans[plan_name], curve))

    subscribers: list[SubscriberSpec] = []
    for i, entry in enumerate(_expect_list(top["subscribers"], "subscribers")):
        spot = f"subscribers[{i}]"
        block = _expect_map(entry, spot)
        _check_keys(block, _SUBSCRIBER_KEYS, spot)
        if "id" not in block:
            raise _fail(spot, "subscriber needs an id")
        sub_id = _string(block["id"], f"{spot}.id")
        curve = _parse_curve(block, interval, base_dir, spot)
        if curve is None:
            raise _fail(spot, "subscriber needs a curve (mean/harmonics or csv)")
        subscribers.append(SubscriberSpec(sub_id, curve))

    allocation: list[AllocationSpec] = []
    for i, entry in enumerate(_expect_list(top.get("allocation", []), "allocation")):
        spot = f"allocation[{i}]"
        block = _expect_map(entry, spot)
        _check_keys(block, _ALLOCATION_KEYS, spot)
        if "subscriber" not in block or "source" not in block:
            raise _fail(spot, "allocation row needs subscriber and source ids")
        curve = _parse_curve(block, interval, base_dir, spot)
        if curve is None:
            raise _fail(spot, "allocation row needs a curve (mean/harmonics or csv)")
        allocation.append(
            AllocationSpec(
                _string(block["subscriber"], f"{spot}.subscriber"),
                _string(block["source"], f"{spot}.source"),
                curve,
            )
        )

    return Scenario(
        interval=interval,
        topology=topology,
        sources=tuple(sources),
        subscribers=tuple(subscribers),
        allocation=tuple(allocation),
        order=order,
        title=title,
    )


def load_scenario(path: "str | Path") -> Scenario:
    """Read and validate a scenario file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioFormatError(f"cannot read scenario file {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioFormatError(f"{path}: not valid scenario syntax: {exc}") from exc
    return parse_scenario(data, path.parent)


def find_curve(scenario: Scenario, curve_id: str) -> LoadCurve:
    """Look up a declared curve by id, subscribers first, then sources."""
    for sub in scenario.subscribers:
        if sub.id == curve_id:
            return sub.curve
    for src in scenario.sources:
        if src.id == curve_id:
            if src.curve is None:
                raise ScenarioFormatError(f"source {curve_id!r} declares no curve")
            return src.curve
    known = [s.id for s in scenario.subscribers] + [s.id for s in scenario.sources]
    raise ScenarioFormatError(f"no curve with id {curve_id!r}; known ids: {known}")
