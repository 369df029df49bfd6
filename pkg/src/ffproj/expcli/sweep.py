"""Parameter sweeps over (p, n, k, a, s, construction, seed).

Config files are line oriented::

    # keys before the first section are defaults for every section
    p = 5, 7, 11, 13
    [random-n3]
    construction = random
    nk = 3:1, 3:2
    a = 2.2, 2.5
    s_fraction = 0.45          # s = fraction * (a + 2k - n)/2 + offset
    s_offset = -0.05, 0, 0.05
    seeds = 1, 2, 3, 4, 5

``s = ...`` lists thresholds directly instead. In fraction mode, values
outside 0 < s < min{k, a} and s < (a + 2k - n)/2 are dropped. Seeds only
apply to the ``random`` construction. Instances run in a process pool but
records come out in config order (sections, then construction, (n, k), a, s,
p, seed).
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from ..constructions import parse_construct, random_set
from ..errors import InvalidInputError
from .bounds import main_exponent, theorem_threshold
from .verify import CSV_COLUMNS, SweepRecord, verify_theorem

CSV_VERSION_LINE = "# ffproj-sweep-csv v1"


@dataclass
class Section:
    name: str
    construction: str = "random"
    p: list[int] = field(default_factory=list)
    nk: list[tuple[int, int]] = field(default_factory=list)
    a: list[float] = field(default_factory=list)
    s: list[float] = field(default_factory=list)
    s_fraction: float | None = None
    s_offset: list[float] = field(default_factory=lambda: [0.0])
    seeds: list[int] = field(default_factory=lambda: [0])


@dataclass(frozen=True)
class Instance:
    construction: str
    p: int
    n: int
    k: int
    a_target: float | None
    s: float
    seed: int | None


def _floats(v: str) -> list[float]:
    return [float(x) for x in v.split(",") if x.strip()]


def _ints(v: str) -> list[int]:
    return [int(x) for x in v.split(",") if x.strip()]


def _pairs(v: str) -> list[tuple[int, int]]:
    out = []
    for item in filter(None, (t.strip() for t in v.split(","))):
        n, _, k = item.partition(":")
        out.append((int(n), int(k)))
    return out


_PARSERS = {
    "construction": str.strip,
    "p": _ints,
    "nk": _pairs,
    "a": _floats,
    "s": _floats,
    "s_fraction": float,
    "s_offset": _floats,
    "seeds": _ints,
}


def parse_config(text: str) -> list[Section]:
    defaults: dict[str, str] = {}
    raw_sections: list[tuple[str, dict[str, str]]] = []
    current = defaults
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = {}
            raw_sections.append((line[1:-1].strip(), current))
            continue
        key, eq, value = line.partition("=")
        key = key.strip()
        if not eq or key not in _PARSERS:
            raise InvalidInputError(f"config line {lineno}: cannot parse {raw.strip()!r}")
        current[key] = value.strip()
    if not raw_sections and defaults:
        raw_sections.append(("default", {}))
    sections = []
    for name, body in raw_sections:
        merged = {**defaults, **body}
        sec = Section(name)
        try:
            for key, value in merged.items():
                setattr(sec, key, _PARSERS[key](value))
        except ValueError as exc:
            raise InvalidInputError(f"section [{name}]: {exc}") from exc
        sections.append(sec)
    return sections


def _s_values(sec: Section, n: int, k: int, a: float | None) -> list[float]:
    if sec.s_fraction is None:
        return list(sec.s)
    if a is None:
        raise InvalidInputError(f"section [{sec.name}]: s_fraction needs an a grid")
    thr = theorem_threshold(n, k, a)
    out = []
    for off in sec.s_offset:
        s = sec.s_fraction * thr + off
        if 0 < s < min(k, a) and s < thr:
            out.append(s)
    return out


def expand(sections: Iterable[Section]) -> Iterator[Instance]:
    for sec in sections:
        kind = sec.construction.partition(":")[0]
        for n, k in sec.nk:
            for a in sec.a or [None]:
                for s in _s_values(sec, n, k, a):
                    for p in sec.p:
                        for seed in sec.seeds if kind == "random" else [None]:
                            yield Instance(sec.construction, p, n, k, a, s, seed)


def build_set(inst: Instance):
    kind = inst.construction.partition(":")[0]
    if kind == "random":
        if inst.a_target is None:
            raise InvalidInputError("random construction needs a")
        return random_set(inst.p, inst.n, inst.a_target, inst.seed or 0)
    spec = parse_construct(inst.construction)
    target = spec.base if spec.kind == "cylinder" else spec
    target.params.setdefault("p", str(inst.p))
    if target.kind == "st_product":
        target.params.setdefault("a", str(inst.a_target))
        target.params.setdefault("s", str(inst.s))
    if target.kind == "planar_slab":
        target.params.setdefault("n", str(inst.n if spec.kind != "cylinder" else inst.n - 1))
        target.params.setdefault("k", str(inst.k))
    if spec.kind == "cylinder":
        spec.params.setdefault("n", str(inst.n))
    A = spec.build().A
    if A.n != inst.n:
        raise InvalidInputError(f"{inst.construction} builds a set in F_p^{A.n}, expected n={inst.n}")
    return A


def run_instance(inst: Instance) -> SweepRecord:
    try:
        A = build_set(inst)
        return verify_theorem(
            A, inst.k, inst.s, construction=inst.construction, seed=inst.seed, a_target=inst.a_target
        )
    except Exception as exc:  # noqa: BLE001 - a failed instance must not stop the sweep
        return SweepRecord(
            p=inst.p, n=inst.n, k=inst.k, construction=inst.construction, seed=inst.seed,
            a_target=inst.a_target, s=inst.s, status="failed", error=" ".join(f"{type(exc).__name__}: {exc}".split()),
        )


def run_sweep(sections: Iterable[Section], workers: int = 1) -> list[SweepRecord]:
    instances = list(expand(sections))
    if workers <= 1 or len(instances) <= 1:
        return [run_instance(i) for i in instances]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_instance, instances, chunksize=1))


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def records_to_csv(records: Iterable[SweepRecord]) -> str:
    buf = io.StringIO()
    buf.write(CSV_VERSION_LINE + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        d = r.as_dict()
        w.writerow([_cell(d[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


_FIELD_TYPES = {f.name: f.type for f in fields(SweepRecord)}


def _parse_cell(name: str, text: str):
    kind = _FIELD_TYPES[name]
    if text == "" and "None" in kind:
        return None
    if kind.startswith("int"):
        return int(text)
    if kind.startswith("float"):
        return float(text)
    if kind == "bool":
        return text == "true"
    return text


def records_from_csv(text: str) -> list[SweepRecord]:
    buf = io.StringIO(text, newline="")
    if buf.readline().rstrip("\r\n") != CSV_VERSION_LINE:
        raise InvalidInputError("not a sweep CSV (missing version line)")
    reader = csv.reader(buf)
    if tuple(next(reader, ())) != CSV_COLUMNS:
        raise InvalidInputError("unexpected sweep CSV columns")
    return [SweepRecord(**{c: _parse_cell(c, v) for c, v in zip(CSV_COLUMNS, row)}) for row in reader]


_RATIO_KEYS = {
    "main_ratio": "max_main_ratio",
    "falconer_ratio": "max_falconer_ratio",
    "falconer_free_ratio": "max_falconer_free_ratio",
}


def summarize(records: list[SweepRecord]) -> dict:
    """Max ratios per (n, k) and log-log slopes of max-over-seeds #E / ln p against p."""
    ok = [r for r in records if r.status == "ok"]
    per_nk: dict[str, dict] = {}
    for r in ok:
        slot = per_nk.setdefault(f"{r.n}:{r.k}", dict.fromkeys(_RATIO_KEYS.values(), 0.0))
        for attr, key in _RATIO_KEYS.items():
            value = getattr(r, attr)
            if value is not None:
                slot[key] = max(slot[key], value)
    groups: dict[tuple, dict[int, float]] = {}
    for r in ok:
        key = (r.construction, r.n, r.k, r.a_target, r.s)
        by_p = groups.setdefault(key, {})
        by_p[r.p] = max(by_p.get(r.p, 0.0), r.exceptional / math.log(r.p))
    slopes = []
    for (cons, n, k, a, s), by_p in groups.items():
        pts = sorted(by_p.items())
        pos = [(p, y) for p, y in pts if y > 0]
        slope = None
        if len(pos) >= 2:
            x = np.log([p for p, _ in pos])
            y = np.log([v for _, v in pos])
            slope = float(np.polyfit(x, y, 1)[0])
        entry = {
            "construction": cons, "n": n, "k": k, "a": a, "s": s,
            "t": main_exponent(n, k, a, s) if a is not None else None,
            "points": [[p, y] for p, y in pts],
            "slope": slope,
        }
        if n == 2 and a is not None:
            entry["reference_2s_minus_a"] = max(0.0, 2 * s - a)
        slopes.append(entry)
    return {
        "records": len(records),
        "failed": len(records) - len(ok),
        "per_nk": per_nk,
        "slopes": slopes,
    }


def records_to_json(records: list[SweepRecord], summary: dict | None = None) -> str:
    doc = {
        "version": 1,
        "columns": list(CSV_COLUMNS),
        "records": [r.as_dict() for r in records],
        "summary": summarize(records) if summary is None else summary,
    }
    return json.dumps(doc, indent=2) + "\n"


def records_from_json(text: str) -> list[SweepRecord]:
    doc = json.loads(text)
    return [SweepRecord(**rec) for rec in doc["records"]]


def load_config(path: str | Path) -> list[Section]:
    return parse_config(Path(path).read_text())
