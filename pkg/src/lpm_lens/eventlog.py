"""Event logs as multisets of traces, CSV/XES ingestion and log projection."""
from __future__ import annotations

import csv
import io
import logging
import xml.etree.ElementTree as ET
from collections import Counter
from datetime import datetime
from typing import IO, Iterable, Iterator, Mapping, Sequence

logger = logging.getLogger(__name__)

Trace = tuple  # tuple[str, ...]


class LogFormatError(ValueError):
    """Raised when an input file cannot be turned into an event log."""


class EmptyLogError(LogFormatError):
    pass


class EventLog:
    """Immutable multiset of traces.

    Traces are tuples of activity names. Activities are interned to dense
    integer ids following the lexicographic order of their names, which is
    the fixed activity order used by every matrix in the package.

    Empty traces are kept (they count towards ``n_traces``) but contribute
    no events.
    """

    __slots__ = ("_traces", "activities", "index", "skipped_events", "_encoded", "_hash", "n_traces", "n_events")

    def __init__(self, traces: Mapping[Sequence[str], int] | Iterable[Sequence[str]] = (),
                 skipped_events: int = 0):
        counts: Counter = Counter()
        if isinstance(traces, Mapping):
            for trace, mult in traces.items():
                if mult < 0:
                    raise ValueError("trace multiplicity must be non-negative")
                if mult:
                    counts[tuple(trace)] += int(mult)
        else:
            for trace in traces:
                counts[tuple(trace)] += 1
        self._traces: dict[Trace, int] = dict(sorted(counts.items()))
        names = sorted({a for t in self._traces for a in t})
        for a in names:
            if not isinstance(a, str) or not a:
                raise ValueError(f"activity labels must be non-empty strings, got {a!r}")
        self.activities: tuple[str, ...] = tuple(names)
        self.index: dict[str, int] = {a: i for i, a in enumerate(names)}
        self.skipped_events = skipped_events
        self._encoded = None
        self._hash = None
        self.n_traces: int = sum(self._traces.values())
        self.n_events: int = sum(len(t) * m for t, m in self._traces.items())

    # multiset protocol

    @property
    def traces(self) -> Mapping[Trace, int]:
        return dict(self._traces)

    def items(self) -> Iterator[tuple[Trace, int]]:
        return iter(self._traces.items())

    def __iter__(self) -> Iterator[Trace]:
        for trace, mult in self._traces.items():
            for _ in range(mult):
                yield trace

    def __len__(self) -> int:
        return self.n_traces

    def __eq__(self, other) -> bool:
        if not isinstance(other, EventLog):
            return NotImplemented
        return self._traces == other._traces

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._traces.items()))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"<{','.join(t)}>^{m}" for t, m in self._traces.items())
        return f"EventLog([{body}])"

    @property
    def alphabet(self) -> frozenset[str]:
        return frozenset(self.activities)

    def count(self, activity: str) -> int:
        return sum(t.count(activity) * m for t, m in self._traces.items())

    def activity_counts(self) -> dict[str, int]:
        counts: Counter = Counter()
        for t, m in self._traces.items():
            for a in t:
                counts[a] += m
        return {a: counts[a] for a in self.activities}

    def encoded(self) -> list[tuple[tuple[int, ...], int]]:
        """Traces as tuples of activity ids, paired with multiplicities."""
        if self._encoded is None:
            idx = self.index
            self._encoded = [(tuple(idx[a] for a in t), m) for t, m in self._traces.items()]
        return self._encoded

    def project(self, activities: Iterable[str]) -> EventLog:
        return project_log(self, activities)


def project_trace(trace: Sequence[str], activities: Iterable[str]) -> Trace:
    """Keep only the events whose activity is in ``activities``, order preserved.

    >>> project_trace(("a", "b", "c", "a", "b", "c"), {"a", "c"})
    ('a', 'c', 'a', 'c')
    """
    keep = activities if isinstance(activities, (set, frozenset)) else set(activities)
    return tuple(a for a in trace if a in keep)


def project_log(log: EventLog, activities: Iterable[str]) -> EventLog:
    keep = frozenset(activities)
    if keep >= log.alphabet:
        return log
    out: Counter = Counter()
    for trace, mult in log.items():
        out[project_trace(trace, keep)] += mult
    return EventLog(out)


# ingestion

def _timestamp_key(values: Sequence[str]):
    """Pick the strongest ordering that parses every timestamp value."""
    try:
        return [float(v) for v in values]
    except ValueError:
        pass
    try:
        return [_parse_iso(v) for v in values]
    except ValueError:
        return list(values)


def _parse_iso(value: str) -> float:
    v = value.strip()
    if v.endswith("Z"):
        v = v[:-1] + "+00:00"
    dt = datetime.fromisoformat(v)
    if dt.tzinfo is None:
        # naive timestamps are read as UTC so ordering is machine-independent
        return (dt - datetime(1970, 1, 1)).total_seconds()
    return dt.timestamp()


def _as_text(stream: IO) -> IO[str]:
    if isinstance(stream, (bytes, bytearray)):
        return io.StringIO(stream.decode("utf-8-sig"))
    if isinstance(stream, str):
        return io.StringIO(stream)
    if isinstance(stream, io.TextIOBase):
        return stream
    return io.TextIOWrapper(stream, encoding="utf-8-sig", newline="")


def parse_csv(stream, case_col: str = "case", activity_col: str = "activity",
              time_col: str | None = None, delimiter: str = ",") -> EventLog:
    """Read an event log from CSV with a header row.

    Events are grouped by case id in order of first appearance and, if a
    timestamp column is given, stably sorted by it within each case.
    """
    reader = csv.DictReader(_as_text(stream), delimiter=delimiter)
    if reader.fieldnames is None:
        raise EmptyLogError("empty CSV file")
    header = [h.strip() for h in reader.fieldnames]
    reader.fieldnames = header
    for col in (case_col, activity_col, time_col):
        if col is not None and col not in header:
            raise LogFormatError(f"missing column {col!r} (found {', '.join(header)})")

    cases: dict[str, list[tuple[str, str]]] = {}
    for row in reader:
        case = row[case_col]
        act = (row[activity_col] or "").strip()
        if not act:
            raise LogFormatError(f"empty activity in case {case!r} (line {reader.line_num})")
        ts = row[time_col] if time_col is not None else ""
        cases.setdefault(case, []).append((act, ts))
    if not cases:
        raise EmptyLogError("CSV file contains a header but no events")

    traces: Counter = Counter()
    if time_col is not None:
        all_ts = [ts for evs in cases.values() for _, ts in evs]
        keys = iter(_timestamp_key(all_ts))
        keyed = {c: [(next(keys), a) for a, _ in evs] for c, evs in cases.items()}
        for evs in keyed.values():
            evs_sorted = sorted(evs, key=lambda e: e[0])  # stable: ties keep file order
            traces[tuple(a for _, a in evs_sorted)] += 1
    else:
        for evs in cases.values():
            traces[tuple(a for a, _ in evs)] += 1
    return EventLog(traces)


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def parse_xes(stream) -> EventLog:
    """Read the ``concept:name``/``time:timestamp`` subset of an XES document.

    Events without a ``concept:name`` are skipped; the count is kept in
    ``EventLog.skipped_events``.
    """
    if isinstance(stream, str):
        stream = io.BytesIO(stream.encode("utf-8"))
    elif isinstance(stream, (bytes, bytearray)):
        stream = io.BytesIO(stream)
    traces: Counter = Counter()
    skipped = 0
    n_traces = 0
    try:
        for _, elem in ET.iterparse(stream, events=("end",)):
            if _local(elem.tag) != "trace":
                continue
            n_traces += 1
            events = []
            for pos, ev in enumerate(c for c in elem if _local(c.tag) == "event"):
                name, ts = None, None
                for attr in ev:
                    key = attr.get("key")
                    if key == "concept:name" and _local(attr.tag) == "string":
                        name = attr.get("value")
                    elif key == "time:timestamp":
                        ts = attr.get("value")
                if not name:
                    skipped += 1
                    continue
                events.append((name, ts, pos))
            if events and all(ts is not None for _, ts, _ in events):
                keys = _timestamp_key([ts for _, ts, _ in events])
                order = sorted(range(len(events)), key=lambda i: keys[i])
                events = [events[i] for i in order]
            traces[tuple(name for name, _, _ in events)] += 1
            elem.clear()
    except ET.ParseError as exc:
        line, col = exc.position
        raise LogFormatError(f"malformed XES at line {line}, column {col}: {exc}") from exc
    if skipped:
        logger.warning("skipped %d events without concept:name", skipped)
    if n_traces == 0:
        raise EmptyLogError("XES document contains no traces")
    return EventLog(traces, skipped_events=skipped)


def read_log(path: str, case_col: str = "case", activity_col: str = "activity",
             time_col: str | None = None) -> EventLog:
    """Load a log from ``path``, choosing the parser from the file extension."""
    if path.lower().endswith((".xes", ".xml")):
        with open(path, "rb") as fh:
            return parse_xes(fh)
    with open(path, "rb") as fh:
        return parse_csv(fh, case_col=case_col, activity_col=activity_col, time_col=time_col)


def write_csv(log: EventLog, stream: IO[str]) -> None:
    """Serialize with columns ``case,activity,index``; one case per trace copy.

    Empty traces have no rows and are therefore lost on re-parsing.
    """
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["case", "activity", "index"])
    case = 0
    for trace in log:
        for i, a in enumerate(trace):
            writer.writerow([f"c{case}", a, i])
        case += 1


def to_csv(log: EventLog) -> str:
    buf = io.StringIO()
    write_csv(log, buf)
    return buf.getvalue()
