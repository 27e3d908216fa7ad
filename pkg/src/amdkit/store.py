"""Event-sourced work-item store.

Truth lives in an append-only JSON-lines event log; in-memory state is the
fold of that log and a periodic JSON snapshot only speeds up reopening.
Every mutation is validated, written (and flushed) to the log, and only
then applied to memory, so a crash at any point leaves a log whose replay
equals the last acknowledged state. A torn trailing line (no newline) is an
unacknowledged write and is dropped on recovery; a gap in sequence numbers
means real corruption and refuses to load.

Single-writer model: one lock serializes mutations, readers see consistent
state by taking the same lock for the duration of a projection.
"""

from __future__ import annotations

import datetime as _dt
import json
import os
import threading
from dataclasses import asdict, dataclass
from enum import Enum
from pathlib import Path
from typing import Callable

from .attribution import Attribution, Source
from .attribution import override as override_attribution_fn
from .model import Amendment
from .similarity import DuplicateCluster
from .summarizer import SummaryRecord, ValidationReport

EVENTS_FILE = "events.jsonl"
SNAPSHOT_FILE = "snapshot.json"
SNAPSHOT_EVERY = 500


class Status(str, Enum):
    NEW = "new"
    ATTRIBUTED = "attributed"
    DEDUPED = "deduped"
    SUMMARIZED = "summarized"
    REVIEWED = "reviewed"


_STATUS_ORDER = {s: i for i, s in enumerate(Status)}


class StoreCorruptError(RuntimeError):
    pass


class UnknownEventError(ValueError):
    pass


@dataclass(frozen=True)
class Event:
    seq: int
    type: str
    payload: dict
    actor: str
    ts: str


def _attribution_to_dict(att: Attribution) -> dict:
    out = {
        "amendment_id": att.amendment_id,
        "bureau": att.bureau,
        "score": att.score,
        "matched_rules": list(att.matched_rules),
        "source": att.source.value,
    }
    if att.previous is not None:
        out["previous"] = _attribution_to_dict(att.previous)
    return out


def _attribution_from_dict(data: dict) -> Attribution:
    previous = _attribution_from_dict(data["previous"]) if data.get("previous") else None
    return Attribution(
        amendment_id=data["amendment_id"],
        bureau=data["bureau"],
        score=data["score"],
        matched_rules=tuple(data["matched_rules"]),
        source=Source(data["source"]),
        previous=previous,
    )


def summary_to_dict(record: SummaryRecord) -> dict:
    data = asdict(record)
    data["provenance"] = record.provenance.value
    data["validation"] = asdict(record.validation)
    data["validation"]["details"] = list(record.validation.details)
    return data


def summary_from_dict(data: dict) -> SummaryRecord:
    validation = ValidationReport(
        single_sentence=data["validation"]["single_sentence"],
        starts_with_infinitive=data["validation"]["starts_with_infinitive"],
        figures_preserved=data["validation"]["figures_preserved"],
        length_ok=data["validation"]["length_ok"],
        details=tuple(data["validation"]["details"]),
    )
    from .summarizer import Provenance

    return SummaryRecord(
        summary_id=data["summary_id"],
        amendment_id=data["amendment_id"],
        text=data["text"],
        backend_id=data["backend_id"],
        template_id=data["template_id"],
        created_at=data["created_at"],
        validation=validation,
        provenance=Provenance(data["provenance"]),
        parent_summary_id=data.get("parent_summary_id"),
        attempts=data.get("attempts", 1),
    )


class Store:
    """Event log plus its folded state. Use :meth:`open` to load from disk."""

    def __init__(self, root: str | Path, clock: Callable[[], str] | None = None, durable: bool = True):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.clock = clock or (lambda: _dt.datetime.now(_dt.timezone.utc).isoformat())
        self.durable = durable
        self.lock = threading.RLock()
        self.last_seq = 0
        self._events_since_snapshot = 0
        self._fh = None
        self._reset_state()

    def _reset_state(self) -> None:
        self.amendments: dict[str, dict] = {}
        self.order: list[str] = []
        self.status: dict[str, str] = {}
        self.attributions: dict[str, dict] = {}
        self.clusters: dict[str, dict] = {}
        self.cluster_of: dict[str, str] = {}
        self.summaries: dict[str, dict] = {}
        self.summary_of: dict[str, str] = {}
        self.reviews: list[dict] = []
        self.tasks: dict[str, dict] = {}
        self.runs: list[dict] = []

    # -- persistence --------------------------------------------------------

    @property
    def events_path(self) -> Path:
        return self.root / EVENTS_FILE

    @property
    def snapshot_path(self) -> Path:
        return self.root / SNAPSHOT_FILE

    @classmethod
    def open(cls, root: str | Path, clock: Callable[[], str] | None = None, durable: bool = True) -> "Store":
        store = cls(root, clock=clock, durable=durable)
        store._load()
        return store

    def _load(self) -> None:
        self._reset_state()
        self.last_seq = 0
        if self.snapshot_path.exists():
            snap = json.loads(self.snapshot_path.read_text(encoding="utf-8"))
            self._restore_snapshot(snap)
        if self.events_path.exists():
            raw = self.events_path.read_bytes().decode("utf-8")
            lines = raw.split("\n")
            if lines and lines[-1] == "":
                lines.pop()
            elif lines:
                lines.pop()  # torn trailing line: never acknowledged, drop it
            for line in lines:
                event = json.loads(line)
                seq = event["seq"]
                if seq <= self.last_seq:
                    continue  # already folded into the snapshot
                if seq != self.last_seq + 1:
                    raise StoreCorruptError(
                        f"sequence gap: expected {self.last_seq + 1}, found {seq}"
                    )
                self._apply(event["type"], event["payload"])
                self.last_seq = seq

    def _open_log(self):
        if self._fh is None:
            self._fh = open(self.events_path, "a", encoding="utf-8")
        return self._fh

    def append(self, event_type: str, payload: dict, actor: str = "system") -> Event:
        """Validate, persist, then apply. The write-ahead contract: nothing
        is acknowledged that is not already on disk."""
        with self.lock:
            self._check(event_type, payload)
            event = Event(
                seq=self.last_seq + 1,
                type=event_type,
                payload=payload,
                actor=actor,
                ts=self.clock(),
            )
            fh = self._open_log()
            fh.write(json.dumps(asdict(event), ensure_ascii=False) + "\n")
            fh.flush()
            if self.durable:
                os.fsync(fh.fileno())
            self._apply(event_type, payload)
            self.last_seq = event.seq
            self._events_since_snapshot += 1
            if self._events_since_snapshot >= SNAPSHOT_EVERY:
                self.write_snapshot()
            return event

    def close(self) -> None:
        with self.lock:
            self.write_snapshot()
            if self._fh is not None:
                self._fh.close()
                self._fh = None

    # -- state fold ---------------------------------------------------------

    def _check(self, event_type: str, payload: dict) -> None:
        if event_type == "amendment_added":
            ident = payload["record"]["id"]
            if ident in self.amendments and self.amendments[ident] != payload["record"]:
                raise ValueError(f"amendment {ident!r} already exists with different content")
        elif event_type in ("attribution_set", "attribution_overridden"):
            ident = payload["amendment_id"]
            if ident not in self.amendments:
                raise KeyError(f"unknown amendment {ident!r}")
            if event_type == "attribution_overridden" and not str(payload.get("bureau", "")).strip():
                raise ValueError("override bureau must be non-empty")
        elif event_type == "clusters_set":
            for cluster in payload["clusters"]:
                for member in cluster["members"]:
                    if member not in self.amendments:
                        raise KeyError(f"cluster member {member!r} not in store")
        elif event_type in ("summary_added", "summary_edited", "summary_reused"):
            record = payload["record"]
            if record["amendment_id"] not in self.amendments:
                raise KeyError(f"unknown amendment {record['amendment_id']!r}")
            if not record["text"].strip():
                raise ValueError("summary text must be non-empty")
            if event_type == "summary_edited" and record.get("parent_summary_id") not in self.summaries:
                raise KeyError("edited summary must chain to an existing record")
        elif event_type == "review_added":
            rating = payload["rating"]
            if not isinstance(rating, int) or not 0 <= rating <= 10:
                raise ValueError(f"rating must be an integer in 0..10, got {rating!r}")
        elif event_type == "task_enqueued":
            if payload["amendment_id"] not in self.amendments:
                raise KeyError(f"unknown amendment {payload['amendment_id']!r}")
        elif event_type in ("task_completed", "task_failed"):
            if payload["task_id"] not in self.tasks:
                raise KeyError(f"unknown task {payload['task_id']!r}")
        elif event_type == "run_completed":
            pass
        else:
            raise UnknownEventError(event_type)

    def _advance(self, ident: str, target: Status) -> None:
        current = self.status.get(ident, Status.NEW.value)
        if _STATUS_ORDER[Status(current)] < _STATUS_ORDER[target]:
            self.status[ident] = target.value

    def _apply(self, event_type: str, payload: dict) -> None:
        if event_type == "amendment_added":
            record = payload["record"]
            ident = record["id"]
            if ident not in self.amendments:
                self.order.append(ident)
                self.status[ident] = Status.NEW.value
            self.amendments[ident] = record
        elif event_type == "attribution_set":
            ident = payload["amendment_id"]
            self.attributions[ident] = payload["attribution"]
            self._advance(ident, Status.ATTRIBUTED)
        elif event_type == "attribution_overridden":
            ident = payload["amendment_id"]
            current = self.attributions.get(ident) or {
                "amendment_id": ident,
                "bureau": None,
                "score": 0,
                "matched_rules": [],
                "source": Source.AUTO.value,
            }
            new = override_attribution_fn(_attribution_from_dict(current), payload["bureau"])
            self.attributions[ident] = _attribution_to_dict(new)
            # a human decision re-opens the item at the attribution step
            self.status[ident] = Status.ATTRIBUTED.value
        elif event_type == "clusters_set":
            self.clusters = {}
            self.cluster_of = {}
            for cluster in payload["clusters"]:
                cid = f"cluster-{cluster['representative']}"
                self.clusters[cid] = {
                    "cluster_id": cid,
                    "members": list(cluster["members"]),
                    "representative": cluster["representative"],
                }
                for member in cluster["members"]:
                    self.cluster_of[member] = cid
            for ident in payload.get("processed_ids", []):
                self._advance(ident, Status.DEDUPED)
        elif event_type in ("summary_added", "summary_reused"):
            record = payload["record"]
            self.summaries[record["summary_id"]] = record
            self.summary_of[record["amendment_id"]] = record["summary_id"]
            self._advance(record["amendment_id"], Status.SUMMARIZED)
        elif event_type == "summary_edited":
            record = payload["record"]
            self.summaries[record["summary_id"]] = record
            self.summary_of[record["amendment_id"]] = record["summary_id"]
            self._advance(record["amendment_id"], Status.SUMMARIZED)
        elif event_type == "review_added":
            self.reviews.append(
                {
                    "reviewer_id": payload["reviewer_id"],
                    "item_id": payload["item_id"],
                    "rating": payload["rating"],
                }
            )
            target = payload["item_id"]
            if target in self.summaries:
                target = self.summaries[target]["amendment_id"]
            if target in self.amendments:
                self._advance(target, Status.REVIEWED)
        elif event_type == "task_enqueued":
            self.tasks[payload["task_id"]] = {
                "task_id": payload["task_id"],
                "amendment_id": payload["amendment_id"],
                "mode": payload.get("mode", "zero"),
                "status": "pending",
                "summary_id": None,
                "error": None,
            }
        elif event_type == "task_completed":
            record = payload["record"]
            task = self.tasks[payload["task_id"]]
            task["status"] = "done"
            task["summary_id"] = record["summary_id"]
            self.summaries[record["summary_id"]] = record
            self.summary_of[record["amendment_id"]] = record["summary_id"]
            self._advance(record["amendment_id"], Status.SUMMARIZED)
        elif event_type == "task_failed":
            task = self.tasks[payload["task_id"]]
            task["status"] = "failed"
            task["error"] = payload.get("error", "")
        elif event_type == "run_completed":
            self.runs.append(payload["report"])

    # -- snapshots ----------------------------------------------------------

    def state_snapshot(self) -> dict:
        """Canonical JSON-able state, the object kill-and-replay compares."""
        with self.lock:
            return json.loads(
                json.dumps(
                    {
                        "last_seq": self.last_seq,
                        "amendments": self.amendments,
                        "order": self.order,
                        "status": self.status,
                        "attributions": self.attributions,
                        "clusters": self.clusters,
                        "cluster_of": self.cluster_of,
                        "summaries": self.summaries,
                        "summary_of": self.summary_of,
                        "reviews": self.reviews,
                        "tasks": self.tasks,
                        "runs": self.runs,
                    },
                    sort_keys=True,
                    ensure_ascii=False,
                )
            )

    def write_snapshot(self) -> None:
        with self.lock:
            tmp = self.snapshot_path.with_suffix(".tmp")
            tmp.write_text(
                json.dumps(self.state_snapshot(), ensure_ascii=False), encoding="utf-8"
            )
            tmp.replace(self.snapshot_path)
            self._events_since_snapshot = 0

    def _restore_snapshot(self, snap: dict) -> None:
        self.last_seq = snap["last_seq"]
        self.amendments = snap["amendments"]
        self.order = snap["order"]
        self.status = snap["status"]
        self.attributions = snap["attributions"]
        self.clusters = snap["clusters"]
        self.cluster_of = snap["cluster_of"]
        self.summaries = snap["summaries"]
        self.summary_of = snap["summary_of"]
        self.reviews = snap["reviews"]
        self.tasks = snap["tasks"]
        self.runs = snap["runs"]

    # -- idempotent helpers (used by the pipeline and the service) ----------

    def add_amendment(self, record: dict, actor: str = "system") -> bool:
        with self.lock:
            if self.amendments.get(record["id"]) == record:
                return False
            self.append("amendment_added", {"record": record}, actor)
            return True

    def set_attribution(self, att: Attribution, actor: str = "system") -> bool:
        with self.lock:
            data = _attribution_to_dict(att)
            if self.attributions.get(att.amendment_id) == data:
                return False
            self.append(
                "attribution_set",
                {"amendment_id": att.amendment_id, "attribution": data},
                actor,
            )
            return True

    def override_attribution(self, amendment_id: str, bureau: str, actor: str = "agent") -> dict:
        with self.lock:
            self.append(
                "attribution_overridden",
                {"amendment_id": amendment_id, "bureau": bureau},
                actor,
            )
            return self.attributions[amendment_id]

    def set_clusters(self, clusters: list[DuplicateCluster], processed_ids: list[str], actor: str = "system") -> bool:
        with self.lock:
            payload = {
                "clusters": [
                    {"members": list(c.member_ids), "representative": c.representative_id}
                    for c in clusters
                ],
                "processed_ids": processed_ids,
            }
            current = [
                {"members": c["members"], "representative": c["representative"]}
                for _, c in sorted(self.clusters.items())
            ]
            already_processed = all(
                _STATUS_ORDER[Status(self.status.get(i, "new"))] >= _STATUS_ORDER[Status.DEDUPED]
                for i in processed_ids
            )
            if current == payload["clusters"] and already_processed:
                return False
            self.append("clusters_set", payload, actor)
            return True

    def add_summary(self, record: SummaryRecord, actor: str = "system", reused_from: str | None = None) -> bool:
        with self.lock:
            data = summary_to_dict(record)
            if reused_from is not None:
                data["reused_from"] = reused_from
            if data["summary_id"] in self.summaries:
                return False
            event_type = "summary_reused" if reused_from else "summary_added"
            self.append(event_type, {"record": data}, actor)
            return True

    def edit_summary_record(self, record: SummaryRecord, actor: str = "agent") -> bool:
        with self.lock:
            self.append("summary_edited", {"record": summary_to_dict(record)}, actor)
            return True

    def add_review(self, reviewer_id: str, item_id: str, rating: int, actor: str = "agent") -> bool:
        with self.lock:
            self.append(
                "review_added",
                {"reviewer_id": reviewer_id, "item_id": item_id, "rating": rating},
                actor,
            )
            return True

    def enqueue_task(self, amendment_id: str, mode: str, actor: str = "agent") -> str:
        with self.lock:
            task_id = f"task-{self.last_seq + 1:08d}"
            self.append(
                "task_enqueued",
                {"task_id": task_id, "amendment_id": amendment_id, "mode": mode},
                actor,
            )
            return task_id

    def complete_task(self, task_id: str, record: SummaryRecord, actor: str = "system") -> None:
        with self.lock:
            self.append(
                "task_completed",
                {"task_id": task_id, "record": summary_to_dict(record)},
                actor,
            )

    def fail_task(self, task_id: str, error: str, actor: str = "system") -> None:
        with self.lock:
            self.append("task_failed", {"task_id": task_id, "error": error}, actor)

    def record_run(self, report: dict, actor: str = "system") -> None:
        with self.lock:
            self.append("run_completed", {"report": report}, actor)

    # -- projections --------------------------------------------------------

    def work_item(self, amendment_id: str) -> dict | None:
        with self.lock:
            if amendment_id not in self.amendments:
                return None
            summary_id = self.summary_of.get(amendment_id)
            return {
                "amendment_id": amendment_id,
                "status": self.status.get(amendment_id, Status.NEW.value),
                "amendment": self.amendments[amendment_id],
                "attribution": self.attributions.get(amendment_id),
                "cluster_id": self.cluster_of.get(amendment_id),
                "summary": self.summaries.get(summary_id) if summary_id else None,
            }

    def work_items(self, status: str | None = None, bureau: str | None = None) -> list[dict]:
        with self.lock:
            items = [self.work_item(i) for i in self.order]
        out = []
        for item in items:
            if status and item["status"] != status:
                continue
            if bureau is not None:
                att = item["attribution"]
                item_bureau = att["bureau"] if att else None
                if bureau == "unassigned":
                    if item_bureau is not None:
                        continue
                elif item_bureau != bureau:
                    continue
            out.append(item)
        return out

    def stats(self) -> dict:
        with self.lock:
            total = len(self.order)
            assigned = sum(
                1 for a in self.attributions.values() if a.get("bureau") is not None
            )
            attributed_total = len(self.attributions)
            extra = sum(len(c["members"]) - 1 for c in self.clusters.values())
            status_counts: dict[str, int] = {s.value: 0 for s in Status}
            for ident in self.order:
                status_counts[self.status.get(ident, Status.NEW.value)] += 1
            return {
                "total": total,
                "coverage": (assigned / attributed_total) if attributed_total else 0.0,
                "duplicate_rate": (extra / total) if total else 0.0,
                "status_counts": status_counts,
                "clusters": len(self.clusters),
                "summaries": len(self.summaries),
                "reviews": len(self.reviews),
            }


def amendment_from_store(record: dict) -> Amendment:
    from .ingest import parse_json_record

    return parse_json_record(record)
