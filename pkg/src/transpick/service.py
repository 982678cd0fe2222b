"""Annotation service: runs campaigns whose translation step blocks on
human submissions over HTTP.

One session = one campaign.  The campaign runs in a worker thread; when
it needs translations it parks on a condition variable and the session
becomes `awaiting_translations` until every example in the batch has
been submitted.  Submissions are validated all-or-nothing, stored
verbatim, and appended to a per-session journal so a restarted service
replays them and lands in the same state.
"""
from __future__ import annotations

import json
import os
import re
import threading
import uuid
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .corpus import load_corpus
from .engine import CampaignConfig, config_from_mapping, run_campaign
from .translation import CallbackOracle, GoldRevealOracle

STATUS_TRAINING = "training"
STATUS_AWAITING = "awaiting_translations"
STATUS_FINISHED = "finished"
STATUS_FAILED = "failed"

REPLAY_TIMEOUT = 60.0


class ServiceError(Exception):
    def __init__(self, code: str, message: str, http_status: int = 400):
        super().__init__(message)
        self.code = code
        self.message = message
        self.http_status = http_status


class AnnotationSession:
    def __init__(self, session_id: str, raw_config: dict, config: CampaignConfig, corpus, journal_path=None):
        self.id = session_id
        self.raw_config = raw_config
        self.config = config
        self.corpus = corpus
        self.cond = threading.Condition()
        self.status = STATUS_TRAINING
        self.round = 0
        self.pending: dict[str, dict] = {}
        self.submitted: dict[str, str] = {}
        self.translated_total = 0
        self.metrics: list[dict] = []
        self.error: str | None = None
        self.final_state = None
        self.closed = False
        self.journal_path = journal_path
        self._journal_fh = None
        self.suppress_round_journal = False
        self.thread: threading.Thread | None = None

    # -- journal ------------------------------------------------------

    def journal(self, event: dict):
        if self.journal_path is None:
            return
        if self._journal_fh is None:
            self._journal_fh = open(self.journal_path, "a", encoding="utf-8")
        self._journal_fh.write(json.dumps(event, ensure_ascii=False, sort_keys=True) + "\n")
        self._journal_fh.flush()

    # -- campaign-side interface --------------------------------------

    def oracle_translate(self, example_ids: list[str], target_lang: str) -> dict[str, str]:
        src = self.config.source_lang
        with self.cond:
            self.round += 1
            self.pending = {}
            for ex_id in example_ids:
                ex = self.corpus.by_id(ex_id)
                item = {"example_id": ex_id, "utterance": ex.utterances[src]}
                if self.config.show_lf:
                    item["lf"] = ex.lf
                self.pending[ex_id] = item
            self.submitted = {}
            self.status = STATUS_AWAITING
            self.cond.notify_all()
            while len(self.submitted) < len(self.pending):
                if self.closed:
                    raise RuntimeError("service closed while awaiting translations")
                self.cond.wait(timeout=1.0)
            result = dict(self.submitted)
            self.pending = {}
            self.submitted = {}
            self.translated_total += len(result)
            self.status = STATUS_TRAINING
            return result

    def on_round(self, state, record: dict):
        with self.cond:
            self.metrics.append(dict(record))
        if not self.suppress_round_journal:
            self.journal({"event": "round", "record": record})

    def mark_finished(self):
        with self.cond:
            self.status = STATUS_FINISHED
            self.cond.notify_all()

    def mark_failed(self, error: str):
        with self.cond:
            self.status = STATUS_FAILED
            self.error = error
            self.cond.notify_all()

    # -- HTTP-side interface ------------------------------------------

    def batch(self) -> dict:
        with self.cond:
            items = [
                self.pending[ex_id]
                for ex_id in sorted(self.pending)
                if ex_id not in self.submitted
            ]
            return {
                "session_id": self.id,
                "round": self.round,
                "status": self.status,
                "items": items,
            }

    def submit(self, translations: dict, from_journal: bool = False) -> dict:
        if not isinstance(translations, dict) or not translations:
            raise ServiceError("invalid_submission", "translations must be a non-empty object")
        with self.cond:
            if self.status != STATUS_AWAITING:
                raise ServiceError(
                    "not_awaiting",
                    f"session is {self.status}, not awaiting translations",
                    http_status=409,
                )
            for ex_id, utt in translations.items():
                if ex_id not in self.pending:
                    raise ServiceError("unknown_id", f"example {ex_id!r} is not in the current batch")
                if ex_id in self.submitted:
                    raise ServiceError(
                        "duplicate_submission",
                        f"example {ex_id!r} already has a translation this round",
                        http_status=409,
                    )
                if not isinstance(utt, str) or not utt.strip():
                    raise ServiceError("empty_utterance", f"example {ex_id!r}: utterance is empty")
            for ex_id, utt in translations.items():
                self.submitted[ex_id] = utt
                if not from_journal:
                    self.journal({"event": "translation", "example_id": ex_id, "utterance": utt})
            remaining = len(self.pending) - len(self.submitted)
            if remaining == 0:
                self.cond.notify_all()
            return {
                "session_id": self.id,
                "round": self.round,
                "accepted": len(translations),
                "remaining": remaining,
                "status": self.status,
            }

    def status_view(self) -> dict:
        with self.cond:
            view = {
                "session_id": self.id,
                "status": self.status,
                "round": self.round,
                "translated_total": self.translated_total,
                "pool_size": len(self.corpus),
                "pending": len(self.pending) - len(self.submitted),
            }
            if self.error:
                view["error"] = self.error
            return view

    def metrics_view(self) -> dict:
        with self.cond:
            return {"session_id": self.id, "metrics": [dict(r) for r in self.metrics]}

    def wait_for(self, predicate, timeout: float):
        with self.cond:
            return self.cond.wait_for(predicate, timeout=timeout)


class AnnotationService:
    """Session registry plus journal replay.  Usable directly from
    Python or through the HTTP front end below."""

    def __init__(self, journal_dir: str | None = None):
        self.journal_dir = journal_dir
        self.sessions: dict[str, AnnotationSession] = {}
        self.lock = threading.Lock()
        if journal_dir:
            os.makedirs(journal_dir, exist_ok=True)
            self._replay_all()

    def create_session(self, raw_config: dict, session_id: str | None = None, replay: bool = False) -> AnnotationSession:
        try:
            config = config_from_mapping(raw_config)
        except (ValueError, TypeError) as exc:
            raise ServiceError("invalid_config", str(exc)) from exc
        if not config.corpus_path:
            raise ServiceError("invalid_config", "config must name a corpus")
        if config.oracle_spec not in ("human", "gold"):
            raise ServiceError("invalid_config", f"unknown oracle {config.oracle_spec!r}")
        try:
            corpus = load_corpus(config.corpus_path, config.source_lang, config.target_lang)
        except Exception as exc:
            raise ServiceError("invalid_corpus", str(exc)) from exc
        eval_corpus = None
        if config.eval_corpus_path:
            try:
                eval_corpus = load_corpus(
                    config.eval_corpus_path, config.source_lang, config.target_lang
                )
            except Exception as exc:
                raise ServiceError("invalid_corpus", str(exc)) from exc

        session_id = session_id or uuid.uuid4().hex
        journal_path = None
        if self.journal_dir:
            journal_path = os.path.join(self.journal_dir, f"session-{session_id}.jsonl")
        session = AnnotationSession(session_id, raw_config, config, corpus, journal_path)
        # must be in place before the worker thread starts, or an early
        # round record could slip into the journal during a replay
        session.suppress_round_journal = replay
        with self.lock:
            if session_id in self.sessions:
                raise ServiceError("duplicate_session", f"session {session_id!r} exists", 409)
            self.sessions[session_id] = session
        if not replay:
            session.journal({"event": "created", "session_id": session_id, "config": raw_config})

        if config.oracle_spec == "human":
            oracle = CallbackOracle(session.oracle_translate)
        else:
            oracle = GoldRevealOracle(corpus)

        def runner():
            try:
                session.final_state = run_campaign(
                    corpus,
                    config,
                    oracle=oracle,
                    eval_corpus=eval_corpus,
                    on_round=session.on_round,
                )
                session.mark_finished()
            except Exception as exc:  # surfaced via /status
                session.mark_failed(f"{type(exc).__name__}: {exc}")

        session.thread = threading.Thread(target=runner, name=f"campaign-{session_id}", daemon=True)
        session.thread.start()
        return session

    def _replay_all(self):
        for name in sorted(os.listdir(self.journal_dir)):
            match = re.fullmatch(r"session-(.+)\.jsonl", name)
            if not match:
                continue
            path = os.path.join(self.journal_dir, name)
            with open(path, encoding="utf-8") as fh:
                events = [json.loads(line) for line in fh if line.strip()]
            if not events or events[0].get("event") != "created":
                continue
            created = events[0]
            session = self.create_session(
                created["config"], session_id=created["session_id"], replay=True
            )
            for event in events[1:]:
                if event.get("event") != "translation":
                    continue
                ex_id = event["example_id"]
                utt = event["utterance"]
                ok = session.wait_for(
                    lambda: session.status in (STATUS_FINISHED, STATUS_FAILED)
                    or (ex_id in session.pending and ex_id not in session.submitted),
                    REPLAY_TIMEOUT,
                )
                if not ok or session.status in (STATUS_FINISHED, STATUS_FAILED):
                    break
                session.submit({ex_id: utt}, from_journal=True)
            # keep suppressing round records until the campaign has
            # digested the replayed submissions: everything up to that
            # point is already in the journal.  Resume journaling only
            # once the session finishes or parks on a batch the journal
            # did not cover.
            session.wait_for(
                lambda: session.status in (STATUS_FINISHED, STATUS_FAILED)
                or (
                    session.status == STATUS_AWAITING
                    and len(session.submitted) < len(session.pending)
                ),
                REPLAY_TIMEOUT,
            )
            session.suppress_round_journal = False

    def get_session(self, session_id: str) -> AnnotationSession:
        with self.lock:
            session = self.sessions.get(session_id)
        if session is None:
            raise ServiceError("session_not_found", f"no session {session_id!r}", 404)
        return session

    def close(self):
        with self.lock:
            sessions = list(self.sessions.values())
        for session in sessions:
            with session.cond:
                session.closed = True
                session.cond.notify_all()


# -- HTTP front end --------------------------------------------------

_SESSION_ROUTE = re.compile(r"^/sessions/([^/]+)/(batch|translations|status|metrics)$")


class _Handler(BaseHTTPRequestHandler):
    service: AnnotationService  # set by make_server

    def log_message(self, fmt, *args):  # keep test output quiet
        pass

    def _send(self, status: int, payload: dict):
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_error(self, exc: ServiceError):
        self._send(exc.http_status, {"error": {"code": exc.code, "message": exc.message}})

    def _read_json(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            raise ServiceError("invalid_body", "request body must be a JSON object")
        try:
            payload = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ServiceError("invalid_body", f"unparseable JSON body: {exc}") from exc
        if not isinstance(payload, dict):
            raise ServiceError("invalid_body", "request body must be a JSON object")
        return payload

    def do_POST(self):
        try:
            if self.path == "/sessions":
                payload = self._read_json()
                session = self.service.create_session(payload)
                self._send(201, session.status_view())
                return
            match = _SESSION_ROUTE.match(self.path)
            if match and match.group(2) == "translations":
                session = self.service.get_session(match.group(1))
                payload = self._read_json()
                result = session.submit(payload.get("translations"))
                self._send(200, result)
                return
            raise ServiceError("not_found", f"no route for POST {self.path}", 404)
        except ServiceError as exc:
            self._send_error(exc)

    def do_GET(self):
        try:
            match = _SESSION_ROUTE.match(self.path)
            if not match:
                raise ServiceError("not_found", f"no route for GET {self.path}", 404)
            session = self.service.get_session(match.group(1))
            view = match.group(2)
            if view == "batch":
                self._send(200, session.batch())
            elif view == "status":
                self._send(200, session.status_view())
            elif view == "metrics":
                self._send(200, session.metrics_view())
            else:
                raise ServiceError("not_found", f"no route for GET {self.path}", 404)
        except ServiceError as exc:
            self._send_error(exc)


def make_server(host: str = "127.0.0.1", port: int = 8765, journal_dir: str | None = None) -> ThreadingHTTPServer:
    """Build (but do not start) the HTTP server; `.service` carries the
    session registry.  Port 0 picks a free port."""
    service = AnnotationService(journal_dir)
    handler = type("BoundHandler", (_Handler,), {"service": service})
    server = ThreadingHTTPServer((host, port), handler)
    server.service = service  # type: ignore[attr-defined]
    return server


def serve(host: str = "127.0.0.1", port: int = 8765, journal_dir: str | None = None):
    server = make_server(host, port, journal_dir)
    try:
        server.serve_forever()
    finally:
        server.service.close()  # type: ignore[attr-defined]
        server.server_close()
