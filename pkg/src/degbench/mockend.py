"""Bundled mock chat-completions endpoint for tests and offline demos.

Serves POST /v1/chat/completions on an ephemeral local port. Behaviors are
callables (question, call_index) -> response text; canned factories cover
always-correct, uniform-random, fixed scripts, and per-question scripts.
"""

from __future__ import annotations

import json
import random
import re
import threading
import time
from collections import defaultdict
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable, Mapping, Sequence

from .model import option_labels

_QUESTION_RE = re.compile(r"provided medical image\. (.*?)\n\n", re.DOTALL)
_OPTION_LINE_RE = re.compile(r"^[A-Z]\. ", re.MULTILINE)

Behavior = Callable[[str, str, int], str]  # (question, prompt, call_index) -> text


def parse_question(prompt: str) -> str:
    match = _QUESTION_RE.search(prompt)
    return match.group(1) if match else prompt


def count_options(prompt: str) -> int:
    return max(2, len(_OPTION_LINE_RE.findall(prompt)))


def always(label: str) -> Behavior:
    return lambda question, prompt, i: label


def correct_from_key(answer_key: Mapping[str, str]) -> Behavior:
    """Answers correctly by looking the question up in {question: label}."""

    def behavior(question: str, prompt: str, i: int) -> str:
        return answer_key[question]

    return behavior


def uniform_random(seed: int = 0) -> Behavior:
    rng = random.Random(seed)
    lock = threading.Lock()

    def behavior(question: str, prompt: str, i: int) -> str:
        with lock:
            return rng.choice(option_labels(count_options(prompt)))

    return behavior


def scripted(script: Sequence[str]) -> Behavior:
    """Per-question script: the n-th call for a question gets script[n]."""
    counters: dict[str, int] = defaultdict(int)
    lock = threading.Lock()

    def behavior(question: str, prompt: str, i: int) -> str:
        with lock:
            n = counters[question]
            counters[question] += 1
        return script[n % len(script)]

    return behavior


class MockChatEndpoint:
    """Threaded local HTTP server mimicking a chat-completions API.

    Records every served question in ``question_log`` (thread-safe). With a
    ``required_token`` set, requests lacking the matching bearer token get
    HTTP 401. ``delay_s`` sleeps before responding, for timeout tests.
    """

    def __init__(
        self,
        behavior: Behavior,
        required_token: str | None = None,
        delay_s: float = 0.0,
        port: int = 0,
        malform_first_n: int = 0,
    ) -> None:
        self.behavior = behavior
        self.required_token = required_token
        self.delay_s = delay_s
        self.port = port
        self.malform_first_n = malform_first_n
        self.question_log: list[str] = []
        self._log_lock = threading.Lock()
        self._calls = 0
        self._server: ThreadingHTTPServer | None = None
        self._thread: threading.Thread | None = None

    @property
    def url(self) -> str:
        assert self._server is not None, "endpoint not started"
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> "MockChatEndpoint":
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, fmt, *args):  # silence request logging
                pass

            def do_POST(self) -> None:  # noqa: N802 - http.server API
                if self.path != "/v1/chat/completions":
                    self.send_error(404)
                    return
                if outer.required_token is not None:
                    auth = self.headers.get("Authorization", "")
                    if auth != f"Bearer {outer.required_token}":
                        self._reply(401, {"error": "unauthorized"})
                        return
                length = int(self.headers.get("Content-Length", "0"))
                body = json.loads(self.rfile.read(length).decode("utf-8"))
                text_parts = [
                    part["text"]
                    for msg in body.get("messages", [])
                    for part in (
                        msg["content"] if isinstance(msg["content"], list) else []
                    )
                    if part.get("type") == "text"
                ]
                prompt = "\n".join(text_parts)
                question = parse_question(prompt)
                with outer._log_lock:
                    index = outer._calls
                    outer._calls += 1
                    outer.question_log.append(question)
                if outer.delay_s > 0:
                    time.sleep(outer.delay_s)
                if index < outer.malform_first_n:
                    self._reply(200, {"oops": "no choices here"})
                    return
                answer = outer.behavior(question, prompt, index)
                self._reply(
                    200,
                    {
                        "id": f"mock-{index}",
                        "object": "chat.completion",
                        "model": body.get("model", "mock"),
                        "choices": [
                            {
                                "index": 0,
                                "message": {"role": "assistant", "content": answer},
                                "finish_reason": "stop",
                            }
                        ],
                    },
                )

            def _reply(self, status: int, payload: dict) -> None:
                data = json.dumps(payload).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

        self._server = ThreadingHTTPServer(("127.0.0.1", self.port), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        if self._server is not None:
            self._server.shutdown()
            self._server.server_close()
            self._server = None

    def __enter__(self) -> "MockChatEndpoint":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()
