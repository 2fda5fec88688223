"""A controllable in-process judge server for protocol tests."""

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


class StubJudge:
    """Serves the judge wire protocol with scripted behaviour.

    Attributes control the next responses:
      score        — value returned in the response body
      delay_s      — sleep before answering (to trigger client timeouts)
      status       — HTTP status code
      body_override— raw response body (bytes) replacing the JSON payload
    """

    def __init__(self):
        self.score = 0.5
        self.delay_s = 0.0
        self.status = 200
        self.body_override = None
        self.requests = []
        self._lock = threading.Lock()
        self._inflight = 0
        self.peak_inflight = 0

        stub = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                payload = json.loads(self.rfile.read(length) or b"{}")
                # Count inflight only until just before the response goes
                # out: a client cannot release its slot earlier than that,
                # so the peak is a sound lower bound on client concurrency.
                with stub._lock:
                    stub.requests.append(payload)
                    stub._inflight += 1
                    stub.peak_inflight = max(stub.peak_inflight, stub._inflight)
                if stub.delay_s:
                    time.sleep(stub.delay_s)
                with stub._lock:
                    stub._inflight -= 1
                try:
                    body = stub.body_override
                    if body is None:
                        body = json.dumps({"score": stub.score}).encode()
                    self.send_response(stub.status)
                    self.send_header("Content-Type", "application/json")
                    self.send_header("Content-Length", str(len(body)))
                    self.end_headers()
                    self.wfile.write(body)
                except (BrokenPipeError, ConnectionResetError):
                    pass  # client timed out and hung up

            def log_message(self, *args):
                pass

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(
            target=self._server.serve_forever, daemon=True
        )
        self._thread.start()
        self.endpoint = f"http://127.0.0.1:{self._server.server_port}/judge"

    def reset(self):
        # wait out handlers abandoned by timed-out clients
        deadline = time.monotonic() + 5.0
        while time.monotonic() < deadline:
            with self._lock:
                if self._inflight == 0:
                    break
            time.sleep(0.01)
        with self._lock:
            self.score = 0.5
            self.delay_s = 0.0
            self.status = 200
            self.body_override = None
            self.requests = []
            self.peak_inflight = 0

    def close(self):
        self._server.shutdown()
        self._server.server_close()
