"""HTTP client for a remote scoring judge.

Wire protocol: one POST per (generated, reference) pair with JSON body
``{"generated": str, "reference": str, "heuristic": str}``; the response body
is ``{"score": number}`` with the score in [0, 1]. Anything else — non-2xx
status, malformed body, non-numeric or out-of-range score — is a protocol
error. Each request honours the configured per-call timeout, and at most
``max_inflight`` requests are in flight at once.
"""

from __future__ import annotations

import math
import threading

import requests

from .errors import JudgeProtocolError, JudgeUnavailable


class JudgeClient:
    def __init__(
        self,
        endpoint: str,
        timeout_ms: float = 10_000.0,
        max_inflight: int = 8,
        session: requests.Session | None = None,
    ):
        if not endpoint:
            raise ValueError("judge endpoint is required")
        if timeout_ms <= 0:
            raise ValueError("timeout must be positive")
        if max_inflight < 1:
            raise ValueError("max_inflight must be >= 1")
        self.endpoint = endpoint
        self.timeout_s = timeout_ms / 1000.0
        self._inflight = threading.BoundedSemaphore(max_inflight)
        if session is None:
            session = requests.Session()
            adapter = requests.adapters.HTTPAdapter(
                pool_connections=max_inflight, pool_maxsize=max_inflight
            )
            session.mount("http://", adapter)
            session.mount("https://", adapter)
        self._session = session

    def score(self, generated: str, reference: str, heuristic: str) -> float:
        """Fetch one similarity score; raises JudgeUnavailable on any failure."""
        payload = {
            "generated": generated,
            "reference": reference,
            "heuristic": heuristic,
        }
        with self._inflight:
            try:
                response = self._session.post(
                    self.endpoint, json=payload, timeout=self.timeout_s
                )
            except requests.RequestException as exc:
                raise JudgeUnavailable(f"judge request failed: {exc}") from exc
        if not 200 <= response.status_code < 300:
            raise JudgeProtocolError(
                f"judge returned HTTP {response.status_code}"
            )
        try:
            body = response.json()
        except ValueError as exc:
            raise JudgeProtocolError("judge response is not valid JSON") from exc
        if not isinstance(body, dict) or "score" not in body:
            raise JudgeProtocolError("judge response missing 'score' field")
        score = body["score"]
        if isinstance(score, bool) or not isinstance(score, (int, float)):
            raise JudgeProtocolError(f"judge score is not a number: {score!r}")
        score = float(score)
        if not math.isfinite(score) or score < 0.0 or score > 1.0:
            raise JudgeProtocolError(f"judge score {score} outside [0, 1]")
        return score
