"""Sentence embedding port with an offline deterministic implementation.

Similarity scoring only needs "text -> unit vector". The offline embedder
hashes character trigrams into a fixed 256-dim count vector; it is not a
learned model, but identical text always maps to the identical vector, and
texts sharing no trigrams are exactly orthogonal, which is what the metric
tests need. Reports produced with it are labeled "offline-sim".
"""
from __future__ import annotations

import hashlib
import logging
from typing import Protocol

import numpy as np
import requests

from .core import ServiceError, ValidationError
from .endpoint import EndpointConfig

log = logging.getLogger(__name__)

TRIGRAM_DIM = 256


class EmbedderUnavailable(ServiceError):
    """Embedding backend failed after retries."""


class Embedder(Protocol):
    name: str

    def embed(self, text: str) -> np.ndarray:
        """Map text to a unit-norm vector; identical text, identical vector."""


def _bucket(token: str) -> int:
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big") % TRIGRAM_DIM


class TrigramEmbedder:
    """Hashed character-trigram counts, L2-normalized.

    blake2b bucketing, not Python's salted hash(), so vectors are stable
    across processes. Text shorter than 3 characters hashes whole.
    """

    name = "offline-sim"
    dim = TRIGRAM_DIM

    def embed(self, text: str) -> np.ndarray:
        lowered = text.lower()
        if len(lowered) < 3:
            grams = [lowered]
        else:
            grams = [lowered[i : i + 3] for i in range(len(lowered) - 2)]
        vec = np.zeros(TRIGRAM_DIM, dtype=np.float64)
        for gram in grams:
            vec[_bucket(gram)] += 1.0
        return vec / np.linalg.norm(vec)


class HttpEmbedder:
    """Client for a remote embedding endpoint at {base_url}/embeddings."""

    def __init__(self, config: EndpointConfig, api_key: str | None = None):
        if not config.base_url:
            raise ValidationError("HttpEmbedder requires a base_url")
        self.config = config
        self.name = config.model
        self._headers = {"Content-Type": "application/json"}
        if api_key:
            self._headers["Authorization"] = f"Bearer {api_key}"

    def embed(self, text: str) -> np.ndarray:
        url = self.config.base_url.rstrip("/") + "/embeddings"
        body = {"model": self.config.model, "input": text}
        last_error: Exception | None = None
        for attempt in range(self.config.max_retries + 1):
            try:
                response = requests.post(
                    url,
                    json=body,
                    headers=self._headers,
                    timeout=self.config.request_timeout_s,
                )
                response.raise_for_status()
                vec = np.asarray(
                    response.json()["data"][0]["embedding"], dtype=np.float64
                )
                norm = np.linalg.norm(vec)
                if vec.ndim != 1 or vec.size == 0 or norm == 0:
                    raise ValueError("embedding response is not a usable vector")
                return vec / norm
            except (requests.RequestException, KeyError, IndexError, ValueError) as exc:
                last_error = exc
                log.warning("embedding request failed (attempt %d): %s", attempt + 1, exc)
        raise EmbedderUnavailable(
            f"embedding endpoint failed after {self.config.max_retries + 1} attempts: "
            f"{last_error}"
        )
