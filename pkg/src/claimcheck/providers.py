"""Pluggable text providers and their mock implementations.

Provider roles and call shapes:

- translator(text, src, tgt) -> text
- filler(masked_text) -> text        (fills ``[MASK]`` slots)
- generator(prompt, params) -> text  (params is a GenerationParams-like object)
- embedder(text) -> list of floats
- encoder(payload dict) -> dict      (sequence-classification backend)

The encoder payload schema is fixed JSON:
request ``{"mode": "train", "texts": [...], "labels": ["CW"|"NCW", ...],
"hyperparams": {...}}`` returns ``{"handle": "..."}``; request
``{"mode": "score", "texts": [...], "handle": "...", "hyperparams": {...}}``
returns ``{"scores": [...]}`` with one probability in [0, 1] per text.

Mock providers are deterministic and ship with the package so experiment
suites and tests can run without any external service.
"""

from __future__ import annotations

import hashlib
import math
import time
from dataclasses import dataclass

import requests

from .errors import ProviderError

MASK_TOKEN = "[MASK]"

__all__ = [
    "MASK_TOKEN",
    "ProviderBundle",
    "identity_translator",
    "ReversingTranslator",
    "MarkerFiller",
    "HashFiller",
    "EchoGenerator",
    "RecordingGenerator",
    "DistinctTokenGenerator",
    "ConstantEmbedder",
    "KeywordAxisEmbedder",
    "HashEmbedder",
    "MockEncoderProvider",
    "HttpTranslator",
    "HttpFiller",
    "HttpGenerator",
    "HttpEmbedder",
    "HttpEncoderProvider",
    "make_providers",
]


@dataclass
class ProviderBundle:
    """The providers one experiment run may need; unused roles stay None."""

    translator: object = None
    filler: object = None
    generator: object = None
    embedder: object = None
    encoder: object = None
    kind: str = "none"


# ---------------------------------------------------------------------------
# mocks

def identity_translator(text: str, src: str, tgt: str) -> str:
    return text


class ReversingTranslator:
    """Reverses token order on every call; composing twice restores input."""

    def __call__(self, text: str, src: str, tgt: str) -> str:
        return " ".join(reversed(text.split()))


class MarkerFiller:
    """Fills every mask slot with a fixed marker token."""

    def __init__(self, marker: str = "XSUB"):
        self.marker = marker
        self.calls = 0

    def __call__(self, masked_text: str) -> str:
        self.calls += 1
        return masked_text.replace(MASK_TOKEN, self.marker)


class HashFiller:
    """Fills each mask slot with a token derived from its context hash."""

    def __call__(self, masked_text: str) -> str:
        tokens = masked_text.split()
        out = []
        for i, tok in enumerate(tokens):
            if tok == MASK_TOKEN:
                digest = hashlib.sha256(f"{i}|{masked_text}".encode("utf-8")).hexdigest()
                out.append("w" + digest[:6])
            else:
                out.append(tok)
        return " ".join(out)


class EchoGenerator:
    """Returns its prompt unchanged."""

    def __call__(self, prompt: str, params) -> str:
        return prompt


class RecordingGenerator:
    """Returns canned text and records every (prompt, params) it receives."""

    def __init__(self, canned: str = "generated text"):
        self.canned = canned
        self.calls = []

    def __call__(self, prompt: str, params) -> str:
        self.calls.append((prompt, params))
        return self.canned


class DistinctTokenGenerator:
    """Emits a run of distinct tokens, so no n-gram ever repeats.

    Token count tracks the prompt length without exceeding max_length, the
    way a compliant no-repeat generator would behave.
    """

    def __call__(self, prompt: str, params) -> str:
        n = min(max(len(prompt.split()), 1), params.max_length)
        seed = hashlib.sha256(prompt.encode("utf-8")).hexdigest()[:8]
        return " ".join(f"g{seed}n{i}" for i in range(n))


class ConstantEmbedder:
    def __init__(self, vector):
        self.vector = list(vector)

    def __call__(self, text: str) -> list:
        return list(self.vector)


class KeywordAxisEmbedder:
    """Maps texts onto axes by keyword; texts with disjoint keywords embed
    orthogonally."""

    def __init__(self, keyword_axes: dict, dim: int):
        self.keyword_axes = dict(keyword_axes)
        self.dim = dim

    def __call__(self, text: str) -> list:
        vec = [0.0] * self.dim
        for tok in text.split():
            if tok in self.keyword_axes:
                vec[self.keyword_axes[tok]] += 1.0
        return vec


class HashEmbedder:
    """Deterministic pseudo-embedding: shared tokens pull texts together."""

    def __init__(self, dim: int = 64):
        self.dim = dim

    def __call__(self, text: str) -> list:
        vec = [0.0] * self.dim
        for tok in text.split():
            digest = hashlib.sha256(tok.encode("utf-8")).digest()
            idx = int.from_bytes(digest[:4], "big") % self.dim
            sign = 1.0 if digest[4] % 2 == 0 else -1.0
            vec[idx] += sign
        norm = math.sqrt(sum(v * v for v in vec))
        if norm > 0:
            vec = [v / norm for v in vec]
        return vec


class MockEncoderProvider:
    """In-memory stand-in for a sequence-classification service.

    Training just records which tokens lean CW; scoring returns the
    sigmoid-squashed lean of a text's tokens. Deterministic, stateless
    between handles.
    """

    def __init__(self):
        self._models = {}
        self.requests = []

    def __call__(self, payload: dict) -> dict:
        self.requests.append(payload)
        mode = payload.get("mode")
        if mode == "train":
            texts, labels = payload["texts"], payload["labels"]
            if len(texts) != len(labels):
                raise ProviderError("texts and labels length mismatch")
            lean = {}
            for text, label in zip(texts, labels):
                delta = 1.0 if label == "CW" else -1.0
                for tok in text.split():
                    lean[tok] = lean.get(tok, 0.0) + delta
            handle = hashlib.sha256(
                repr(sorted(lean.items())).encode("utf-8")
            ).hexdigest()[:16]
            self._models[handle] = lean
            return {"handle": handle}
        if mode == "score":
            handle = payload.get("handle")
            if handle not in self._models:
                raise ProviderError(f"unknown training handle: {handle!r}")
            lean = self._models[handle]
            scores = []
            for text in payload["texts"]:
                tokens = text.split()
                total = sum(lean.get(t, 0.0) for t in tokens)
                scores.append(1.0 / (1.0 + math.exp(-total / max(len(tokens), 1))))
            return {"scores": scores}
        raise ProviderError(f"unknown encoder mode: {mode!r}")


# ---------------------------------------------------------------------------
# HTTP transports

def _post_json(url: str, payload: dict, retries: int = 3, timeout: float = 30.0) -> dict:
    last = None
    for attempt in range(1, retries + 1):
        try:
            resp = requests.post(url, json=payload, timeout=timeout)
            resp.raise_for_status()
            return resp.json()
        except (requests.RequestException, ValueError) as exc:
            last = exc
            if attempt < retries:
                time.sleep(min(2.0 ** attempt, 10.0))
    raise ProviderError(
        f"provider at {url} unreachable after {retries} attempts: {last}"
    )


class HttpTranslator:
    def __init__(self, base_url: str, retries: int = 3):
        self.base_url = base_url.rstrip("/")
        self.retries = retries

    def __call__(self, text: str, src: str, tgt: str) -> str:
        out = _post_json(f"{self.base_url}/translate",
                         {"text": text, "src": src, "tgt": tgt}, self.retries)
        return out["text"]


class HttpFiller:
    def __init__(self, base_url: str, retries: int = 3):
        self.base_url = base_url.rstrip("/")
        self.retries = retries

    def __call__(self, masked_text: str) -> str:
        out = _post_json(f"{self.base_url}/fill",
                         {"text": masked_text, "mask_token": MASK_TOKEN}, self.retries)
        return out["text"]


class HttpGenerator:
    def __init__(self, base_url: str, retries: int = 3):
        self.base_url = base_url.rstrip("/")
        self.retries = retries

    def __call__(self, prompt: str, params) -> str:
        payload = {
            "prompt": prompt,
            "num_beams": params.num_beams,
            "max_length": params.max_length,
            "top_p": params.top_p,
            "repetition_penalty": params.repetition_penalty,
            "no_repeat_ngram_size": params.no_repeat_ngram_size,
        }
        return _post_json(f"{self.base_url}/generate", payload, self.retries)["text"]


class HttpEmbedder:
    def __init__(self, base_url: str, retries: int = 3):
        self.base_url = base_url.rstrip("/")
        self.retries = retries

    def __call__(self, text: str) -> list:
        return _post_json(f"{self.base_url}/embed", {"text": text}, self.retries)["vector"]


class HttpEncoderProvider:
    def __init__(self, base_url: str, retries: int = 3):
        self.base_url = base_url.rstrip("/")
        self.retries = retries

    def __call__(self, payload: dict) -> dict:
        return _post_json(f"{self.base_url}/encode", payload, self.retries)


def make_providers(spec) -> ProviderBundle:
    """Build a ProviderBundle from a spec string or config mapping.

    ``"mock"`` yields the deterministic in-package mocks; ``"http:<base>"``
    points every role at one service; ``"none"`` yields an empty bundle. A
    mapping may configure roles individually with ``{"kind": "mock"|"http",
    "url": ...}`` entries under the role names.
    """
    if spec is None or spec == "none":
        return ProviderBundle(kind="none")
    if spec == "mock":
        return ProviderBundle(
            translator=identity_translator,
            filler=HashFiller(),
            generator=DistinctTokenGenerator(),
            embedder=HashEmbedder(),
            encoder=MockEncoderProvider(),
            kind="mock",
        )
    if isinstance(spec, str) and spec.startswith("http:"):
        base = spec.split(":", 1)[1] or spec  # allow http:http://host form
        if base.startswith("//"):
            base = "http:" + base
        return ProviderBundle(
            translator=HttpTranslator(base),
            filler=HttpFiller(base),
            generator=HttpGenerator(base),
            embedder=HttpEmbedder(base),
            encoder=HttpEncoderProvider(base),
            kind=spec,
        )
    if isinstance(spec, dict):
        mock = make_providers("mock")
        bundle = ProviderBundle(kind="custom")
        for role in ("translator", "filler", "generator", "embedder", "encoder"):
            conf = spec.get(role)
            if conf is None:
                continue
            if conf.get("kind") == "mock":
                setattr(bundle, role, getattr(mock, role))
            elif conf.get("kind") == "http":
                cls = {
                    "translator": HttpTranslator,
                    "filler": HttpFiller,
                    "generator": HttpGenerator,
                    "embedder": HttpEmbedder,
                    "encoder": HttpEncoderProvider,
                }[role]
                setattr(bundle, role, cls(conf["url"]))
            else:
                raise ProviderError(f"unknown provider kind for {role}: {conf!r}")
        return bundle
    raise ProviderError(f"cannot build providers from {spec!r}")
