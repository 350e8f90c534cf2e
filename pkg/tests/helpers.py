"""Shared builders for tests and fixture generation."""

from __future__ import annotations

import base64
import hashlib
from pathlib import Path

from tweetback.transport import (
    FixtureMissingError,
    HttpResponse,
    HttpTransport,
)


class StubTransport(HttpTransport):
    """In-memory transport mapping URLs to canned responses or exceptions."""

    def __init__(self) -> None:
        self._get: dict[str, HttpResponse | Exception] = {}
        self._post: dict[str, HttpResponse | Exception] = {}
        self.get_log: list[str] = []
        self.post_log: list[tuple[str, bytes, dict]] = []

    def add(self, url: str, body: str = "", status: int = 200,
            headers: dict[str, str] | None = None) -> "StubTransport":
        self._get[url] = HttpResponse(status=status, body=body, headers=headers or {})
        return self

    def add_error(self, url: str, error: Exception) -> "StubTransport":
        self._get[url] = error
        return self

    def add_post(self, url: str, body: str = "", status: int = 200) -> "StubTransport":
        self._post[url] = HttpResponse(status=status, body=body, headers={})
        return self

    def add_post_error(self, url: str, error: Exception) -> "StubTransport":
        self._post[url] = error
        return self

    def get(self, url: str) -> HttpResponse:
        self.get_log.append(url)
        return self._lookup(self._get, url)

    def post(self, url: str, data: bytes, headers: dict[str, str]) -> HttpResponse:
        self.post_log.append((url, data, headers))
        return self._lookup(self._post, url)

    @staticmethod
    def _lookup(table: dict, url: str) -> HttpResponse:
        entry = table.get(url)
        if entry is None:
            raise FixtureMissingError(url, Path("<stub>"))
        if isinstance(entry, Exception):
            raise entry
        return entry


def fake_digest(seed: str) -> str:
    """Deterministic CDX-style base32 digest for fixture rows."""
    return base64.b32encode(hashlib.sha1(seed.encode()).digest()).decode()[:32]


def cdx_line(handle: str, tweet_id: int | str, capture_ts14: str) -> str:
    url = f"https://twitter.com/{handle}/status/{tweet_id}"
    urlkey = f"com,twitter)/{handle.lower()}/status/{tweet_id}"
    digest = fake_digest(f"{url}@{capture_ts14}")
    return f"{urlkey} {capture_ts14} {url} text/html 200 {digest} 8123"


def replay_url(handle: str, tweet_id: int | str, capture_ts14: str) -> str:
    return (
        f"https://web.archive.org/web/{capture_ts14}/"
        f"https://twitter.com/{handle}/status/{tweet_id}"
    )


def legacy_tweet_html(text: str) -> str:
    return (
        "<!DOCTYPE html><html><head><title>Tweet</title></head><body>"
        '<div id="wm-ipp-base">wayback toolbar</div>'
        '<div class="permalink-inner">'
        f'<p class="TweetTextSize js-tweet-text tweet-text" lang="en">{text}</p>'
        "</div></body></html>"
    )


def meta_tweet_html(text: str) -> str:
    return (
        "<!DOCTYPE html><html><head>"
        f'<meta property="og:description" content="“{text}”">'
        "<title>Tweet</title></head>"
        '<body><div id="react-root">requires javascript</div></body></html>'
    )


def jsonld_tweet_html(text: str) -> str:
    return (
        "<!DOCTYPE html><html><head><title>Tweet</title>"
        '<script type="application/ld+json">'
        f'{{"@type": "SocialMediaPosting", "articleBody": "{text}"}}'
        "</script></head><body></body></html>"
    )
