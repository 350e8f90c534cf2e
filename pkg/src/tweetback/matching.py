"""Text-overlap scoring between screenshot text and archived candidates.

The score is 2*LCS(a, b) / (|a| + |b|) over normalized characters, where
LCS is the true character-level longest common subsequence. OCR output
often trails off into noise (captions of attached images, UI chrome), so
the screenshot text is also scored chunk by chunk: cumulative prefixes
of its lines, growing from the top. The best chunk score is the one that
counts, and a candidate clearing the threshold becomes evidence that the
tweet really was posted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .replay import CandidateTweet, ReplayFailure

DEFAULT_THRESHOLD = 0.80

_QUOTE_MAP = str.maketrans({
    "‘": "'", "’": "'", "‚": "'", "‛": "'",
    "“": '"', "”": '"', "„": '"', "‟": '"',
})

_WHITESPACE_RE = re.compile(r"\s+")


class InvalidThresholdError(ValueError):
    """Threshold must lie in (0, 1]."""


def normalize(text: str) -> str:
    """Lowercase, fold typographic quotes to ASCII, collapse whitespace runs."""
    return _WHITESPACE_RE.sub(" ", text.lower().translate(_QUOTE_MAP)).strip()


def lcs_length(a: str, b: str) -> int:
    """Character-level longest-common-subsequence length, O(len(a)*len(b))."""
    if not a or not b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    previous = [0] * (len(b) + 1)
    current = [0] * (len(b) + 1)
    for ch_a in a:
        for j, ch_b in enumerate(b):
            if ch_a == ch_b:
                current[j + 1] = previous[j] + 1
            else:
                current[j + 1] = max(previous[j + 1], current[j])
        previous, current = current, previous
    return previous[len(b)]


def overlap_score(a: str, b: str) -> float:
    """Normalized LCS overlap in [0, 1]; 1 for two empty strings."""
    na, nb = normalize(a), normalize(b)
    if not na and not nb:
        return 1.0
    if not na or not nb:
        return 0.0
    return 2 * lcs_length(na, nb) / (len(na) + len(nb))


def chunk_scores(screenshot_text: str, candidate_text: str) -> tuple[float, int]:
    """Score cumulative line-prefix chunks of the screenshot text.

    Chunk k is the first k+1 lines joined by spaces; the last chunk is the
    whole text, so the result never undercuts the full-text score. Returns
    the best score with the smallest chunk index achieving it.
    """
    lines = screenshot_text.split("\n")
    best_score, best_chunk = -1.0, 0
    for k in range(len(lines)):
        score = overlap_score(" ".join(lines[: k + 1]), candidate_text)
        if score > best_score:
            best_score, best_chunk = score, k
    return best_score, best_chunk


class VerdictKind(Enum):
    ARCHIVED = "archived"
    NOT_FOUND = "not_found"
    NON_REPLAYABLE = "non_replayable"


@dataclass(frozen=True)
class MatchResult:
    candidate: CandidateTweet
    score: float
    best_chunk: int


@dataclass(frozen=True)
class Verdict:
    """Outcome of matching the screenshot against all archived candidates."""

    kind: VerdictKind
    evidence: MatchResult | None
    threshold_used: float
    failures: tuple[ReplayFailure, ...] = ()

    def __post_init__(self) -> None:
        if (self.kind is VerdictKind.ARCHIVED) != (self.evidence is not None):
            raise ValueError("evidence must be present exactly when archived")
        if self.evidence is not None and self.evidence.score < self.threshold_used:
            raise ValueError("archived evidence must clear the threshold")


def score_candidates(
    screenshot_text: str, candidates: list[CandidateTweet]
) -> list[MatchResult]:
    """Chunked overlap score for every candidate, in input order."""
    results = []
    for candidate in candidates:
        score, best_chunk = chunk_scores(screenshot_text, candidate.extracted_text)
        results.append(MatchResult(candidate=candidate, score=score, best_chunk=best_chunk))
    return results


def decide(
    screenshot_text: str,
    candidates: list[CandidateTweet],
    failures: list[ReplayFailure],
    threshold: float = DEFAULT_THRESHOLD,
) -> Verdict:
    """Pick the best-matching candidate and turn it into a verdict.

    Archived when the best score clears the threshold (ties broken by
    earliest capture, then replay URL); NonReplayable when every in-window
    candidate failed to replay; NotFound otherwise.
    """
    return decide_scored(
        score_candidates(screenshot_text, candidates), failures, threshold
    )


def decide_scored(
    results: list[MatchResult],
    failures: list[ReplayFailure],
    threshold: float = DEFAULT_THRESHOLD,
) -> Verdict:
    """decide() over candidates that are already scored."""
    if not 0 < threshold <= 1:
        raise InvalidThresholdError(f"threshold {threshold} outside (0, 1]")
    best = min(
        results,
        key=lambda r: (-r.score, r.candidate.ref.archived_at, r.candidate.ref.replay_url),
        default=None,
    )
    if best is not None and best.score >= threshold:
        return Verdict(
            kind=VerdictKind.ARCHIVED,
            evidence=best,
            threshold_used=threshold,
            failures=tuple(failures),
        )
    if not results and failures:
        return Verdict(
            kind=VerdictKind.NON_REPLAYABLE,
            evidence=None,
            threshold_used=threshold,
            failures=tuple(failures),
        )
    return Verdict(
        kind=VerdictKind.NOT_FOUND,
        evidence=None,
        threshold_used=threshold,
        failures=tuple(failures),
    )
