"""Accuracy, vote-consistency confidence, calibration shift, and DKE flags.

Confidence is the inverse normalized entropy of the trial vote distribution:
C = 1 - H(p)/log K, so unanimous votes score 1 and uniform votes score 0.
Abstentions (no extractable label) are excluded from the entropy
distribution but count as incorrect for accuracy; an all-abstain vote set
has confidence 0. Calibration shift is mean confidence minus accuracy;
positive values mean overconfidence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .model import option_labels


@dataclass(frozen=True)
class VoteDistribution:
    """Trial votes over K options plus an abstention count."""

    counts: tuple[int, ...]
    abstain_count: int
    trials: int

    @property
    def k(self) -> int:
        return len(self.counts)

    @property
    def p(self) -> tuple[float, ...]:
        """Answered vote mass per option (sums to 1 - abstain_mass)."""
        return tuple(c / self.trials for c in self.counts)

    @property
    def abstain_mass(self) -> float:
        return self.abstain_count / self.trials

    @property
    def answered(self) -> int:
        return self.trials - self.abstain_count


def vote_distribution(labels: Sequence[str | None], k: int) -> VoteDistribution:
    """Tally trial labels into per-option counts; None votes are abstentions."""
    if len(labels) == 0:
        raise ValueError("need at least one trial")
    valid = option_labels(k)
    index = {label: i for i, label in enumerate(valid)}
    counts = [0] * k
    abstain = 0
    for label in labels:
        if label is None:
            abstain += 1
        elif label in index:
            counts[index[label]] += 1
        else:
            raise ValueError(f"label {label!r} not among {valid}")
    return VoteDistribution(counts=tuple(counts), abstain_count=abstain, trials=len(labels))


def entropy(votes: VoteDistribution) -> float:
    """Shannon entropy (nats) of the answered-vote distribution."""
    answered = votes.answered
    if answered == 0:
        return math.log(votes.k)
    # log A - (1/A) * sum c*log c  is exact for unanimous and per-count-uniform
    acc = 0.0
    for c in votes.counts:
        if c > 0:
            acc += c * math.log(c)
    return math.log(answered) - acc / answered


def confidence(votes: VoteDistribution) -> float:
    """Inverse normalized entropy C = 1 - H/log K in [0, 1].

    Exactly 1.0 for unanimous votes, exactly 0.0 for votes uniform over all
    K options or for an all-abstain vote set.
    """
    if votes.k < 2:
        raise ValueError("confidence needs at least 2 options")
    if votes.answered == 0:
        return 0.0
    nonzero = [c for c in votes.counts if c > 0]
    if len(nonzero) == 1:
        return 1.0
    if len(nonzero) == votes.k and len(set(nonzero)) == 1:
        return 0.0
    return 1.0 - entropy(votes) / math.log(votes.k)


def confidence_from_probs(p: Sequence[float], k: int) -> float:
    """Confidence from an explicit probability vector over K options."""
    if k < 2:
        raise ValueError("confidence needs at least 2 options")
    total = sum(p)
    if total <= 0:
        return 0.0
    h = -sum((q / total) * math.log(q / total) for q in p if q > 0)
    return 1.0 - h / math.log(k)


def accuracy(correct_trials: Iterable[Sequence[bool]]) -> float:
    """Mean over samples of (correct trials / T); abstentions are incorrect.

    Majority-vote scoring is available through ``run_metrics(mode="majority")``.
    """
    totals = []
    for bits in correct_trials:
        if len(bits) == 0:
            raise ValueError("sample with zero trials")
        totals.append(sum(bits) / len(bits))
    if not totals:
        raise ValueError("accuracy over an empty evaluation set")
    return sum(totals) / len(totals)


def majority_label(labels: Sequence[str | None]) -> str | None:
    """Most-voted answered label; ties break alphabetically; None if all abstain."""
    counts: dict[str, int] = {}
    for label in labels:
        if label is not None:
            counts[label] = counts.get(label, 0) + 1
    if not counts:
        return None
    best = max(counts.values())
    return sorted(label for label, c in counts.items() if c == best)[0]


@dataclass(frozen=True)
class SampleMetrics:
    """Per-sample vote statistics and correctness."""

    sample_id: str
    votes: VoteDistribution
    entropy: float
    confidence: float
    correct_bits: tuple[bool, ...]
    majority_correct: bool

    @property
    def trial_accuracy(self) -> float:
        return sum(self.correct_bits) / len(self.correct_bits)


def sample_metrics(sample_id: str, labels: Sequence[str | None], k: int, answer: str) -> SampleMetrics:
    votes = vote_distribution(labels, k)
    maj = majority_label(labels)
    return SampleMetrics(
        sample_id=sample_id,
        votes=votes,
        entropy=entropy(votes),
        confidence=confidence(votes),
        correct_bits=tuple(label == answer for label in labels),
        majority_correct=maj == answer,
    )


@dataclass(frozen=True)
class RunMetrics:
    """Aggregates over one evaluation set."""

    name: str
    acc: float
    mean_confidence: float
    delta_calib: float
    n: int


def run_metrics(samples: Sequence[SampleMetrics], name: str = "", mode: str = "per_trial") -> RunMetrics:
    if not samples:
        raise ValueError(f"metrics over empty evaluation set {name!r}")
    if mode == "per_trial":
        acc = accuracy([s.correct_bits for s in samples])
    elif mode == "majority":
        acc = sum(1.0 for s in samples if s.majority_correct) / len(samples)
    else:
        raise ValueError(f"unknown accuracy mode {mode!r}")
    mean_conf = sum(s.confidence for s in samples) / len(samples)
    return RunMetrics(
        name=name,
        acc=acc,
        mean_confidence=mean_conf,
        delta_calib=mean_conf - acc,
        n=len(samples),
    )


def calibration_shift(confidences: Sequence[float], acc: float) -> float:
    """Mean confidence minus accuracy; positive values flag overconfidence."""
    if not confidences:
        raise ValueError("calibration shift over an empty set")
    return sum(confidences) / len(confidences) - acc


def intra_model_dke(
    acc_l0: float, acc_l2: float, delta_l0: float, delta_l2: float
) -> bool:
    """Accuracy collapses from L0 to L2 while calibration shift holds or grows."""
    return acc_l0 > acc_l2 and delta_l0 <= delta_l2


def inter_model_dke(
    models: Sequence[tuple[float, float]],
) -> tuple[list[tuple[int, int]], float]:
    """Ordered model pairs where the weaker model shows the larger shift.

    Input is (accuracy, calibration shift) per model on one shared
    evaluation set. Returns the flagged ordered index pairs and the fraction
    of all ordered pairs flagged.
    """
    if len(models) < 2:
        raise ValueError("inter-model comparison needs at least 2 models")
    flagged = []
    for i, (acc_i, delta_i) in enumerate(models):
        for j, (acc_j, delta_j) in enumerate(models):
            if i != j and acc_i < acc_j and delta_i > delta_j:
                flagged.append((i, j))
    n_pairs = len(models) * (len(models) - 1)
    return flagged, len(flagged) / n_pairs
