"""Source models, priority schemes, and the line-oriented model file format.

A source has ``alphabet_size`` symbols and ``state_count`` states.  In state
``k`` symbol ``i`` is emitted with probability ``emissions[k][i].prob`` and
moves the source to ``emissions[k][i].next_state``.  An i.i.d. source is the
one-state case.

Priorities follow ``f[j][k](p) = offsets[j][k] - ln p``; since ``-ln p`` is
accumulated additively along tree paths, a node's priority is its offset plus
its accumulated negative log probability.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Iterable, Mapping, NamedTuple, Sequence

from .errors import (
    AlphabetTooSmall,
    BadStateIndex,
    ModelError,
    ModelFormatError,
    NonPositiveProbability,
    ProbabilitySumError,
    SchemeError,
)

SUM_TOLERANCE = 1e-9
MAGIC_LINE = "vfmodel 1"


class Emission(NamedTuple):
    prob: float
    next_state: int


class QueueClass(NamedTuple):
    """Key of one FIFO node queue in the generalized builder.

    Symbols leaving ``parent_state`` that share the same conditional
    probability and child state fall in the same class.
    """

    tree: int
    parent_state: int
    prob: float
    child_state: int


@dataclass(frozen=True)
class SourceModel:
    alphabet_size: int
    state_count: int
    emissions: tuple[tuple[Emission, ...], ...]

    def __post_init__(self) -> None:
        D, s = self.alphabet_size, self.state_count
        if not isinstance(D, int) or D < 2:
            raise AlphabetTooSmall(f"alphabet size must be >= 2, got {D!r}")
        if not isinstance(s, int) or s < 1:
            raise BadStateIndex(f"state count must be >= 1, got {s!r}")
        if len(self.emissions) != s:
            raise ModelError(f"expected emissions for {s} states, got {len(self.emissions)}")
        rows = []
        for k, row in enumerate(self.emissions):
            if len(row) != D:
                raise ModelError(f"state {k}: expected {D} emissions, got {len(row)}")
            cleaned = []
            for i, em in enumerate(row):
                prob, nxt = float(em[0]), em[1]
                if not prob > 0.0:
                    raise NonPositiveProbability(f"state {k} symbol {i}: probability {prob!r}")
                if prob > 1.0:
                    raise ProbabilitySumError(f"state {k} symbol {i}: probability {prob!r} > 1")
                if isinstance(nxt, bool) or not isinstance(nxt, int) or not 0 <= nxt < s:
                    raise BadStateIndex(f"state {k} symbol {i}: next state {nxt!r}")
                cleaned.append(Emission(prob, nxt))
            total = math.fsum(e.prob for e in cleaned)
            if abs(total - 1.0) > SUM_TOLERANCE:
                raise ProbabilitySumError(f"state {k}: probabilities sum to {total!r}")
            rows.append(tuple(cleaned))
        object.__setattr__(self, "emissions", tuple(rows))

    @property
    def is_iid(self) -> bool:
        return self.state_count == 1

    @cached_property
    def neg_log(self) -> tuple[tuple[float, ...], ...]:
        """``-ln p`` for every (state, symbol) edge; shared by every builder."""
        return tuple(tuple(-math.log(e.prob) for e in row) for row in self.emissions)

    @cached_property
    def next_states(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(e.next_state for e in row) for row in self.emissions)

    @cached_property
    def queue_classes(self) -> tuple[QueueClass, ...]:
        classes = []
        for j in range(self.state_count):
            for k, row in enumerate(self.emissions):
                seen = set()
                for em in row:
                    if em not in seen:
                        seen.add(em)
                        classes.append(QueueClass(j, k, em.prob, em.next_state))
        return tuple(classes)

    @cached_property
    def class_index(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        """``class_index[j][k][i]``: queue class of symbol ``i`` from state ``k`` in tree ``j``."""
        lookup = {c: n for n, c in enumerate(self.queue_classes)}
        return tuple(
            tuple(tuple(lookup[QueueClass(j, k, *em)] for em in row) for k, row in enumerate(self.emissions))
            for j in range(self.state_count)
        )

    @property
    def g(self) -> int:
        return len(self.queue_classes)


def validate_model(raw: SourceModel | Mapping[str, Any]) -> SourceModel:
    """Return a validated :class:`SourceModel` built from ``raw``.

    ``raw`` may be a model (returned as an equal copy) or a mapping with keys
    ``alphabet_size``, ``state_count`` and ``emissions``, where each emission
    is a ``(prob, next_state)`` pair.
    """
    if isinstance(raw, SourceModel):
        fields = (raw.alphabet_size, raw.state_count, raw.emissions)
    else:
        try:
            fields = (raw["alphabet_size"], raw["state_count"], raw["emissions"])
        except KeyError as exc:
            raise ModelError(f"missing model field {exc}") from None
    D, s, emissions = fields
    try:
        rows = tuple(tuple(tuple(em) for em in row) for row in emissions)
    except TypeError:
        raise ModelError("emissions must be nested sequences of (prob, next_state)") from None
    if any(len(em) != 2 for row in rows for em in row):
        raise ModelError("each emission must be a (prob, next_state) pair")
    model = SourceModel(D, s, rows)
    model.queue_classes  # noqa: B018  (populate the cache)
    return model


def iid(probs: Sequence[float]) -> SourceModel:
    return validate_model(
        {"alphabet_size": len(probs), "state_count": 1, "emissions": [[(p, 0) for p in probs]]}
    )


def bernoulli(p0: float) -> SourceModel:
    """Binary i.i.d. source emitting 0 with probability ``p0``."""
    return iid((p0, 1.0 - p0))


@dataclass(frozen=True)
class PriorityScheme:
    offsets: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(float(c) for c in row) for row in self.offsets)
        s = len(rows)
        if s == 0 or any(len(row) != s for row in rows):
            raise SchemeError("offset matrix must be square and nonempty")
        if not all(math.isfinite(c) for row in rows for c in row):
            raise SchemeError("offsets must be finite")
        object.__setattr__(self, "offsets", rows)

    @classmethod
    def zeros(cls, state_count: int) -> PriorityScheme:
        return cls(tuple((0.0,) * state_count for _ in range(state_count)))

    @property
    def state_count(self) -> int:
        return len(self.offsets)

    def check_model(self, model: SourceModel) -> None:
        if self.state_count != model.state_count:
            raise SchemeError(
                f"scheme covers {self.state_count} states, model has {model.state_count}"
            )


def priority_of(scheme: PriorityScheme, tree: int, state: int, neg_log_prob: float) -> float:
    return scheme.offsets[tree][state] + neg_log_prob


def is_admissible(model: SourceModel, scheme: PriorityScheme) -> bool:
    """True when no child can outrank its parent.

    Under this condition nodes are split in nondecreasing priority order and
    every class queue receives its nodes already sorted, so plain FIFO queues
    suffice.  The zero scheme is always admissible.
    """
    scheme.check_model(model)
    c = scheme.offsets
    for j in range(model.state_count):
        for k, row in enumerate(model.emissions):
            for em, nl in zip(row, model.neg_log[k]):
                if c[j][em.next_state] + nl < c[j][k]:
                    return False
    return True


# -- model file format -------------------------------------------------------


def _tokens(text: str) -> Iterable[tuple[int, list[str]]]:
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ModelFormatError(f"line {lineno}: expected integer, got {tok!r}") from None


def _float(tok: str, lineno: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ModelFormatError(f"line {lineno}: expected number, got {tok!r}") from None


def parse_model(text: str) -> tuple[SourceModel, PriorityScheme]:
    lines = list(_tokens(text))
    header = [" ".join(toks) for _, toks in lines[:3]]
    if len(lines) < 3 or header[0] != MAGIC_LINE:
        raise ModelFormatError(f"model text must start with {MAGIC_LINE!r}")
    heads = [toks for _, toks in lines[1:3]]
    if heads[0][0] != "alphabet" or len(heads[0]) != 2:
        raise ModelFormatError(f"line {lines[1][0]}: expected 'alphabet D'")
    if heads[1][0] != "states" or len(heads[1]) != 2:
        raise ModelFormatError(f"line {lines[2][0]}: expected 'states s'")
    D = _int(heads[0][1], lines[1][0])
    s = _int(heads[1][1], lines[2][0])
    if D < 2:
        raise AlphabetTooSmall(f"alphabet size must be >= 2, got {D}")
    if s < 1:
        raise BadStateIndex(f"state count must be >= 1, got {s}")

    emissions: dict[tuple[int, int], tuple[float, int]] = {}
    offsets = [[0.0] * s for _ in range(s)]
    for lineno, toks in lines[3:]:
        kind = toks[0]
        if kind == "emit" and len(toks) == 5:
            k, i = _int(toks[1], lineno), _int(toks[2], lineno)
            prob, nxt = _float(toks[3], lineno), _int(toks[4], lineno)
            if not (0 <= k < s):
                raise BadStateIndex(f"line {lineno}: state {k} out of range")
            if not (0 <= i < D):
                raise ModelFormatError(f"line {lineno}: symbol {i} out of range")
            if (k, i) in emissions:
                raise ModelFormatError(f"line {lineno}: duplicate emission for state {k} symbol {i}")
            emissions[k, i] = (prob, nxt)
        elif kind == "offset" and len(toks) == 4:
            j, k = _int(toks[1], lineno), _int(toks[2], lineno)
            if not (0 <= j < s and 0 <= k < s):
                raise BadStateIndex(f"line {lineno}: offset index out of range")
            offsets[j][k] = _float(toks[3], lineno)
        else:
            raise ModelFormatError(f"line {lineno}: unrecognized line {' '.join(toks)!r}")
    missing = [(k, i) for k in range(s) for i in range(D) if (k, i) not in emissions]
    if missing:
        raise ModelFormatError(f"missing emissions for (state, symbol) {missing[:4]}")
    model = validate_model(
        {
            "alphabet_size": D,
            "state_count": s,
            "emissions": [[emissions[k, i] for i in range(D)] for k in range(s)],
        }
    )
    return model, PriorityScheme(tuple(map(tuple, offsets)))


def format_model(model: SourceModel, scheme: PriorityScheme | None = None) -> str:
    """Canonical text of a model; its bytes are what codebooks fingerprint."""
    if scheme is None:
        scheme = PriorityScheme.zeros(model.state_count)
    scheme.check_model(model)
    out = [MAGIC_LINE, f"alphabet {model.alphabet_size}", f"states {model.state_count}"]
    for k, row in enumerate(model.emissions):
        for i, em in enumerate(row):
            out.append(f"emit {k} {i} {em.prob!r} {em.next_state}")
    for j, row in enumerate(scheme.offsets):
        for k, c in enumerate(row):
            out.append(f"offset {j} {k} {c!r}")
    return "\n".join(out) + "\n"


def load_model(path) -> tuple[SourceModel, PriorityScheme]:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())
