import random
from pathlib import Path

import pytest
from hypothesis import strategies as st

from tunstall.model import PriorityScheme, SourceModel, validate_model

MODELS = Path(__file__).resolve().parent.parent / "models"

# Offsets for the two-state chain: f[0][1] = -0.0462158 - ln p and
# f[1][0] = +0.0462158 - ln p, states renumbered from 1-based to 0-based.
MARKOV_OFFSETS = ((0.0, -0.0462158), (0.0462158, 0.0))


def markov_chain_model() -> SourceModel:
    return validate_model(
        {
            "alphabet_size": 3,
            "state_count": 2,
            "emissions": [
                [(0.4, 1), (0.3, 1), (0.3, 1)],
                [(0.5, 1), (0.25, 0), (0.25, 0)],
            ],
        }
    )


@pytest.fixture
def markov_chain():
    return markov_chain_model(), PriorityScheme(MARKOV_OFFSETS)


@pytest.fixture
def models_dir():
    return MODELS


def _normalize(weights):
    total = sum(weights)
    probs = [w / total for w in weights]
    probs[-1] = 1.0 - sum(probs[:-1])
    return probs


def random_model(rng: random.Random, D: int, s: int) -> SourceModel:
    rows = []
    for _ in range(s):
        probs = _normalize([rng.random() + 0.02 for _ in range(D)])
        rows.append([(p, rng.randrange(s)) for p in probs])
    return validate_model({"alphabet_size": D, "state_count": s, "emissions": rows})


def random_scheme(rng: random.Random, s: int, spread: float = 0.5) -> PriorityScheme:
    return PriorityScheme(tuple(tuple(rng.uniform(-spread, spread) for _ in range(s)) for _ in range(s)))


@st.composite
def models(draw, max_D=4, max_s=4):
    D = draw(st.integers(2, max_D))
    s = draw(st.integers(1, max_s))
    rows = []
    for _ in range(s):
        weights = draw(st.lists(st.integers(1, 20), min_size=D, max_size=D))
        nxt = draw(st.lists(st.integers(0, s - 1), min_size=D, max_size=D))
        rows.append(list(zip(_normalize(weights), nxt)))
    return validate_model({"alphabet_size": D, "state_count": s, "emissions": rows})


@st.composite
def model_and_scheme(draw, max_D=4, max_s=4):
    model = draw(models(max_D, max_s))
    s = model.state_count
    offsets = draw(
        st.lists(
            st.lists(st.floats(-0.5, 0.5), min_size=s, max_size=s), min_size=s, max_size=s
        )
    )
    return model, PriorityScheme(tuple(map(tuple, offsets)))


def sample_walk(model: SourceModel, length: int, rng: random.Random, state: int = 0) -> list:
    out = []
    symbols = range(model.alphabet_size)
    weights = [[em.prob for em in row] for row in model.emissions]
    for _ in range(length):
        sym = rng.choices(symbols, weights[state])[0]
        out.append(sym)
        state = model.emissions[state][sym].next_state
    return out


ACCEPTANCE_LINES: list = []


def record_criterion(number: int, title: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title}" + (f" ({detail})" if detail else ""))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
