import json
from pathlib import Path

import numpy as np
import pytest

from kinasr.tokenizer import Vocabulary, build_vocab

FIXTURES = Path(__file__).parent / "fixtures"

ALPHABET = "abcdefghijklmnopqrstuvwxyz.,?!:' "


@pytest.fixture(scope="session")
def syllable_vocab():
    return build_vocab("syllable")


@pytest.fixture(scope="session")
def char_vocab():
    return build_vocab("character")


@pytest.fixture(scope="session")
def table2():
    with open(FIXTURES / "table2_inventory.json", encoding="utf-8") as f:
        return json.load(f)


def toy_vocab(n_labels: int) -> Vocabulary:
    """Blank + n_labels single-letter tokens, for synthetic posteriorgrams."""
    return Vocabulary(mode="character",
                      tokens=tuple(["<blank>"] + [chr(ord("a") + i) for i in range(n_labels)]))


def random_posteriorgram(rng: np.random.Generator, n_frames: int, n_vocab: int):
    from kinasr.ctc import Posteriorgram

    probs = rng.dirichlet(np.ones(n_vocab), size=n_frames)
    return Posteriorgram.from_probs(probs)
