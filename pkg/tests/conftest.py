import pytest

from demonic.counterexamples import enumerate_small, gen_sn


@pytest.fixture(scope="session")
def corpus_le2():
    """Exhaustive labeled corpus: every valid structure of size 0, 1, 2."""
    return list(enumerate_small(2, dedupe=False))


@pytest.fixture(scope="session")
def corpus3():
    """Deduped size-3 corpus: one representative per isomorphism class."""
    return [s for s in enumerate_small(3, dedupe=True) if s.size == 3]


@pytest.fixture(scope="session")
def full_corpus(corpus_le2, corpus3):
    return corpus_le2 + corpus3


@pytest.fixture(scope="session")
def sn2():
    return gen_sn(2)
