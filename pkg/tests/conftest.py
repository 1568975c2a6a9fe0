import pytest
from hypothesis import strategies as st

from virusmachines import ENV, build_example, build_nat, make_machine


@pytest.fixture
def example():
    return build_example()


@pytest.fixture
def nat():
    return build_nat()


@st.composite
def machines(draw, max_hosts=3, max_instructions=4, max_weight=3, max_viruses=3, max_out_degree=2):
    """Small valid machines; every structural choice is drawn so failures shrink."""
    p = draw(st.integers(1, max_hosts))
    q = draw(st.integers(1, max_instructions))
    hosts = [f"h{k}" for k in range(1, p + 1)]
    instrs = [f"i{k}" for k in range(1, q + 1)]

    channels = {}
    for h in hosts:
        targets = draw(st.sets(st.sampled_from([ENV] + [t for t in hosts if t != h]), max_size=2))
        for t in sorted(targets):
            channels[(h, t)] = draw(st.integers(1, max_weight))

    edges = []
    for i in instrs:
        succ = draw(st.lists(st.sampled_from(instrs), max_size=max_out_degree, unique=True))
        edges += [(i, t, draw(st.sampled_from((1, 1, 2)))) for t in succ]

    keys = sorted(channels)
    att = {}
    if keys:
        for i in instrs:
            k = draw(st.one_of(st.none(), st.sampled_from(keys)))
            if k is not None:
                att[i] = k

    return make_machine(
        hosts=[(h, draw(st.integers(0, max_viruses))) for h in hosts],
        channels=[(s, t, w) for (s, t), w in channels.items()],
        instructions=instrs,
        edges=edges,
        attachments=att,
        name="drawn",
    )
