"""Shared hypothesis strategies."""
from hypothesis import strategies as st

from dichotomy.structures import RelationTable, SimpleModel


@st.composite
def relations(draw, min_size=1, max_size=6, arity=2):
    n = draw(st.integers(min_size, max_size))
    cells = draw(st.sets(st.tuples(*[st.integers(0, n - 1)] * arity)))
    return n, RelationTable.of(arity, cells)


@st.composite
def permutations_of(draw, n):
    return tuple(draw(st.permutations(list(range(n)))))


@st.composite
def binary_models(draw, min_size=1, max_size=6, with_predicate=False):
    n, r = draw(relations(min_size, max_size))
    m = SimpleModel.from_relation(n, r)
    if with_predicate:
        m = m.with_(predicates={"p": draw(st.sets(st.integers(0, n - 1)))})
    return m
