import random

from hypothesis import strategies as st

from seating.profile import Arrangement, ClassStructure, PreferenceProfile


@st.composite
def profiles(draw, min_n=2, max_n=7, min_value=-3, max_value=3):
    n = draw(st.integers(min_n, max_n))
    rows = [
        [
            draw(st.integers(min_value, max_value)) if i != j else 0
            for j in range(n)
        ]
        for i in range(n)
    ]
    return PreferenceProfile.from_rows(rows)


@st.composite
def binary_profiles(draw, min_n=2, max_n=7):
    return draw(profiles(min_n=min_n, max_n=max_n, min_value=0, max_value=1))


@st.composite
def symmetric_profiles(draw, min_n=2, max_n=7, min_value=-3, max_value=3):
    n = draw(st.integers(min_n, max_n))
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = draw(st.integers(min_value, max_value))
            rows[i][j] = rows[j][i] = v
    return PreferenceProfile.from_rows(rows)


@st.composite
def class_structures(draw, max_k=3, max_n=8, min_value=-2, max_value=2):
    k = draw(st.integers(1, max_k))
    n = draw(st.integers(max(3, k), max_n))
    sizes = [1] * k
    for _ in range(n - k):
        sizes[draw(st.integers(0, k - 1))] += 1
    matrix = [
        [draw(st.integers(min_value, max_value)) for _ in range(k)] for _ in range(k)
    ]
    return ClassStructure.from_lists(sizes, matrix)


@st.composite
def arrangements_of(draw, n):
    seats = list(range(n))
    rng = random.Random(draw(st.integers(0, 2**32 - 1)))
    rng.shuffle(seats)
    return Arrangement(tuple(seats))
