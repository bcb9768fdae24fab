from fractions import Fraction

import pytest

from aquafill.errors import (
    DegenerateOutput,
    EmptyNeighborhood,
    IndexOutOfRange,
    NonpositiveQuantity,
    ValidationError,
)
from aquafill.sequences import (
    Arrival,
    InstanceParams,
    RequestSequence,
    check_feasible,
    dump_sequence,
    induced_nested,
    is_nested,
    load_sequence,
    parse_sequence,
    random_instance,
    random_nested_instance,
    validate,
)
from conftest import RUNNING_NESTED_ROWS, seq


def test_running_example_is_valid(running):
    assert validate(running) is running
    assert running.total_quantity() == 12
    assert running.gamma(4) == (1, 4, 5)
    assert running.last_neighbor() == (2, 4, 5, 5)


def test_validation_errors():
    with pytest.raises(EmptyNeighborhood):
        validate(seq(2, [(set(), 1)]))
    with pytest.raises(NonpositiveQuantity):
        validate(seq(2, [({1}, 0)]))
    with pytest.raises(IndexOutOfRange):
        validate(seq(2, [({3}, 1)]))
    with pytest.raises(ValidationError):
        validate(RequestSequence(2, ()))


def test_nestedness(running, running_nested):
    assert not is_nested(running)
    assert is_nested(seq(3, [({1, 2}, 1)]))
    assert is_nested(running_nested)


def test_induced_nested_of_running_example(running):
    # mu = (2, 4, 5, 5): row t keeps the nodes with mu_i >= t
    out = induced_nested(running)
    assert out.neighborhoods == (
        frozenset({1, 2, 3, 4}), frozenset({1, 2, 3, 4}), frozenset({2, 3, 4}),
        frozenset({2, 3, 4}), frozenset({3, 4}))
    assert out.quantities == running.quantities
    assert is_nested(out)


def test_induced_nested_fixed_point(running_nested):
    assert induced_nested(running_nested) == running_nested


def test_induced_nested_single_node():
    E = seq(1, [({1}, 1), ({1}, 2)])
    assert induced_nested(E) == E


def test_induced_nested_skips_isolated_nodes():
    out = induced_nested(seq(3, [({1}, 1), ({1, 2}, 1)]))
    assert all(3 not in N for N in out.neighborhoods)


def test_induced_nested_surfaces_empty_rows():
    # cannot happen for valid inputs: arrival t always keeps its own neighbors
    E = seq(2, [({1}, 1)])
    assert induced_nested(E).neighborhoods == (frozenset({1}),)
    with pytest.raises(EmptyNeighborhood):
        induced_nested(seq(2, [(set(), 1)]))
    assert issubclass(DegenerateOutput, ValidationError)


def test_check_feasible_running_example_opt(running):
    # a hindsight-optimal allocation reaching (3, 3, 3, 3)
    alloc = [(0, 1, 0, 1), (3, 1, 1, 0), (0, 0, 2, 0), (0, 1, 0, 0), (0, 0, 0, 2)]
    assert check_feasible(running, alloc)


def test_check_feasible_rejections(running):
    good = [(0, 1, 0, 1), (3, 1, 1, 0), (0, 0, 2, 0), (0, 1, 0, 0), (0, 0, 0, 2)]
    stray = list(good)
    stray[0] = (1, 1, 0, 0)
    assert not check_feasible(running, stray)
    short = list(good)
    short[1] = (2, 1, 1, 0)
    assert not check_feasible(running, short)
    neg = list(good)
    neg[1] = ("7/2", "-1/2", 1, 1)
    assert not check_feasible(running, neg)
    assert not check_feasible(running, good[:-1])


def test_json_round_trip(tmp_path, running):
    path = tmp_path / "e.json"
    dump_sequence(running, path)
    assert load_sequence(path) == running
    assert '"q": "2"' in path.read_text()


def test_decimal_quantities_parse_exactly():
    E = parse_sequence('{"n": 2, "arrivals": [{"neighbors": [1, 2], "q": "0.1"}]}')
    assert E.quantities == (Fraction(1, 10),)


@pytest.mark.parametrize("text, fragment", [
    ('{"n": 2, "arrivals": [', ":1:"),
    ('{"n": 2}', "arrivals"),
    ('{"n": 2, "arrivals": [{"neighbors": [1], "q": 0.5}]}', "string or integer"),
    ('{"n": 2, "arrivals": [{"neighbors": [3], "q": "1"}]}', "outside"),
    ('{"n": 2, "arrivals": [{"neighbors": ["a"], "q": "1"}]}', "integers"),
])
def test_parse_errors_name_the_problem(text, fragment):
    with pytest.raises(ValidationError, match=fragment):
        parse_sequence(text)


def test_random_instance_is_deterministic_and_valid():
    p = InstanceParams(n=4, m=5, total_quantity=12, seed=7)
    a, b = random_instance(p), random_instance(p)
    assert a == b
    assert a.n == 4 and a.m == 5 and a.total_quantity() == 12
    assert random_instance(InstanceParams(4, 5, 12, seed=8)) != a


def test_random_instance_free_total_keeps_small_denominators():
    E = random_instance(InstanceParams(n=5, m=8, seed=1))
    assert all(12 % q.denominator == 0 for q in E.quantities)


def test_random_instance_full_density_is_complete():
    E = random_instance(InstanceParams(n=3, m=4, total_quantity=1, density=1.0))
    assert all(N == {1, 2, 3} for N in E.neighborhoods)
    assert is_nested(E)


def test_random_nested_instances_are_nested():
    for s in range(50):
        assert is_nested(random_nested_instance(InstanceParams(n=5, m=6, seed=s)))


def test_params_validation():
    with pytest.raises(ValidationError):
        InstanceParams(n=0, m=1)
    with pytest.raises(ValidationError):
        InstanceParams(n=1, m=1, total_quantity=0)
    with pytest.raises(ValidationError):
        InstanceParams(n=1, m=1, density=0)


def test_arrival_repr_and_relabel():
    a = Arrival({2, 1}, "3/2")
    assert repr(a) == "Arrival({1,2}, 3/2)"
    E = seq(2, [({1}, 1), ({1, 2}, 1)]).relabel([2, 1])
    assert E.neighborhoods == (frozenset({2}), frozenset({1, 2}))
    assert seq(4, RUNNING_NESTED_ROWS).m == 5
