import pytest

from bekktail.cli import reproduce_fixture
from bekktail.errors import UnknownExample
from bekktail.fixtures import FIXTURES, get_fixture
from bekktail.tailtheory import TailMethod

ALL = [v for f in FIXTURES.values() for v in [f] + f.variants]


def test_fixture_ids():
    assert list(FIXTURES) == ["5.1", "5.2", "5.3", "5.4", "5.6", "6.2", "6.4", "6.5", "7.5", "7.6"]


def test_unknown_example():
    with pytest.raises(UnknownExample, match="9.9"):
        get_fixture("9.9")


@pytest.mark.parametrize("fx", ALL, ids=[f.example_id for f in ALL])
def test_fixture_conclusions(fx):
    run, checks = reproduce_fixture(fx)
    assert checks
    failed = [label for label, ok in checks if not ok]
    assert not failed, failed


def test_circulant_method_labels():
    run, _ = reproduce_fixture(get_fixture("5.6"))
    assert all(c.method is TailMethod.SIM_DIAG for c in run.tail.per_component)
    run, _ = reproduce_fixture(get_fixture("5.6").variants[0])
    assert TailMethod.SIM_DIAG_REPEATED in [c.method for c in run.tail.per_component]


def test_rotated_pair_variant_is_undetermined():
    run, _ = reproduce_fixture(get_fixture("6.5").variants[0])
    assert run.tail.alphas == [None, None]
    assert all(c.method is TailMethod.UNDETERMINED for c in run.tail.per_component)
