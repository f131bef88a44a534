import pytest

from ppforge.families import FamilyInstance, family_half_power
from ppforge.gf import make_field
from ppforge.oracle import (
    FieldTooLargeError,
    HypothesisUnsatisfiedError,
    NotBijectiveError,
    check_bijective,
    check_iff,
    cycle_structure,
    format_cycle_type,
)

F4 = make_field(2, 1, 2)
F5 = make_field(5)
F7 = make_field(7)
F9 = make_field(3, 1, 2)


def test_identity_is_bijective_with_fixed_points():
    v = check_bijective(lambda x: x, F9)
    assert v.bijective
    assert v.collision is None and v.missed is None
    assert v.cycle_type == (1,) * 9


def test_square_map_collision_on_f5():
    v = check_bijective(lambda x: x * x, F5)
    assert not v.bijective
    # 2^2 = 3^2 = 4 is the first collision in scan order
    assert v.collision == (F5.elem(2), F5.elem(3))
    assert v.missed == F5.elem(2)  # smallest value with no preimage
    assert v.cycle_type is None


def test_frobenius_bijective():
    v = check_bijective(lambda x: x.frobenius(), F9)
    assert v.bijective


def test_cycle_structure_identity():
    assert cycle_structure(lambda x: x, F7) == (1,) * 7


def test_cycle_structure_frobenius_f4():
    # fixes the subfield, swaps the two outside elements
    assert cycle_structure(lambda x: x.frobenius(), F4) == (1, 1, 2)


def test_cycle_structure_additive_shift():
    one = F7.one
    assert cycle_structure(lambda x: x + one, F7) == (7,)


def test_cycle_structure_rejects_non_bijection():
    with pytest.raises(NotBijectiveError):
        cycle_structure(lambda x: x * x, F5)


def test_field_cap():
    with pytest.raises(FieldTooLargeError):
        check_bijective(lambda x: x, F9, cap=8)


def test_determinism():
    a = check_bijective(lambda x: x * x, F9)
    b = check_bijective(lambda x: x * x, F9)
    assert a == b


def test_presence_recount():
    v = check_bijective(lambda x: x.frobenius() + F9.one, F9)
    assert v.bijective
    images = {(x.frobenius() + F9.one).code for x in F9.elements()}
    assert len(images) == 9


def test_format_cycle_type():
    assert format_cycle_type((1, 1, 1, 2, 2, 5)) == "1^3 2^2 5^1"
    assert format_cycle_type((9,)) == "9^1"


def test_check_iff_agreement():
    inst = family_half_power(F9, 1, F9.one, F9.one, F9.zero)
    rec = check_iff(inst)
    assert rec.agree and rec.predicted and rec.observed
    assert rec.family_id == "half_power"


def test_check_iff_rejects_violated_hypotheses():
    broken = FamilyInstance(
        family_id="half_power",
        ctx=F9,
        params={},
        evaluator=lambda x: x,
        predicted_pp=True,
        hypotheses=(("odd_characteristic", False),),
    )
    with pytest.raises(HypothesisUnsatisfiedError):
        check_iff(broken)
