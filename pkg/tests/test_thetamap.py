from fractions import Fraction

import pytest
import sympy
from hypothesis import given

from spweyl.polyalg import parse_poly
from spweyl.sp2n import H, Xe, Xm, Xp, basis
from spweyl.thetamap import (
    ClassificationError,
    GeneratorImages,
    ShapePreconditionError,
    ShapeViolation,
    build_theta,
    check_homomorphism,
    classify,
    extract_shape,
    shape_images,
    sigma_twist,
    verify_power_identities,
)
from spweyl.weyl import WeylElement, is_even, parse_operator

from conftest import polys, sym_apply, sym_vars, to_sym, weyl_elements

P = lambda text, n=2: parse_poly(text, n)  # noqa: E731
W = lambda text, n=2: parse_operator(text, n)  # noqa: E731


def test_theta0_cartan():
    assert build_theta(2).images[H(0)] == W("t1*d1 + 1/2")


def test_theta_mixed_image():
    assert build_theta(2, P("t1*t2")).images[Xe(0, 1)] == W("t1^2 + t1*d2")


def test_constant_f_gives_theta0():
    assert build_theta(2, P("7")).images == build_theta(2).images


@pytest.mark.parametrize("n, f", [(2, "0"), (2, "t1*t2"), (3, "t1^2 + t2*t3")])
def test_check_homomorphism_passes(n, f):
    r = check_homomorphism(build_theta(n, P(f, n)))
    assert r.passed and r.pairs_checked == len(basis(n)) ** 2


def test_dropped_half_fails_on_the_sl2_pair():
    g = build_theta(2)
    images = dict(g.images)
    images[H(0)] = W("t1*d1")
    r = check_homomorphism(GeneratorImages(2, images))
    assert (Xp(0, 0), Xm(0, 0)) in r.failing_pairs()
    diff = [W(e) - W(o) for x, y, e, o in r.failures if (x, y) == (Xp(0, 0), Xm(0, 0))][0]
    assert diff == WeylElement.constant(2, -2)


@pytest.mark.parametrize("n, f", [(2, "t1*t2 + t1^3"), (3, "t1^2*t3 - 2*t2")])
def test_theta_is_conjugation_by_exponential(n, f):
    # oracle: theta_f(x) g = e^{-f} theta_0(x) (e^{f} g), computed by sympy
    t = sym_vars(n)
    fs = to_sym(P(f, n), t)
    g = t[0] ** 2 * t[-1] + 3 * t[0]
    th0, thf = build_theta(n).images, build_theta(n, P(f, n)).images
    for b in basis(n):
        lhs = sym_apply(thf[b], g, t)
        rhs = sympy.expand(sympy.simplify(sympy.exp(-fs) * sym_apply(th0[b], sympy.exp(fs) * g, t)))
        assert sympy.simplify(lhs - rhs) == 0, b.label


def test_sigma_twist_examples():
    f = P("t1^2*t2")
    assert sigma_twist(f, W("t1")) == W("t1")
    assert sigma_twist(f, W("d1")) == W("d1 + 2*t1*t2")
    th0, thf = build_theta(2), build_theta(2, f)
    for b in basis(2):
        assert sigma_twist(f, th0.images[b]) == thf.images[b]


@given(polys(2, 3), weyl_elements(2, 2), weyl_elements(2, 2))
def test_sigma_twist_is_algebra_map(f, a, b):
    assert sigma_twist(f, a * b) == sigma_twist(f, a) * sigma_twist(f, b)


@given(polys(2, 3), weyl_elements(2, 3))
def test_sigma_twist_inverse(f, a):
    assert sigma_twist(-f, sigma_twist(f, a)) == a


@given(polys(2, 3))
def test_random_theta_is_homomorphism(f):
    assert check_homomorphism(build_theta(2, f)).passed


@given(polys(2, 3))
def test_classify_round_trip(f):
    c = classify(build_theta(2, f))
    assert c.f == f - f.constant_term()
    assert c.b == Fraction(1, 2)


def test_classify_round_trip_n3():
    for text in ["t1*t2*t3 + t3^2", "t1 - t2^3 + 4"]:
        f = P(text, 3)
        assert classify(build_theta(3, f)).f == f - f.constant_term()


def test_shape_of_theta0():
    s = extract_shape(build_theta(2))
    assert s.p[(0, 0)] == P("1/2") and s.p[(1, 1)] == P("1/2")
    assert not s.p[(0, 1)] and not s.p[(1, 0)]
    assert all(not v for v in s.q.values())


def test_shape_of_theta_t1t2():
    s = extract_shape(build_theta(2, P("t1*t2")))
    assert s.p[(0, 1)] == P("t1^2") and s.p[(1, 0)] == P("t2^2")
    assert s.p[(0, 0)] == P("t1*t2 + 1/2") == s.p[(1, 1)]
    assert s.q[(0, 1)] == P("-t1*t2 - 1")


def test_shape_precondition():
    images = dict(build_theta(2).images)
    images[Xp(0, 1)] = W("t1*t2 + 1")
    with pytest.raises(ShapePreconditionError):
        extract_shape(GeneratorImages(2, images))


def test_shape_violation_names_generator():
    images = dict(build_theta(2).images)
    images[Xe(0, 1)] = W("t1*d2 + t1^2*d2^2")
    with pytest.raises(ShapeViolation, match=r"Xe\(1,2\)"):
        extract_shape(GeneratorImages(2, images))


def _theta_shape(f, n=2):
    return extract_shape(build_theta(n, P(f, n)))


def test_classify_rejects_b_one():
    s = _theta_shape("t1*t2")
    p = dict(s.p)
    p[(0, 0)] = p[(0, 0)] + P("1/2")
    p[(1, 1)] = p[(1, 1)] + P("1/2")
    with pytest.raises(ClassificationError) as info:
        classify(shape_images(2, p, s.q))
    assert info.value.reason == "b != 1/2"


def test_classify_rejects_unequal_constants():
    s = _theta_shape("0")
    p = dict(s.p)
    p[(1, 1)] = P("1")
    with pytest.raises(ClassificationError) as info:
        classify(shape_images(2, p, s.q))
    assert info.value.reason == "constants differ"


def test_classify_rejects_non_integrable():
    s = _theta_shape("0")
    p = dict(s.p)
    p[(0, 0)] = P("t1*t2 + 1/2")
    with pytest.raises(ClassificationError) as info:
        classify(shape_images(2, p, s.q))
    assert info.value.reason == "not integrable"


def test_classify_rejects_kernel_component_in_p():
    # t1 t2^2 lies in the kernel of (t1 d1 - 1), so only the direct check sees it
    s = _theta_shape("t1*t2")
    p = dict(s.p)
    p[(0, 1)] = p[(0, 1)] + P("t1*t2^2")
    with pytest.raises(ClassificationError) as info:
        classify(shape_images(2, p, s.q))
    assert info.value.reason == "p mismatch"


def test_classify_rejects_wrong_q():
    s = _theta_shape("t1*t2")
    q = dict(s.q)
    q[(0, 1)] = q[(0, 1)] + P("t1^2")
    q.pop((1, 0))
    with pytest.raises(ClassificationError) as info:
        classify(shape_images(2, s.p, q))
    assert info.value.reason == "q mismatch"


def test_power_identity_example():
    # [-d1^2, t1^4] = -8 t1^2 (t1 d1 + 1/2 + 1)
    lhs = W("-1*d1^2") * W("t1^4") - W("t1^4") * W("-1*d1^2")
    assert lhs == W("t1^2").scale(-8) * W("t1*d1 + 3/2")


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("f", ["0", "t1*t2", "t1^2"])
def test_power_identities(n, f):
    r = verify_power_identities(n, P(f, n), 4)
    assert r.passed and sum(r.checked.values()) > 0


def test_even_f_gives_even_images():
    for b, w in build_theta(2, P("t1^2 + 3*t1*t2")).images.items():
        assert is_even(w), b.label


def test_images_json_round_trip():
    g = build_theta(2, P("t1*t2 - i*t2^2"))
    again = GeneratorImages.from_json(g.to_json())
    assert again.images == g.images
