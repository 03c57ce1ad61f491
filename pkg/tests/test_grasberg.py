"""Tests for norm parameters, step functions, critical sets, and the two lemma checkers."""

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ordspace.grasberg import (
    GrasbergParams,
    StepFunction,
    check_king,
    check_queen,
    constant,
    grasberg_norm,
    indicator,
    params,
    phi,
    random_step_function,
    step_add,
    step_convex,
    step_scale,
    sup_on,
    value_at,
    step_function_from_json,
    step_function_to_json,
)
from ordspace.ordinal import (
    OMEGA,
    ONE,
    ZERO,
    add,
    from_int,
    mul_nat,
    omega_pow,
    parse,
)
from ordspace.topology import (
    ClosedSet,
    Singleton,
    Stratum,
    cb_index,
    derivative,
    interval,
    is_empty,
    iterated_derivative,
)

from conftest import landmark_points

TWO = from_int(2)
OMEGA_SQ = omega_pow(TWO)
OMEGA_OMEGA = omega_pow(OMEGA)

SPACES = [interval(OMEGA), interval(OMEGA_SQ), interval(OMEGA_OMEGA)]


def one_then_zero(ambient, cut=from_int(5)):
    """1 on [0, cut], 0 on (cut, ambient]."""
    return StepFunction(ambient, (cut, ambient), (Fraction(1), Fraction(0)))


# --- params ------------------------------------------------------------------


def test_params_omega():
    p = params(interval(OMEGA))
    assert (p.o, p.b, p.cb) == (ZERO, 1, TWO)


def test_params_omega_squared():
    p = params(interval(OMEGA_SQ))
    assert (p.o, p.b, p.cb) == (ZERO, 2, from_int(3))


def test_params_omega_omega():
    p = params(interval(OMEGA_OMEGA))
    assert (p.o, p.b, p.cb) == (ONE, 1, parse("w+1"))


def test_params_rejects_finite_space():
    with pytest.raises(ValueError):
        params(interval(from_int(5)))
    with pytest.raises(ValueError):
        params(ClosedSet(OMEGA, []))


@pytest.mark.parametrize(
    "z",
    ["w", "w^(2)", "w^(3)*2", "w^(w)", "w^(w)*3+w^(2)", "w^(w^(2))", "w^(2)*2"],
)
def test_params_bracketing_invariants(z):
    space = interval(parse(z))
    p = params(space)
    assert omega_pow(p.o) < p.cb <= omega_pow(add(p.o, ONE))
    lower = mul_nat(omega_pow(p.o), p.b)
    upper = mul_nat(omega_pow(p.o), p.b + 1)
    assert lower < p.cb <= upper
    # b is the last non-empty level
    assert not is_empty(iterated_derivative(space, lower))
    assert is_empty(iterated_derivative(space, upper)) or p.cb <= upper


# --- sup_on ------------------------------------------------------------------


def test_sup_on_constant():
    assert sup_on(constant(OMEGA, 1), interval(OMEGA)) == 1


def test_sup_on_ignores_pieces_missing_the_set():
    f = one_then_zero(OMEGA)
    assert sup_on(f, derivative(interval(OMEGA))) == 0


def test_sup_on_empty_set_is_zero():
    f = one_then_zero(OMEGA)
    assert sup_on(f, ClosedSet(OMEGA, [])) == 0


def test_sup_on_rejects_ambient_mismatch():
    with pytest.raises(ValueError):
        sup_on(constant(OMEGA, 1), interval(OMEGA_SQ))


# --- grasberg_norm -----------------------------------------------------------


def test_norm_constant_on_omega():
    assert grasberg_norm(constant(OMEGA, 1), interval(OMEGA)) == 2


def test_norm_drops_to_sup_when_high_levels_vanish():
    assert grasberg_norm(one_then_zero(OMEGA), interval(OMEGA)) == 1


def test_norm_constant_on_omega_squared():
    assert grasberg_norm(constant(OMEGA_SQ, 1), interval(OMEGA_SQ)) == 4


# --- phi ---------------------------------------------------------------------


def test_phi_constant_keeps_only_top_level():
    got = phi(constant(OMEGA, 1), interval(OMEGA), Fraction(1, 2))
    assert got == ClosedSet(OMEGA, [Stratum(ZERO, OMEGA, ONE)])


def test_phi_empty_when_predicate_never_fires():
    f = StepFunction(OMEGA, (from_int(5), OMEGA), (Fraction(1), Fraction(1, 2)))
    # |f| = 2 (level 1 sees 1/2 doubled... level 0 sees 1): pick eps large
    assert is_empty(phi(f, interval(OMEGA), Fraction(5)))


def test_phi_level_zero_window():
    got = phi(one_then_zero(OMEGA), interval(OMEGA), Fraction(1, 2))
    want = ClosedSet(OMEGA, [Singleton(ZERO), Stratum(ZERO, from_int(5), ZERO)])
    assert got == want


def test_phi_rejects_nonpositive_eps():
    with pytest.raises(ValueError):
        phi(constant(OMEGA, 1), interval(OMEGA), Fraction(0))


# --- check_king --------------------------------------------------------------


def test_king_constant_on_omega():
    report = check_king(constant(OMEGA, 1), interval(OMEGA), Fraction(1, 2))
    assert report.cb_phi == ONE
    assert report.bound == ONE
    assert report.passed


def test_king_on_omega_omega():
    report = check_king(constant(OMEGA_OMEGA, 1), interval(OMEGA_OMEGA), Fraction(1, 2))
    assert report.bound == OMEGA
    assert report.cb_phi <= OMEGA
    assert report.passed


def test_king_finite_phi():
    report = check_king(one_then_zero(OMEGA), interval(OMEGA), Fraction(1, 2))
    assert report.cb_phi == ONE
    assert report.passed


@pytest.mark.parametrize("space_text", ["w", "w^(2)", "w^(3)", "w^(w)"])
def test_king_fuzz_small(space_text):
    space = interval(parse(space_text))
    for seed in range(300):
        f = random_step_function(space, seed)
        eps = Fraction(seed % 7 + 1, 4)
        assert check_king(f, space, eps).passed


# --- check_queen -------------------------------------------------------------


def test_queen_tight_case():
    space = interval(OMEGA)
    f = constant(OMEGA, 1)
    g = constant(OMEGA, Fraction(1, 5))
    eps = Fraction(2, 5)
    report = check_queen(f, g, space, eps)
    assert report.hypothesis_ok
    assert report.hypothesis_lhs == Fraction(1, 5)
    assert report.hypothesis_rhs == Fraction(1, 5)
    assert report.lhs == Fraction(12, 5)
    assert report.rhs == Fraction(12, 5)
    assert report.passed


def test_queen_zero_perturbation():
    space = interval(OMEGA)
    f = one_then_zero(OMEGA)
    report = check_queen(f, constant(OMEGA, 0), space, Fraction(1, 3))
    assert report.hypothesis_ok
    assert report.lhs == grasberg_norm(f, space)
    assert report.passed


def test_queen_zero_base():
    space = interval(OMEGA)
    g = constant(OMEGA, Fraction(7, 2))
    report = check_queen(constant(OMEGA, 0), g, space, Fraction(1, 4))
    assert report.hypothesis_ok  # phi of the zero function is empty
    assert report.lhs == grasberg_norm(g, space)
    assert report.passed


def rescale_to_hypothesis(f, g, space, eps):
    """Scale g down until it satisfies the queen hypothesis on phi(f, eps)."""
    cap = eps / 2 ** params(space).b
    spread = sup_on(g, phi(f, space, eps))
    if spread > cap:
        g = step_scale(g, cap / spread)
    return g


@pytest.mark.parametrize("space_text", ["w", "w^(2)", "w^(w)"])
def test_queen_fuzz_small(space_text):
    space = interval(parse(space_text))
    for seed in range(200):
        f = random_step_function(space, 2 * seed)
        g = random_step_function(space, 2 * seed + 1)
        eps = Fraction(seed % 5 + 1, 3)
        g = rescale_to_hypothesis(f, g, space, eps)
        report = check_queen(f, g, space, eps)
        assert report.hypothesis_ok
        assert report.passed


# --- step function arithmetic --------------------------------------------------


def test_step_function_merges_equal_adjacent_values():
    f = StepFunction(OMEGA, (from_int(5), OMEGA), (Fraction(1), Fraction(1)))
    assert f == constant(OMEGA, 1)


def test_step_function_validates_breakpoints():
    with pytest.raises(ValueError):
        StepFunction(OMEGA, (from_int(5),), (Fraction(1),))  # last must be ambient
    with pytest.raises(ValueError):
        StepFunction(OMEGA, (from_int(5), from_int(3), OMEGA), (1, 2, 3))


def test_value_at():
    f = one_then_zero(OMEGA)
    assert value_at(f, ZERO) == 1
    assert value_at(f, from_int(5)) == 1
    assert value_at(f, from_int(6)) == 0
    assert value_at(f, OMEGA) == 0


def test_step_add_constants():
    got = step_add(constant(OMEGA, 1), constant(OMEGA, 1))
    assert got == constant(OMEGA, 2)


def test_step_convex_identity():
    f = one_then_zero(OMEGA)
    assert step_convex([Fraction(1)], [f]) == f


def test_step_convex_halves():
    f = one_then_zero(OMEGA)
    g = step_add(constant(OMEGA, 1), step_scale(f, -1))  # the complementary indicator
    got = step_convex([Fraction(1, 2), Fraction(1, 2)], [f, g])
    assert got == constant(OMEGA, Fraction(1, 2))


def test_step_convex_rejects_bad_weights():
    f = constant(OMEGA, 1)
    with pytest.raises(ValueError):
        step_convex([Fraction(1, 2)], [f])
    with pytest.raises(ValueError):
        step_convex([Fraction(3, 2), Fraction(-1, 2)], [f, f])


def test_indicator_window():
    f = indicator(OMEGA, from_int(2), from_int(4))
    assert value_at(f, from_int(2)) == 0
    assert value_at(f, from_int(3)) == 1
    assert value_at(f, from_int(4)) == 1
    assert value_at(f, from_int(5)) == 0


# --- random generator ----------------------------------------------------------


def test_random_single_piece_is_constant():
    f = random_step_function(interval(OMEGA), seed=1, max_pieces=1)
    assert len(f.breakpoints) == 1


def test_random_deterministic():
    a = random_step_function(interval(OMEGA_SQ), seed=7, max_pieces=5)
    b = random_step_function(interval(OMEGA_SQ), seed=7, max_pieces=5)
    assert a == b


def test_random_generator_contract():
    space = interval(OMEGA_SQ)
    for seed in range(100):
        f = random_step_function(space, seed, max_pieces=5)
        assert f.ambient == OMEGA_SQ
        assert 1 <= len(f.breakpoints) <= 5
        assert all(-1 <= v <= 1 for v in f.values)
        assert sup_on(f, space) <= 1


# --- norm laws -----------------------------------------------------------------


@pytest.mark.parametrize("space", SPACES, ids=["w", "w2", "ww"])
def test_norm_sandwich_fuzz(space):
    p = params(space)
    for seed in range(300):
        f = random_step_function(space, seed)
        sup = sup_on(f, space)
        norm = grasberg_norm(f, space)
        assert sup <= norm <= 2**p.b * sup


@given(st.integers(min_value=0, max_value=10**6), st.fractions())
def test_norm_homogeneous(seed, c):
    space = interval(OMEGA_SQ)
    f = random_step_function(space, seed)
    assert grasberg_norm(step_scale(f, c), space) == abs(c) * grasberg_norm(f, space)


@given(st.integers(min_value=0, max_value=10**6), st.integers(min_value=0, max_value=10**6))
def test_norm_triangle(seed_a, seed_b):
    space = interval(OMEGA_SQ)
    f = random_step_function(space, seed_a)
    g = random_step_function(space, seed_b)
    assert grasberg_norm(step_add(f, g), space) <= grasberg_norm(
        f, space
    ) + grasberg_norm(g, space)


def test_phi_monotone_in_eps():
    space = interval(OMEGA_SQ)
    for seed in range(100):
        f = random_step_function(space, seed)
        small = phi(f, space, Fraction(1, 4))
        large = phi(f, space, Fraction(3, 4))
        from ordspace.topology import contains

        for point in landmark_points(large):
            if point <= space.ambient and contains(large, point):
                assert contains(small, point)


def test_everything_stays_rational():
    space = interval(OMEGA_SQ)
    f = random_step_function(space, 11)
    assert all(isinstance(v, Fraction) for v in f.values)
    assert isinstance(grasberg_norm(f, space), Fraction)
    assert isinstance(sup_on(f, space), Fraction)


# --- JSON ----------------------------------------------------------------------


def test_step_function_json_shape():
    f = one_then_zero(OMEGA)
    data = step_function_to_json(f)
    assert set(data) == {"ambient", "pieces"}
    assert data["pieces"][0] == {"upTo": [[[], 5]], "value": "1"}


def test_step_function_json_round_trip():
    for seed in range(50):
        f = random_step_function(interval(OMEGA_SQ), seed)
        assert step_function_from_json(step_function_to_json(f)) == f
