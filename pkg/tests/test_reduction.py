"""Reduction machinery: matrices, ansatz conversion, families."""

import random

import pytest

import gcsym.reduction as red
from gcsym.expr import (
    Jet, Param, T, X, ZERO, add, mul, parse, partial_derivative, rat,
    substitute,
)
from gcsym.matrix import SingularMatrixError, SymbolicMatrix
from gcsym.oracle import ZeroStatus, is_zero
from gcsym.reduction import (
    Ansatz, InessentialFamilyError, NonAffineError, NotReducible,
    NotSolutionError, ReducedSystem, SingularAnsatzError, SolutionFamily,
    ansatz_to_operator, essentiality_det, family_to_ansatz, phi_matrix,
    verify_solution,
)
from gcsym.symmetry import (
    EvolutionEquation, ReducedOperator, canonical_equal, check_gcs,
    to_canonical,
)

SL2 = EvolutionEquation(2, parse("(v*v_2 - (5/6)*v_1^2)/x^2 + v_1", depvar="v"),
                        depvar="v")
SL2_ANSATZ = Ansatz(("phi4", "phi5", "phi6"),
                    parse("2*x^3 + phi4*x^4 + phi5*x^5 + phi6*x^6", depvar="v",
                          params=["phi4", "phi5", "phi6"]))
WEQ = EvolutionEquation(2, parse("3*w_2 + 3*w_1/x - 3*w/x^2", depvar="w"),
                        depvar="w")
W_ANSATZ = Ansatz(("psi0", "psi1", "psi2"),
                  parse("psi0*x^3 + psi1*x + psi2*x^(-1)", depvar="w",
                        params=["psi0", "psi1", "psi2"]))
HEAT = EvolutionEquation(2, parse("u_2"))


# ---------------------------------------------------------------------------
# symbolic matrices

def test_matrix_det_and_inverse_small():
    m = SymbolicMatrix.from_rows([[X, parse("1")], [parse("t"), X]])
    assert m.det() == parse("x^2 - t")
    inv = m.inverse()
    prod = m.matmul(inv)
    for i in range(2):
        for j in range(2):
            expected = parse("1") if i == j else ZERO
            assert is_zero(add(prod[i, j], mul(rat(-1), expected))).is_zeroish


def test_matrix_singular():
    m = SymbolicMatrix.from_rows([[X, X], [X, X]])
    assert m.det() == ZERO
    with pytest.raises(SingularMatrixError):
        m.inverse()


def test_matrix_bareiss_path_matches_cofactor():
    rng = random.Random(59)
    n = 5
    rows = [[rat(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(n)]
            for _ in range(n)]
    big = SymbolicMatrix.from_rows(rows)
    det_bareiss = big.det()  # n > 4 takes the elimination path

    def cofactor(rows):
        if len(rows) == 1:
            return rows[0][0]
        total = ZERO
        for j, head in enumerate(rows[0]):
            minor = [r[:j] + r[j + 1:] for r in rows[1:]]
            sign = rat(1) if j % 2 == 0 else rat(-1)
            total = add(total, mul(sign, head, cofactor(minor)))
        return total

    assert is_zero(add(det_bareiss, mul(rat(-1), cofactor(rows)))).is_zeroish
    inv = big.inverse()
    prod = big.matmul(inv)
    for i in range(n):
        for j in range(n):
            expected = rat(1) if i == j else ZERO
            assert is_zero(add(prod[i, j], mul(rat(-1), expected))).is_zeroish


def test_phi_matrix_inverse_contract(corpus, plan):
    for case in corpus:
        phi = phi_matrix(case.ansatz)
        prod = phi.matmul(phi.inverse())
        n = phi.n
        for i in range(n):
            for j in range(n):
                expected = rat(1) if i == j else ZERO
                assert is_zero(add(prod[i, j], mul(rat(-1), expected)),
                               plan).is_zeroish


# ---------------------------------------------------------------------------
# ansatz -> operator

def test_ansatz_to_operator_trivial():
    op = ansatz_to_operator(Ansatz(("phi1",), Param("phi1")))
    assert op.rho == 1 and op.eta_check == ZERO


def test_ansatz_to_operator_w_equation():
    op = ansatz_to_operator(W_ANSATZ)
    assert op.rho == 3
    assert op.eta_check == parse("(3*x*w_1 - 3*w)/x^3", depvar="w")
    # i.e. the constraint x^3 w_3 - 3 x w_1 + 3 w = 0
    stated = to_canonical(ReducedOperator(parse("x^3*w_3 - 3*x*w_1 + 3*w",
                                                depvar="w")))
    assert canonical_equal(op, stated)


def test_ansatz_to_operator_sl2():
    op = ansatz_to_operator(SL2_ANSATZ)
    stated = to_canonical(ReducedOperator(
        parse("x^3*v_3 - 12*x^2*v_2 + 60*x*v_1 - 120*v + 12*x^3", depvar="v")))
    assert op.rho == 3
    assert canonical_equal(op, stated)


def test_ansatz_round_trip_identities(corpus, plan):
    # u_{a-1} = F_{a-1} with the solved parameters substituted back
    for case in corpus:
        for residual in red.inversion_identities(case.ansatz, plan):
            assert is_zero(residual, plan).is_zeroish


def test_ansatz_satisfies_its_own_constraint(corpus, plan):
    # F_rho equals eta_check with u_{a-1} replaced by F_{a-1}: the ansatz
    # solves the constraint its operator encodes
    for case in corpus:
        ansatz = case.ansatz
        can = ansatz_to_operator(ansatz, plan)
        fx = red._x_derivatives(ansatz.f, can.rho)
        bindings = {Jet(0, a): fx[a] for a in range(can.rho)}
        residual = add(fx[can.rho],
                       mul(rat(-1), substitute(can.eta_check, bindings)))
        assert is_zero(residual, plan).is_zeroish


def test_ansatz_validation():
    with pytest.raises(NonAffineError):
        Ansatz(("phi1",), parse("phi1^2*x", params=["phi1"]))
    with pytest.raises(ValueError):
        Ansatz(("phi1",), parse("u_1 + phi1", params=["phi1"]))
    with pytest.raises(SingularAnsatzError):
        # phi2 never appears: a zero column in Phi
        ansatz_to_operator(Ansatz(("phi1", "phi2"), parse("phi1*x", params=["phi1"])))


# ---------------------------------------------------------------------------
# reduction

def test_reduce_sl2_reproduces_printed_system():
    outcome = red.reduce(SL2, SL2_ANSATZ)
    assert isinstance(outcome, ReducedSystem)
    expected = [parse("7*phi5 - (4/3)*phi4^2"),
                parse("18*phi6 - (4/3)*phi4*phi5"),
                parse("-(5/6)*phi5^2 + 2*phi4*phi6")]
    for got, want in zip(outcome.rhs, expected):
        assert is_zero(add(got, mul(rat(-1), want))).is_zeroish


def test_reduce_w_equation():
    outcome = red.reduce(WEQ, W_ANSATZ)
    assert isinstance(outcome, ReducedSystem)
    expected = [ZERO, parse("24*psi0"), ZERO]
    for got, want in zip(outcome.rhs, expected):
        assert is_zero(add(got, mul(rat(-1), want))).is_zeroish


def test_reduce_constant_ansatz_on_heat():
    outcome = red.reduce(HEAT, Ansatz(("phi1",), Param("phi1")))
    assert isinstance(outcome, ReducedSystem)
    assert outcome.rhs == (ZERO,)


def test_reduce_cubic_ansatz_on_heat():
    # u = p1 + p2 x + p3 x^2 + p4 x^3 into u_t = u_2: matching coefficients
    # by hand gives p1_t = 2 p3, p2_t = 6 p4, p3_t = 0, p4_t = 0
    params = ("p1", "p2", "p3", "p4")
    ansatz = Ansatz(params, parse("p1 + p2*x + p3*x^2 + p4*x^3",
                                  params=list(params)))
    outcome = red.reduce(HEAT, ansatz)
    assert isinstance(outcome, ReducedSystem)
    assert outcome.rhs == (parse("2*p3", params=["p3"]),
                           parse("6*p4", params=["p4"]), ZERO, ZERO)


def test_exponential_ansatz_chain_on_heat():
    # u = phi1 exp(x) solves u_t = u_2 exactly when phi1_t = phi1; the
    # matching constraint is u_1 = u
    from gcsym.oracle import IntegrationPlan, integrate_reduced, pde_residual
    from gcsym.symmetry import check_gcs

    ansatz = Ansatz(("phi1",), parse("phi1*exp(x)", params=["phi1"]))
    op = ansatz_to_operator(ansatz)
    assert op.rho == 1 and op.eta_check == parse("u")
    assert check_gcs(HEAT, op).status.is_positive

    outcome = red.reduce(HEAT, ansatz)
    assert isinstance(outcome, ReducedSystem)
    assert outcome.rhs == (Param("phi1"),)

    traj = integrate_reduced(outcome.rhs, outcome.params,
                             IntegrationPlan(initial=(1.0,), t1=0.05))
    residual = pde_residual(HEAT.h, HEAT.r, ansatz.f, ansatz.params, traj,
                            [0.8, 1.0, 1.3, 1.7, 2.1])
    assert residual < 1e-6


def test_reduce_corrupted_sl2_ansatz():
    bad = Ansatz(("phi4", "phi5", "phi6"),
                 parse("3*x^3 + phi4*x^4 + phi5*x^5 + phi6*x^6", depvar="v",
                       params=["phi4", "phi5", "phi6"]))
    outcome = red.reduce(SL2, bad)
    assert isinstance(outcome, NotReducible)
    assert outcome.zero.status is ZeroStatus.NONZERO


def test_reduce_succeeds_iff_operator_passes_check(corpus, plan):
    forced = EvolutionEquation(2, parse("u_2 + x"))
    negatives = [
        (forced, Ansatz(("phi1",), Param("phi1"))),
        (SL2, Ansatz(("phi4", "phi5", "phi6"),
                     parse("3*x^3 + phi4*x^4 + phi5*x^5 + phi6*x^6", depvar="v",
                           params=["phi4", "phi5", "phi6"]))),
        (HEAT, Ansatz(("phi1", "phi2"),
                      parse("phi1*x + phi2*x^2", params=["phi1", "phi2"]))),
    ]
    pairs = [(case.equation, case.ansatz, True) for case in corpus]
    pairs += [(eq, ansatz, False) for eq, ansatz in negatives]
    assert sum(1 for *_, positive in pairs if positive) >= 3
    assert sum(1 for *_, positive in pairs if not positive) >= 3
    for eq, ansatz, _ in pairs:
        outcome = red.reduce(eq, ansatz, plan)
        reduced_ok = isinstance(outcome, ReducedSystem)
        verdict = check_gcs(eq, ansatz_to_operator(ansatz, plan), plan)
        assert reduced_ok == verdict.status.is_positive


# ---------------------------------------------------------------------------
# solution families

VEQ = EvolutionEquation(2, parse("v_2 - v^3/x^3 + (9/4)*v/x^2", depvar="v"),
                        depvar="v")
MOVING = SolutionFamily(("c1", "c2"), parse(
    "(2*x)^(1/2)*(3*x^4 + (24*t + c1)*x^2 - c2)/(x^4 + (24*t + c1)*x^2 + c2)",
    depvar="v", params=["c1", "c2"]))
STATIONARY = SolutionFamily(("c1", "c2"), parse(
    "(2*x)^(1/2)*(c1*x^2 - c2)/(c1*x^2 + c2)", depvar="v", params=["c1", "c2"]))


def test_verify_solution_families():
    assert verify_solution(VEQ, MOVING.f).zero.status is ZeroStatus.PROBABLY_ZERO
    assert verify_solution(VEQ, STATIONARY.f).zero.status is ZeroStatus.PROBABLY_ZERO
    bad = verify_solution(HEAT, T)
    assert bad.zero.status is ZeroStatus.NONZERO
    assert bad.residual == parse("1")


def test_essentiality():
    assert is_zero(essentiality_det(MOVING)).status is ZeroStatus.NONZERO
    # only the ratio c1/c2 matters in the stationary family
    assert is_zero(essentiality_det(STATIONARY)).status is ZeroStatus.PROBABLY_ZERO
    degenerate = SolutionFamily(("k1", "k2"),
                                parse("(k1 + k2)*x", params=["k1", "k2"]))
    assert essentiality_det(degenerate) == ZERO


def test_essentiality_chain_rule_identity():
    # family obtained by substituting the reduced-system solution into the
    # ansatz: det(f_{a-1,kappa_b}) = det Phi|_{phi=psi} * det(psi_kappa)
    fam = SolutionFamily(("c0", "c1", "c2"),
                         parse("c0*x^3 + (24*c0*t + c1)*x + c2*x^(-1)", depvar="w",
                               params=["c0", "c1", "c2"]))
    lhs = essentiality_det(fam)
    psi = [parse("c0", params=["c0"]),
           parse("24*c0*t + c1", params=["c0", "c1"]),
           parse("c2", params=["c2"])]
    phi_at_psi = substitute(phi_matrix(W_ANSATZ).det(),
                            {Param(p): s for p, s in zip(W_ANSATZ.params, psi)})
    psi_jac = SymbolicMatrix.from_rows(
        [[partial_derivative(s, Param(k)) for k in fam.params] for s in psi])
    rhs = mul(phi_at_psi, psi_jac.det())
    assert is_zero(add(lhs, mul(rat(-1), rhs))).is_zeroish


def test_family_to_ansatz():
    fam = SolutionFamily(("kappa1",), Param("kappa1"))
    ansatz = family_to_ansatz(fam, HEAT)
    outcome = red.reduce(HEAT, ansatz)
    assert isinstance(outcome, ReducedSystem) and outcome.rhs == (ZERO,)

    wfam = SolutionFamily(("c0", "c1", "c2"),
                          parse("c0*x^3 + (24*c0*t + c1)*x + c2*x^(-1)", depvar="w",
                                params=["c0", "c1", "c2"]))
    ansatz = family_to_ansatz(wfam, WEQ)
    outcome = red.reduce(WEQ, ansatz)
    assert isinstance(outcome, ReducedSystem)
    assert all(is_zero(g).is_zeroish for g in outcome.rhs)

    with pytest.raises(InessentialFamilyError):
        family_to_ansatz(SolutionFamily(("k1", "k2"),
                                        parse("(k1 + k2)*x", params=["k1", "k2"])),
                         HEAT)
    with pytest.raises(NotSolutionError):
        family_to_ansatz(SolutionFamily(("k1",),
                                        parse("k1*t", params=["k1"])), HEAT)
    with pytest.raises(NonAffineError):
        family_to_ansatz(MOVING, VEQ)


def test_solution_families_reduce_to_constant_systems(corpus, plan):
    # every verified affine family reduces its equation to phi_t = 0
    for case in corpus:
        sources = [(case.equation, fc.family) for fc in case.families
                   if fc.essential]
        for eq, fam in sources:
            try:
                ansatz = family_to_ansatz(fam, eq, plan)
            except NonAffineError:
                continue
            outcome = red.reduce(eq, ansatz, plan)
            assert isinstance(outcome, ReducedSystem)
            for g in outcome.rhs:
                assert is_zero(g, plan).is_zeroish
