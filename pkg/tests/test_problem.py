"""Problem-file format."""

import pytest

from gcsym.expr import ZERO
from gcsym.problem import ProblemError, load_problem
from gcsym.symmetry import CanonicalOperator, ReducedOperator, UsualOperator

SL2_TEXT = """\
# the sl(2)-related example
depvar: v
equation.r: 2
equation.H: (v*v_2 - (5/6)*v_1^2)/x^2 + v_1
operator.form: reduced
operator.eta: x^3*v_3 - 12*x^2*v_2 + 60*x*v_1 - 120*v + 12*x^3
ansatz.params: phi4 phi5 phi6
ansatz.F: 2*x^3 + phi4*x^4 + phi5*x^5 + phi6*x^6
oracle.seed: 7
oracle.points: 25
"""


def test_load_full_problem():
    problem = load_problem(SL2_TEXT)
    assert problem.depvar == "v"
    assert problem.equation.r == 2
    assert isinstance(problem.operator, ReducedOperator)
    assert problem.ansatz.params == ("phi4", "phi5", "phi6")
    assert problem.plan.seed == 7 and problem.plan.n_points == 25
    assert problem.family is None


def test_canonical_and_usual_forms():
    problem = load_problem("""\
equation.r: 2
equation.H: u_2
operator.form: canonical
operator.rho: 1
operator.eta_check: 0
""")
    assert isinstance(problem.operator, CanonicalOperator)
    assert problem.operator.eta_check == ZERO

    problem = load_problem("""\
depvar: v
equation.r: 2
equation.H: v_2 - v^3/x^3 + (9/4)*v/x^2
operator.form: usual
operator.tau: 1
operator.xi: (3/2)*2^(1/2)*v/x^(3/2) - 3/x
operator.eta: -(3/2)*(v^3/x^3 - (3/2)*2^(1/2)*v^2/x^(5/2) - v/x^2 + 2*2^(1/2)/x^(3/2))
""")
    assert isinstance(problem.usual, UsualOperator)
    assert problem.operator is None


def test_family_section():
    problem = load_problem("""\
depvar: v
equation.r: 2
equation.H: v_2 - v^3/x^3 + (9/4)*v/x^2
family.params: c1 c2
family.f: (2*x)^(1/2)*(c1*x^2 - c2)/(c1*x^2 + c2)
""")
    assert problem.family.params == ("c1", "c2")


def test_problem_errors_carry_line_numbers():
    with pytest.raises(ProblemError) as err:
        load_problem("equation.r: 2\nbogus.key: 1\n")
    assert err.value.line == 2
    with pytest.raises(ProblemError, match="together"):
        load_problem("equation.r: 2\n")
    with pytest.raises(ProblemError, match="expected 'key: value'"):
        load_problem("just some text\n")
    with pytest.raises(ProblemError, match="duplicate"):
        load_problem("depvar: u\ndepvar: v\n")
    with pytest.raises(ProblemError, match="bad expression"):
        load_problem("equation.r: 2\nequation.H: u_2 + (\n")
    with pytest.raises(ProblemError, match="without its section"):
        load_problem("operator.eta: u_1\n")
    with pytest.raises(ProblemError, match="unknown identifier"):
        # parameters are not allowed inside H
        load_problem("equation.r: 2\nequation.H: u_2 + alpha\n")


def test_require():
    problem = load_problem("depvar: u\n")
    with pytest.raises(ProblemError, match="missing"):
        problem.require("equation", "ansatz")
