import numpy as np
import pytest
from stl_gen import random_formula, random_trace

from stratkit.errors import StratError
from stratkit.stl import (
    BIG,
    Always,
    And,
    Atom,
    Eventually,
    FunctionRegistry,
    Not,
    Or,
    TrueF,
    Until,
    normalize,
    parse,
    robustness,
    robustness_bool_oracle,
    robustness_signal,
)
from stratkit.trace import Trace


def ramp(n=5):
    return Trace.uniform(np.arange(n, dtype=float)[:, None])


# parser


def test_parse_examples():
    assert parse("x1 >= 3") == Atom("x1", ">=", 3)
    assert parse("F[92,165] (in_green >= 0.5)") == Eventually(92, 165, Atom("in_green", ">=", 0.5))
    with pytest.raises(StratError) as e:
        parse("a >= 1 U[2,1] b >= 0")
    assert e.value.code == "bad-interval"


def test_parse_precedence():
    a, b, c = (Atom(n, ">=", 0) for n in "abc")
    assert parse("a >= 0 | b >= 0 & c >= 0") == Or(a, And(b, c))
    assert parse("a >= 0 & b >= 0 & c >= 0") == And(And(a, b), c)
    assert parse("!a >= 0 & b >= 0") == And(Not(a), b)
    assert parse("a >= 0 U[0,2] b >= 0 & c >= 0") == And(Until(0, 2, a, b), c)
    assert parse("F[0,1] a >= 0 & b >= 0") == And(Eventually(0, 1, a), b)
    assert parse("G[1,2] !(a >= 0)") == Always(1, 2, Not(a))
    assert parse("true") == TrueF()
    assert parse("x[0] <= -1.5e-1") == Atom("x[0]", "<=", -0.15)


@pytest.mark.parametrize("text,pos", [("x >= ", 5), ("x >= 1 &", 8), ("(x >= 1", 7), ("x > 1", 2), ("F[1] x >= 0", 0), ("G[1,] x >= 0", 0)])
def test_parse_syntax_errors(text, pos):
    with pytest.raises(StratError) as e:
        parse(text)
    assert e.value.code == "syntax-error"
    assert str(pos) in e.value.detail


def test_parse_negative_interval():
    with pytest.raises(StratError) as e:
        parse("G[-1,2] x >= 0")
    assert e.value.code in ("bad-interval", "syntax-error")


def test_round_trip():
    rng = np.random.default_rng(0)
    for _ in range(500):
        f = random_formula(rng, 5)
        assert parse(str(f)) == f


# robustness


def test_robustness_examples():
    five = Trace.uniform(np.full((4, 1), 5.0))
    for t in range(4):
        assert robustness(parse("x1 >= 3"), five, t) == 2
    assert robustness(parse("F[0,2] (x1 >= 3)"), ramp(), 0) == -1
    assert robustness(parse("x1 <= 3"), five, 0) == -2
    assert robustness(TrueF(), five, 0) == BIG


def test_truncation_sentinels():
    tr = ramp(3)
    assert robustness(parse("F[5,6] x1 >= 0"), tr, 0) == -BIG
    assert robustness(parse("G[5,6] x1 >= 0"), tr, 0) == BIG
    assert robustness(parse("(x1 >= 0) U[5,6] (x1 >= 0)"), tr, 0) == -BIG
    # partially truncated windows use what is left
    assert robustness(parse("F[1,10] x1 >= 0"), tr, 1) == 2


def test_until_semantics():
    tr = Trace.uniform(np.array([[1, -1], [1, -1], [1, 2], [-1, 3]], dtype=float), channels=("p", "q"))
    f = parse("(p >= 0) U[0,3] (q >= 0)")
    assert robustness(f, tr, 0) == 1  # q turns true at step 2 while p holds
    g = parse("(p >= 0) U[3,3] (q >= 0)")
    assert robustness(g, tr, 0) == -1


def test_errors():
    with pytest.raises(StratError) as e:
        robustness(parse("x1 >= 0"), ramp(), 5)
    assert e.value.code == "index-out-of-range"
    with pytest.raises(StratError) as e:
        robustness(parse("nope >= 0"), ramp(), 0)
    assert e.value.code == "unresolved-function"


def test_registry():
    reg = FunctionRegistry()
    reg.affine("s", [1.0], 10.0)
    assert robustness(parse("s >= 12"), ramp(), 0, reg) == -2
    assert robustness(parse("x[0] >= 1"), ramp(), 3) == 2


def test_irregular_windows():
    tr = Trace([0, 0.5, 2.0, 3.0], [[0], [1], [5], [2]], irregular=True)
    assert robustness(parse("F[0,1] x1 >= 0"), tr, 0) == 1
    assert robustness(parse("F[0,2] x1 >= 0"), tr, 0) == 5


def test_oracle_examples():
    assert robustness_bool_oracle(parse("x1 >= 3"), Trace.uniform([[5.0]]), 0)
    assert robustness_bool_oracle(parse("G[0,4] (x1 >= 0)"), ramp(), 0)
    assert not robustness_bool_oracle(parse("F[0,2] (x1 >= 3)"), ramp(), 0)


def test_soundness_fuzz():
    rng = np.random.default_rng(1)
    checked = 0
    for _ in range(400):
        f, tr = random_formula(rng), random_trace(rng)
        for t in (0, int(rng.integers(50))):
            rho = robustness(f, tr, t)
            if abs(rho) > 1e-9:
                assert (rho > 0) == robustness_bool_oracle(f, tr, t), (str(f), t, rho)
                checked += 1
    assert checked > 500


def test_until_fuzz():
    rng = np.random.default_rng(2)
    for _ in range(300):
        f = Until(0, 3, random_formula(rng, 2), random_formula(rng, 2))
        tr = random_trace(rng)
        rho = robustness(f, tr, 0)
        if abs(rho) > 1e-9:
            assert (rho > 0) == robustness_bool_oracle(f, tr, 0)


def test_identities():
    rng = np.random.default_rng(3)
    for _ in range(300):
        phi, tr = random_formula(rng, 3), random_trace(rng)
        a, b = sorted(rng.integers(0, 12, size=2).tolist())
        ev = robustness_signal(Eventually(a, b, phi), tr)
        assert np.array_equal(ev, robustness_signal(Until(a, b, TrueF(), phi), tr))
        al = robustness_signal(Always(a, b, phi), tr)
        assert np.array_equal(al, robustness_signal(Not(Eventually(a, b, Not(phi))), tr))
        assert np.array_equal(robustness_signal(Not(phi), tr), -robustness_signal(phi, tr))


def _shift_mu(f, name, d):
    if isinstance(f, Atom):
        return Atom(f.fn, f.op, f.mu + d) if f.fn == name and f.op == ">=" else f
    if isinstance(f, TrueF):
        return f
    if isinstance(f, (And, Or)):
        return type(f)(_shift_mu(f.left, name, d), _shift_mu(f.right, name, d))
    if isinstance(f, (Eventually, Always)):
        return type(f)(f.a, f.b, _shift_mu(f.child, name, d))
    if isinstance(f, Until):
        return Until(f.a, f.b, _shift_mu(f.left, name, d), _shift_mu(f.right, name, d))
    raise TypeError(f)


def test_mu_monotonicity():
    rng = np.random.default_rng(4)
    for _ in range(300):
        f, tr = random_formula(rng, 4, positive=True), random_trace(rng)
        g = _shift_mu(f, "x1", float(rng.uniform(0, 1)))
        assert np.all(robustness_signal(g, tr) <= robustness_signal(f, tr))


def test_normalize():
    assert normalize(2, 4) == 0.5
    assert normalize(-10, 4) == -1
    assert normalize(BIG, 3) == 1
    with pytest.raises(StratError) as e:
        normalize(1, 0)
    assert e.value.code == "nonpositive-scale"
