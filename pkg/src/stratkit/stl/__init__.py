from .ast import GEQ, LEQ, Always, And, Atom, Eventually, Formula, Not, Or, TrueF, Until, conj
from .parser import parse
from .robustness import (
    BIG,
    FunctionRegistry,
    normalize,
    robustness,
    robustness_bool_oracle,
    robustness_signal,
)
