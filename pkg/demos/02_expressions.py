"""A tour of the binding expression language.

Arithmetic with the usual precedence, right-associative powers,
degree-based trigonometry, comparisons that yield 1/0 (handy for
improvised toggle buttons), and hyphenated identifiers for output
channels like "dino-size".
"""

from sketchbind.errors import DivisionByZeroError
from sketchbind.expr import evaluate, free_variables, parse

examples = [
    ("1+2*3", {}),
    ("2^3^2", {}),
    ("-2^2", {}),
    ("angle / 2", {"angle": 40.0}),
    ("sin(30)", {}),
    ("sqrt(pow(3, 2) + pow(4, 2))", {}),
    ("(length > 10)", {"length": 8.0}),
    ("(length > 10)", {"length": 12.0}),
    ("dino-size * 2", {"dino-size": 1.5}),
    ("max(a, b) - min(a, b)", {"a": 3.0, "b": 7.0}),
]

for text, env in examples:
    expr = parse(text)
    print(f"{text!r:34} {dict(env)!s:28} -> {evaluate(expr, env)}")

print("\nfree variables of 'a*b - sin(a)':", sorted(free_variables(parse("a*b - sin(a)"))))

# evaluation faults are specific and never silent
try:
    evaluate(parse("1 / (x - x)"), {"x": 5.0})
except DivisionByZeroError as exc:
    print("fault:", exc)
