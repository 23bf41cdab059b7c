"""Malformed DSL inputs shared by the parser tests and the acceptance suite."""

# (text, line, column, message fragment)
MALFORMED = [
    ("binom(", 1, 7, "expected expression"),
    ("", 1, 1, "expected expression"),
    ("1 +", 1, 4, "expected expression"),
    ("(n + 1", 1, 7, "expected ')'"),
    ("n + 1)", 1, 6, "unexpected ')'"),
    ("foo(n)", 1, 1, "unknown function 'foo'"),
    ("sum(k=0..n k)", 1, 12, "expected ','"),
    ("sum(k=0 n, k)", 1, 9, "expected '..'"),
    ("sum(0..n, k)", 1, 5, "expected summation variable"),
    ("sum(k..n, k)", 1, 6, "expected '='"),
    ("binom(n k)", 1, 9, "expected ','"),
    ("binom(n, k", 1, 11, "expected ')'"),
    ("F(n", 1, 4, "expected ')'"),
    ("F n", 1, 3, "needs an argument list"),
    ("2 $ 3", 1, 3, "unexpected character"),
    ("n * * 2", 1, 5, "expected expression"),
    ("1.5", 1, 2, "unexpected character"),
    ("k^", 1, 3, "expected expression"),
    ("sum(k=0..n,\n  binom(n,k)\n  * )", 3, 5, "expected expression"),
    ("n +\n\n   # 2", 3, 4, "unexpected character"),
    ("L(n) L(n)", 1, 6, "unexpected 'L'"),
    ("binom(n,\n  k,\n  2)", 2, 4, "expected ')'"),
    ("sum(sum=0..1, 1)", 1, 5, "expected summation variable"),
    ("U()", 1, 3, "expected expression"),
    ("()", 1, 2, "expected expression"),
    ("n =", 1, 3, "unexpected '='"),
    ("x é", 1, 3, "unexpected character"),
]
