"""Closed λ-terms with an intersection type each, shared by the bridge tests."""

from __future__ import annotations

CORPUS = [
    (r"\x. x", "[a] -> a"),
    (r"\x y. x", "[a] -> [] -> a"),
    (r"\x y. x", "[a] -> [b] -> a"),
    (r"\p. fst p", "[a &.] -> a"),
    (r"\p. snd p", "[.& b] -> b"),
    (r"\x. (x, x)", "[a] -> a &."),
    (r"\y. (\x. x) y", "[a] -> a"),
    (r"\f x. f x", "[[a] -> b] -> [a] -> b"),
    (r"\f x. f (f x)", "[[a] -> a] -> [a] -> a"),
    (r"\x y. (y, x)", "[a] -> [b] -> .& a"),
    (r"\p. (snd p, fst p)", "[.& b] -> b &."),
    (r"\f. f (\x. x)", "[[[a] -> a] -> b] -> b"),
    (r"\f x. f", "[[] -> a] -> [] -> [] -> a"),
]
