"""Run the Hankel-to-automaton pipeline and look at where it goes wrong.

The construction identities hold on the grid words, yet the synthesized
automaton gives alpha^T eta = sum of the first grid row on the empty word,
so a function with f(eps) = 0 is never reproduced.
"""
from nwhankel import hankel, synthesis
from nwhankel.nested_words import format_word

report = synthesis.synthesize(hankel.paren_count(), ("a",), verify_len=8)
print(report.text())
a = report.automaton
print()
print("f(eps) =", hankel.paren_count()(()), " automaton(eps) =", a(()))
print("sum of first grid row =", report.grid.values[0].sum())
print("worst word:", format_word(report.worst_word))
