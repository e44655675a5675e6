"""Evaluate the paren-count automaton, then write and reload it as JSON."""
from nwhankel.nested_words import format_word, enumerate_well_matched
from nwhankel.wvpa import Wvpa, paren_count_automaton

a = paren_count_automaton()
for w in enumerate_well_matched(("a",), 4):
    print(f"{format_word(w):>16}  {a(w):g}")

text = a.to_json()
b = Wvpa.from_json(text)
print("reloaded automaton agrees:", all(a(w) == b(w) for w in enumerate_well_matched(("a",), 6)))
