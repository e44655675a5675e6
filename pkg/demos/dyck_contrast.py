"""The Dyck indicator: unbounded word Hankel rank, nested Hankel rank one."""
from nwhankel import hankel
from nwhankel.nested_words import enumerate_well_matched

f = hankel.dyck_one()
print("L  word_rank  nested_rank")
for length, word_rank in hankel.word_hankel_rank_growth(f, ("a",), [0, 2, 4, 6, 8]):
    words = enumerate_well_matched(("a",), length)
    nested = hankel.block_rank(hankel.build_block(f, words, words))
    print(f"{length:<2d} {word_rank:9d}  {nested:11d}")
