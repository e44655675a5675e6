"""Print the 6x6 nested Hankel block of paren_count and its rank."""
from nwhankel import hankel
from nwhankel.nested_words import format_word, parse_word

labels = [parse_word(t) for t in ["eps", "a", "<a a>", "a a", "<a a a>", "<a <a a> a>"]]
block = hankel.build_block(hankel.paren_count(), labels, labels)

width = max(len(format_word(w)) for w in labels)
for w, row in zip(labels, block.entries):
    print(f"{format_word(w):>{width}}  " + " ".join(f"{x:3.0f}" for x in row))
print("rank:", hankel.block_rank(block))
