"""Nested Hankel ranks of random automata compared with n and n^2."""
from nwhankel import hankel
from nwhankel.wvpa import random_wvpa

print("seed  n  gamma  rank  n^2")
for seed in range(12):
    n = 1 + seed % 3
    gamma = 1 + (seed // 3) % 2
    f = hankel.automaton_oracle(random_wvpa(n, ("a",), gamma, seed))
    st = hankel.stabilized_block(f, ("a",), 2, 8, 1e-7)
    print(f"{seed:4d}  {n}  {gamma:5d}  {st.rank:4d}  {n * n:3d}")
