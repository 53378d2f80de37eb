"""With both divisible and indivisible items the criteria stop agreeing:
LexiMin and LexiMax send item 4 to different agents."""

from spd_alloc.oracle import mixed_fixture

print(mixed_fixture().format())
