import sys

# Deep non-tail source recursion (corpus keeps it modest) plus the naive
# engine's nested backpropagator calls need headroom beyond the default.
sys.setrecursionlimit(200_000)
