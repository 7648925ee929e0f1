"""hgcsp: hypergraph width calculus, exact flows/separators, and
uniform-split CSP solving, cross-verifiable against brute force."""

__version__ = "0.1.0"
