"""Non-CI Cayley graph constructions on elementary abelian p-groups, with
exact verification of the isomorphism and of the absence of a Cayley
isomorphism."""

__version__ = "0.1.0"
