"""formweaver: shapes-driven metadata capture engine.

SHACL documents compile into data-entry forms; submissions are validated,
rule-augmented, and persisted into a workspace knowledge graph; competency
questions run through a SPARQL subset; scan entries export as XML.
"""

__version__ = "0.1.0"
