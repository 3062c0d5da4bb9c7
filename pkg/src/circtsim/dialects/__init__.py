"""Operation semantics, one module per dialect."""
