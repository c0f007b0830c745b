"""Report-producing entry points over the analysis modules."""
