"""Matrix representations and implicit equations of toric rational hypersurfaces."""
