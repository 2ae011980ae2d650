"""Figure rendering for behaviour-space analysis exports.

A pure consumer of the analysis CSV files: heatmap matrices, coverage and
convergence curves, performance histograms and comparison grids. Nothing
is recomputed here; plot values come verbatim from the files.
"""

__version__ = "0.1.0"
