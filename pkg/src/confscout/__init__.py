"""Instance-wise solver configuration: portfolios, a bipartite GNN predictor, and evaluation."""

__version__ = "0.1.0"
