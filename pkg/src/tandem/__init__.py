"""Two-party secure analytics engine.

Two mutually distrusting party processes jointly run filter-groupby-aggregate
queries over authenticated secret-shared data using garbled-circuit dual
execution, with an oblivious data-retrieval store, an ingress pipeline that
builds materialized encounter views, and an analytic latency model.
"""

__version__ = "0.1.0"
