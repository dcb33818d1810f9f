"""
Monte Carlo simulation of Wigner-test QKD sessions.

Modules:
- streams: counter-based per-round random numbers (seed, round index)
- session: protocol configuration, round records, session generation
- sifting: public discussion, key extraction, estimators, verdicts
- export: CSV / JSON-lines / JSON writers for records, transcripts and results
"""
