"""Rule-based triage for Cowrie SSH honeypot logs.

Pipeline: ingest ndjson events, group them into attacker sessions, score
each session against a keyword dictionary, classify intent and skill, and
emit CSV/HTML reports plus SVG distribution charts. A seeded synthetic
corpus generator provides labeled inputs for end-to-end verification.
"""

__version__ = "0.1.0"
