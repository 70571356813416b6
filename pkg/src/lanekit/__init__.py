"""lanekit: lane-level HD map generation from open geo-data with
rule-based network verification."""

__version__ = "0.1.0"
