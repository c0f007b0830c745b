"""Matrix file ingestion."""
