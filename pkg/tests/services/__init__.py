"""Services tests package."""
