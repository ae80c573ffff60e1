"""Service-side helpers: request models and the SQLite run log."""
