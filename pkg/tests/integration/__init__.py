# tests/integration/__init__.py
# Integration test package
