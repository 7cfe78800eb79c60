# tests/unit/__init__.py
# Unit test package
