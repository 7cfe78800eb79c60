# tests/__init__.py
# G2 Variational Lab Test Package
