"""Ramsey-property transfer along pre-adjunctions, products and subcategories."""
