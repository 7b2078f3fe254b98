"""Embedding quantum simulator toolkit."""
