# app/api/__init__.py
"""Command-level dependency assembly"""
