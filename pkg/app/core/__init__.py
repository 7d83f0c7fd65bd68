# app/core/__init__.py
"""Core infrastructure module"""
