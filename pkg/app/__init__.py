# app/__init__.py
"""Kaleidocycle closed-linkage solver"""
