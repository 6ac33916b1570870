"""
Output module - Fichiers CSV/JSON/texte et figures SVG
"""
