# Subflow package
