"""Command line interface: scenario files, pipelines and artifact writers."""
