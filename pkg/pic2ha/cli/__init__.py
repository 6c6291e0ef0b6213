"""Command-line surface: text formats, resolution cache and report rendering."""
