"""
Command-line interface: argparse dispatcher (main) and subcommands (commands).
"""

__all__ = ["main", "commands"]
