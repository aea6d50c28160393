"""Allow running as `python -m gns_decay`."""

from gns_decay.cli import app

app()
