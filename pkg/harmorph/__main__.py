"""Allow `python -m harmorph`."""
from .cli import main

main()
