import sys

from pmcs.cli import main

sys.exit(main())
