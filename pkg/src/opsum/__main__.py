import sys

from opsum.cli import main

sys.exit(main())
