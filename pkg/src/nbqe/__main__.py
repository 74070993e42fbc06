import sys

from nbqe.cli import main

sys.exit(main())
