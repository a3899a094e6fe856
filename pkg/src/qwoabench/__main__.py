import sys

from qwoabench.cli import main

sys.exit(main())
