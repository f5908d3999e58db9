import sys

from cif.cli import main

sys.exit(main())
