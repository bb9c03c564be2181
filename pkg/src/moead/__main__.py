import sys

from moead.cli import main

sys.exit(main())
