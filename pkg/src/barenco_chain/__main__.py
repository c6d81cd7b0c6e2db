import sys

from barenco_chain.cli import main

sys.exit(main())
