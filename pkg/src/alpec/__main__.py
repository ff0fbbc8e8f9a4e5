import sys

from alpec.cli import main

sys.exit(main())
