import sys

from dscf.main import main

sys.exit(main())
