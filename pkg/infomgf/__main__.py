import sys

from infomgf.cli.main import main

sys.exit(main())
