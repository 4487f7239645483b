import sys

from graphhist.main import main

sys.exit(main())
