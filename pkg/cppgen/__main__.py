# cppgen/__main__.py
from cppgen.cli.main import main

if __name__ == "__main__":
    raise SystemExit(main())
