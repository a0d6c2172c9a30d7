# main.py - Línea de comandos de cppgen
from cppgen.cli.main import main

if __name__ == "__main__":
    raise SystemExit(main())
