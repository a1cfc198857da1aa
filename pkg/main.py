"Run a polykin scenario or validate a closure from the command line."

from sys import exit as sys_exit

from polykin.cli import main

if __name__ == "__main__":
    sys_exit(main())
