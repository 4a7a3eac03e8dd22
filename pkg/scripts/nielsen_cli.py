import sys
sys.path.append('src')

from cli.main import main

if __name__ == "__main__":
    main()
