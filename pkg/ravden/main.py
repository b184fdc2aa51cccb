import logging
import sys

from dotenv import load_dotenv

from ravden.cli import run

logger = logging.getLogger(__name__)


def main():
    """Main application entry point"""
    # RAVDEN_* defaults may come from a .env file
    load_dotenv()
    sys.exit(run(sys.argv[1:], setup_logging=True))


if __name__ == "__main__":
    main()
