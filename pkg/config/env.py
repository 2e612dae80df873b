from pathlib import Path

from dotenv import load_dotenv


def initialize_env(path=None):
    """Load DRM_* variables from a .env file; real environment variables win."""
    env_path = Path(path) if path else Path.cwd() / ".env"
    if env_path.is_file():
        load_dotenv(env_path, override=False)
    return env_path
