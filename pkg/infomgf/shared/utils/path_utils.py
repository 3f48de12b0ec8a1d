import os


__all__ = ['ensure_dir', 'get_abspath']


def get_abspath(file_path: str) -> str:
    return os.path.abspath(
        os.path.expandvars(
            os.path.expanduser(file_path)
        )
    )


def ensure_dir(dir_path: str) -> str:
    """Expands the path and creates the directory if it is missing."""
    path = get_abspath(dir_path)
    os.makedirs(path, exist_ok=True)
    return path
