from torus_link.cli import COMMANDS
from torus_link.cli import cli as _root_group


def create_cli():
    """Command-line factory: the root group with every command registered"""
    for command in COMMANDS:
        _root_group.add_command(command)
    return _root_group
