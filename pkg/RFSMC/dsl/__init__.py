from RFSMC.dsl.emitter import emit_program
from RFSMC.dsl.parser import parse_file, parse_program

__all__ = ["emit_program", "parse_file", "parse_program"]
