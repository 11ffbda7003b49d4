"""RFSMC: stateless model checking of actor programs with Random-First-Search ODPOR."""

__version__ = "0.1.0"
