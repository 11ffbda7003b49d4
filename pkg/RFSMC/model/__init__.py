from RFSMC.model.actions import Action, ActionKind, ObjectId, ObjectKind
from RFSMC.model.program import ObjectDecl, Program, ProgramBuilder
from RFSMC.model.simulator import Execution, RunOutcome, SimState, Simulator, Transition

__all__ = [
    "Action",
    "ActionKind",
    "Execution",
    "ObjectDecl",
    "ObjectId",
    "ObjectKind",
    "Program",
    "ProgramBuilder",
    "RunOutcome",
    "SimState",
    "Simulator",
    "Transition",
]
