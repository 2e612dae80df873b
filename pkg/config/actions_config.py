from actions.ablate import AblateAction
from actions.evaluate import EvaluateAction
from actions.restore import RestoreAction
from actions.simulate import SimulateAction
from actions.verify import VerifyAction

actions = [
    SimulateAction(),
    RestoreAction(),
    EvaluateAction(),
    VerifyAction(),
    AblateAction(),
]
