from .experiment import ExperimentConfig, RecipeOutput, RecipeTable, SweepSpec
from .gadget import CommutationProfile, GadgetBuild, Interaction, TargetSpec
from .results import (
    DeltaSearchResult,
    EigenSystem,
    HighOrderBoundReport,
    SelfEnergyEval,
    SlopeFit,
    SpectralReport,
    SubspaceSplit,
    Theorem1Result,
)
from .state import IterationRecord, ReductionState, ReductionTrace

__all__ = [
    "CommutationProfile",
    "DeltaSearchResult",
    "EigenSystem",
    "ExperimentConfig",
    "GadgetBuild",
    "HighOrderBoundReport",
    "Interaction",
    "IterationRecord",
    "ReductionState",
    "RecipeOutput",
    "RecipeTable",
    "ReductionTrace",
    "SelfEnergyEval",
    "SlopeFit",
    "SpectralReport",
    "SubspaceSplit",
    "SweepSpec",
    "TargetSpec",
    "Theorem1Result",
]
