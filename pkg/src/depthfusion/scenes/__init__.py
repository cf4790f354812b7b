"""
Synthetic scenes and their on-disk format.
Cenas sintéticas e seu formato em disco.
"""

from depthfusion.scenes.dataset import load_dataset, make_dataset
from depthfusion.scenes.synth import SceneConfig, SceneSample, generate_scene

__all__ = ["SceneConfig", "SceneSample", "generate_scene", "load_dataset", "make_dataset"]
