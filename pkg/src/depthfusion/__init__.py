"""
depthfusion: multi-view depth estimation with state-space backbones and a
pose-noise robustness benchmark.

depthfusion: estimação de profundidade multi-vista com backbones de espaço de
estados e um benchmark de robustez a ruído de pose.
"""
