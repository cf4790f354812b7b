"""
depthbench: Django project hosting the depthfusion harness.
depthbench: projeto Django que hospeda o harness depthfusion.
"""
