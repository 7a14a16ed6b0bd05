"""
State Management Package
"""

from src.state.shared_state import StudyState, create_initial_state

__all__ = ["StudyState", "create_initial_state"]
