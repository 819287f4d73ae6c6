"""socdebug: reasoning-trajectory and Socratic-conversation generation
for debugging education.

Pipeline: pair misconceptions with solutions by construct overlap, run
buggy code against unit tests in a sandbox, describe the simplest failing
test, generate a deductive reasoning trajectory ending in a statement
that contradicts the misconception, generate a Socratic conversation
anchored on it, and validate both with a rubric-driven judge model.
"""

__version__ = "0.1.0"
