//! Placeholder; command implementation lands next.
