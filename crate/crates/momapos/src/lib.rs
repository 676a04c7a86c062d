//! momapos: base placement planning for mobile manipulators.
//!
//! Given a scene of rigid and articulated objects and a robot model, the
//! planner selects a collision-free base position from which a fixed-base
//! arm can grasp a rigid object or open a door. The pipeline has four
//! phases: object importance prediction over the scene graph, kinematic
//! instantiation of the selected objects, potential-field base placement
//! scoring against an inverse reachability map, and candidate search with
//! navigation and manipulation feasibility checks.

pub mod baselines;
pub mod eval;
pub mod fixtures;
pub mod geom;
pub mod grid;
pub mod importance;
pub mod kinematics;
pub mod motion;
pub mod potential;
pub mod reachability;
pub mod scene;
pub mod search;
