//! Liouville coordinate, WKB trajectories and the flow map.

mod critical;
mod frame;
mod trajectory;

pub use critical::{classify_critical_points, infinity_order, poly_roots, CriticalKind, CriticalPoint, Location};
pub use frame::{pick_root, GeometryTolerances, LiouvilleFrame};
pub use trajectory::{trace_ray, trace_trajectory, HalfTrajectory, Ray, RayStatus, TraceOptions, Trajectory, TrajectorySample};
