//! Intrinsic geometry of polyhedral metrics.
//!
//! A metric is given as a [`MetricNet`]: planar polygons, each in its own
//! coordinate frame, glued along edges. The module checks the gluing
//! conditions, measures vertex curvature `2π − θ`, finds shortest paths by
//! unfolding, and probes non-negative curvature through comparison angles.

mod angle;
mod geodesic;
mod net;

pub use angle::{
    angle_monotonicity_scan, comparison_angle, scan_from_distances, triangle_excess, AngleError,
    ScanReport,
};
pub use geodesic::{
    shortest_path, shortest_path_with, GeodesicError, GeodesicPath, SearchLimits, SurfacePoint,
};
pub use net::{
    locate_on_polytope, net_from_polytope, polytope_vertex_classes, validate_net,
    vertex_curvatures, ConditionReport, CurvatureReport, EdgeRef, Identification, MetricNet,
    NetError, ValidationReport,
};
