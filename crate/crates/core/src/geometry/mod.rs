//! Circles, solid tori, similarities and the predicates relating them.

mod distance;
mod linking;
mod primitives;
mod similarity;

pub use distance::{
    circle_circle_distance, disjoint_margin_lower_bound, point_circle_distance, tori_disjoint,
    tori_disjoint_with, torus_contains_torus, Check, CircleDistance, MinimizeOpts,
};
pub use linking::{circles_linked, link_report, linking_number_gauss, LinkReport, LinkVerdict};
pub use primitives::{in_plane_frame, project_point, unit, Circle3, Plane, SolidTorus, Vec3, EPS_UNIT};
pub use similarity::{apply_similarity, Similarity, Transform};
