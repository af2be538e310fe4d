//! Phase portraits on the Poincaré disc: separatrix skeletons, return maps,
//! transversal conics and graphics.

pub mod conic;
pub mod connection;
pub mod cycles;
pub mod graphic;
pub mod integrate;
mod render;
mod skeleton;

pub use conic::{conic_certificate, Conic, ConicCertificate, CertificateFailure, Parity, ParityPoint, RootBranch};
pub use connection::{connection_side, locate_connection, trace_connection_curve, Connection, Side};
pub use cycles::{first_return, focus_return_map, return_map, LimitCycle, ReturnMap, ReturnSample};
pub(crate) use graphic::endpoint;
pub use graphic::{detect_graphics, Graphic, GraphicEdge};
pub use integrate::{integrate, Orbit, Settings, Target, Terminal};
pub use render::portrait_svg;
pub use skeleton::{
    equator_order, singular_points, skeleton, skeleton_with, Place, Separatrix, Skeleton, SkeletonPoint,
};
