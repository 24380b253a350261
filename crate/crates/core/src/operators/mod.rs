//! Hardy-type operators, the Riesz potential and its near/far pieces, and
//! their product-group versions, all acting on radial profiles.

mod hardy;
mod product;
mod riesz;

pub use hardy::{hardy, hardy_tail, weighted_hardy_h_alpha, HardyProfile};
pub use product::{
    product_hardy, product_riesz_pieces, HardyVariant, ProductHardyProfile, ProductRieszProfile, RieszPiece,
};
pub(crate) use riesz::riesz_part;
pub use riesz::{riesz_far, riesz_far_adjoint, riesz_full, riesz_near, RieszPart, RieszProfile};
