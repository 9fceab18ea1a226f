//! Exact real-root certification: Sturm chains, root isolation, negativity
//! and interlacing checks, and polynomial identities behind the
//! real-rootedness of the fan, wheel and whirl families.

mod identities;
mod sturm;

pub use identities::*;
pub use sturm::*;
