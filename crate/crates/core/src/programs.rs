//! Example programs shipped with the crate.

/// A bank service: one actor whose employees share accounts, with account
/// numbers synchronized under the label `a`.
pub const BANK: &str = include_str!("../programs/bank.mac");

/// Five messages over three idle objects exercising the selection rule.
pub const WORKED: &str = include_str!("../programs/worked.mac");

/// Two actors with no shared state.
pub const TWO_ACTORS: &str = include_str!("../programs/two_actors.mac");

/// A main block that never terminates.
pub const LOOP: &str = include_str!("../programs/loop.mac");
