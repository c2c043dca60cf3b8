// Every chapter is compiled as a doc comment, so `cargo test` runs the
// code blocks of the book against the current library.

#[doc = include_str!("src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("src/forms.md")]
pub mod forms {}
#[doc = include_str!("src/instantons.md")]
pub mod instantons {}
#[doc = include_str!("src/flow.md")]
pub mod flow {}
#[doc = include_str!("src/conformal.md")]
pub mod conformal {}
#[doc = include_str!("src/cli.md")]
pub mod cli {}
