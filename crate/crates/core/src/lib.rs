pub mod astower;
pub mod forge;
pub mod laurent;
pub mod pgroups;
pub mod ramcalc;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
mod book_introduction {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/laurent.md")]
mod book_laurent {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/artin-schreier.md")]
mod book_artin_schreier {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/breaks.md")]
mod book_breaks {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/groups.md")]
mod book_groups {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/certificates.md")]
mod book_certificates {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
