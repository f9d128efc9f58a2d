//! Small components against hand-written formulas.  Only the constant sign
//! of each summand is written down; the Koszul part comes from the engine.

mod common;

use common::{check_family, check_ha3_j_sets, swapped, HA, HC, PHI};
use hga_core::maps::hc::{hc, Orientation};
use hga_core::maps::{ha, phi::phi};

#[test]
fn phi_small_components() {
    assert_eq!(check_family(phi().as_ref(), PHI), Ok(4));
}

#[test]
fn hc_small_components() {
    assert_eq!(check_family(hc(Orientation::Forward).as_ref(), HC), Ok(20));
}

#[test]
fn ha_small_components() {
    assert_eq!(check_family(ha::ha().as_ref(), HA), Ok(27));
}

#[test]
fn ha3_j_sets() {
    assert_eq!(check_ha3_j_sets(), Ok(25));
}

#[test]
fn hc_reverse_is_full_swap() {
    // h^c∘T is the forward formula with a and b exchanged everywhere, F included
    assert_eq!(check_family(hc(Orientation::Reverse).as_ref(), &swapped(HC)), Ok(20));
}
